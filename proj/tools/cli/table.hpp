#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace euii::cli {

enum class Format { table, csv, json };

Format parse_format(const std::string& name);

/// Rows of exact cell text. Numeric cells hold the shortest round-trip
/// representation, so every rendering carries the same numbers.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Parses comma-separated text whose first line is the header.
    static Table from_csv(const std::string& text);

    void render(std::ostream& out, Format format) const;
};

}  // namespace euii::cli
