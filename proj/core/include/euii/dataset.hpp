#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace euii::data {

/// One two-group experiment: group sizes and the standardised mean
/// difference (Hedges' g).
struct ExperimentRow {
    std::string id;
    int n_control = 0;
    int n_treatment = 0;
    double effect = 0.0;
};

struct RowIssue {
    std::size_t line = 0;  // 1-based line in the input
    std::string reason;
};

struct Dataset {
    std::vector<ExperimentRow> rows;
    std::vector<RowIssue> skipped;
};

/// Reads comma-separated text with a header naming at least
/// id, n_control, n_treatment, effect (any order, extra columns ignored).
/// Rows with missing or unparsable fields, group sizes below 2 or a
/// non-finite effect are skipped and reported. Throws DataError when the
/// header is missing a column.
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

}  // namespace euii::data
