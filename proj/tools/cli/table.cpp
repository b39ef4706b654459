#include "table.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "euii/errors.hpp"
#include "euii/format.hpp"

namespace euii::cli {
namespace {

bool as_number(const std::string& cell, double& value)
{
    if (cell.empty()) return false;
    if (cell == "nan" || cell == "inf" || cell == "-inf") return false;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc{} && p == cell.data() + cell.size();
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Format parse_format(const std::string& name)
{
    if (name == "table") return Format::table;
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw DomainError("unknown format: " + name);
}

Table Table::from_csv(const std::string& text)
{
    Table t;
    std::istringstream in(text);
    std::string line;
    if (std::getline(in, line)) t.columns = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split_line(line);
        row.resize(t.columns.size());
        t.rows.push_back(std::move(row));
    }
    return t;
}

void Table::render(std::ostream& out, Format format) const
{
    switch (format) {
    case Format::csv: {
        for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
            out << '\n';
        }
        return;
    }
    case Format::json: {
        auto array = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t j = 0; j < columns.size(); ++j) {
                double v = 0.0;
                if (row[j].empty()) {
                    obj[columns[j]] = nullptr;
                } else if (as_number(row[j], v)) {
                    std::int64_t i = 0;
                    const auto* end = row[j].data() + row[j].size();
                    auto [p, ec] = std::from_chars(row[j].data(), end, i);
                    if (ec == std::errc{} && p == end) {
                        obj[columns[j]] = i;
                    } else {
                        obj[columns[j]] = v;
                    }
                } else {
                    obj[columns[j]] = row[j];
                }
            }
            array.push_back(std::move(obj));
        }
        out << array.dump(2) << '\n';
        return;
    }
    case Format::table: {
        std::vector<std::vector<std::string>> cells;
        cells.push_back(columns);
        for (const auto& row : rows) {
            std::vector<std::string> r;
            for (const auto& c : row) {
                double v = 0.0;
                r.push_back(as_number(c, v) && c.find_first_of(".eE") != std::string::npos ? format_significant(v)
                                                                                            : c);
            }
            cells.push_back(std::move(r));
        }
        std::vector<std::size_t> width(columns.size(), 0);
        for (const auto& r : cells) {
            for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
        }
        for (const auto& r : cells) {
            for (std::size_t j = 0; j < r.size(); ++j) {
                out << (j ? "  " : "") << r[j];
                if (j + 1 < r.size()) out << std::string(width[j] - r[j].size(), ' ');
            }
            out << '\n';
        }
        return;
    }
    }
}

}  // namespace euii::cli
