#include "euii/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <string_view>

#include "euii/errors.hpp"

namespace euii::data {
namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

std::optional<int> parse_int(std::string_view s)
{
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        // tolerate "12.0"
        double d = 0.0;
        auto [q, ec2] = std::from_chars(s.data(), s.data() + s.size(), d);
        if (ec2 != std::errc{} || q != s.data() + s.size() || d != std::floor(d) || std::abs(d) > 1e9) {
            return std::nullopt;
        }
        return static_cast<int>(d);
    }
    return v;
}

std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

Dataset read_dataset(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) {
        throw DataError("dataset has no header line");
    }
    const std::array<std::string_view, 4> names{"id", "n_control", "n_treatment", "effect"};
    std::array<std::size_t, 4> col{};
    const auto header = split(line);
    for (std::size_t k = 0; k < names.size(); ++k) {
        std::size_t found = header.size();
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == names[k]) {
                found = j;
                break;
            }
        }
        if (found == header.size()) {
            throw DataError("dataset header lacks column '" + std::string(names[k]) + "'");
        }
        col[k] = found;
    }

    Dataset ds;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        auto skip = [&](std::string reason) { ds.skipped.push_back({line_no, std::move(reason)}); };
        bool complete = true;
        for (std::size_t c : col) {
            if (c >= fields.size() || fields[c].empty() || fields[c] == "NA") complete = false;
        }
        if (!complete) {
            skip("missing field");
            continue;
        }
        const auto nc = parse_int(fields[col[1]]);
        const auto nt = parse_int(fields[col[2]]);
        const auto g = parse_double(fields[col[3]]);
        if (!nc || !nt || !g) {
            skip("unparsable field");
            continue;
        }
        if (*nc < 2 || *nt < 2) {
            skip("group size below 2");
            continue;
        }
        if (!std::isfinite(*g)) {
            skip("non-finite effect");
            continue;
        }
        ds.rows.push_back({std::string(fields[col[0]]), *nc, *nt, *g});
    }
    return ds;
}

Dataset read_dataset_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset '" + path + "'");
    }
    return read_dataset(in);
}

}  // namespace euii::data
