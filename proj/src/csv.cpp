#include "fepool/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "fepool/error.hpp"

namespace fepool {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trimmed(cell);
    if (t.empty()) return false;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const std::string& path) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trimmed(header[i]) == name) return i;
    }
    throw DataError("MissingColumn: '" + name + "' not found in " + path);
}

} // namespace

std::vector<LoadResult> load_series_file(const std::string& path, const std::string& column,
                                         const std::string& id_column, bool skip_bad_rows) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("MissingFile: cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("EmptySeries: " + path + " has no header row");
    }
    const auto header = split_csv_line(line);
    const std::size_t value_idx = find_column(header, column, path);
    const bool long_format = !id_column.empty();
    const std::size_t id_idx = long_format ? find_column(header, id_column, path) : 0;

    std::vector<LoadResult> out;
    std::vector<std::string> order; // ids in order of first appearance
    auto result_for = [&](const std::string& id) -> LoadResult& {
        auto it = std::find(order.begin(), order.end(), id);
        if (it == order.end()) {
            order.push_back(id);
            out.push_back(LoadResult{});
            out.back().series.id = id;
            return out.back();
        }
        return out[static_cast<std::size_t>(it - order.begin())];
    };

    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (value_idx >= cells.size()) {
            throw DataError("ShortRow: row " + std::to_string(row) + " in " + path);
        }
        const std::string id = long_format ? trimmed(cells[id_idx]) : "series";
        LoadResult& res = result_for(id);
        double v = 0.0;
        if (!parse_double(cells[value_idx], v)) {
            if (skip_bad_rows) {
                ++res.skipped_rows;
                continue;
            }
            throw DataError("NonNumeric: row " + std::to_string(row) + ", column '" + column +
                            "' in " + path);
        }
        res.series.values.push_back(v);
    }

    if (out.empty()) {
        throw DataError("EmptySeries: no data rows in " + path);
    }
    for (auto& r : out) {
        if (r.series.values.empty()) {
            throw DataError("EmptySeries: series '" + r.series.id + "' in " + path);
        }
        r.series.validate();
    }
    return out;
}

LoadResult load_series(const std::string& path, const std::string& column, bool skip_bad_rows) {
    auto all = load_series_file(path, column, "", skip_bad_rows);
    return std::move(all.front());
}

} // namespace fepool
