#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dimest/errors.hpp"
#include "dimest/point_cloud.hpp"

namespace dimest {

struct CsvOptions {
    bool skip_header = false;
};

/// Reads one point per line, comma-separated decimal floats. Blank lines
/// are ignored; every data line must have the same column count.
inline PointCloud read_point_cloud(std::istream& in, const Metric& metric, CsvOptions opt = {}) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t cols = 0;
    std::vector<double> coords;
    if (opt.skip_header) {
        if (!std::getline(in, line)) throw ParseError("empty input: no header line", 1);
        ++lineno;
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t count = 0;
        std::string_view rest(line);
        for (;;) {
            const std::size_t comma = rest.find(',');
            std::string_view field = rest.substr(0, comma);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
            if (!field.empty() && field.front() == '+') field.remove_prefix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
                throw ParseError("invalid number '" + std::string(field) + "' in column " + std::to_string(count + 1),
                                 lineno);
            if (!std::isfinite(v)) throw ParseError("non-finite value in column " + std::to_string(count + 1), lineno);
            coords.push_back(v);
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cols == 0) {
            cols = count;
        } else if (count != cols) {
            throw ParseError("expected " + std::to_string(cols) + " columns, found " + std::to_string(count), lineno);
        }
    }
    if (cols == 0) throw ParseError("empty input: no points", lineno == 0 ? 1 : lineno);
    if (!metric.is_euclidean() && metric.periods().size() != cols) {
        const double p = metric.uniform_period();
        return PointCloud(cols, std::move(coords), Metric::flat_torus(cols, p));
    }
    return PointCloud(cols, std::move(coords), metric);
}

inline PointCloud read_point_cloud_file(const std::string& path, const Metric& metric, CsvOptions opt = {}) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    return read_point_cloud(f, metric, opt);
}

/// Writes with 17 significant digits so reading back is bit-exact.
inline void write_point_cloud(std::ostream& out, const PointCloud& X) {
    char buf[32];
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto p = X.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", p[k]);
            if (k) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace dimest
