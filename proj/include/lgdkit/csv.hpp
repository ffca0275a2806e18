#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/monthly_series.hpp"

namespace lgdkit {
namespace csv_detail {

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

/// Blank, "NA", "." and ".." mark missing values (FRED uses ".").
inline bool is_missing(const std::string& v) {
    return v.empty() || v == "NA" || v == "na" || v == "." || v == "..";
}

}  // namespace csv_detail

/// Reads a two-column date,value CSV into a series named after `name`
/// (typically the file stem). Accepts FRED exports unmodified: a header
/// row is detected and skipped, dates may be YYYY-MM or YYYY-MM-DD, and
/// missing markers drop the month. Malformed rows report file and line.
[[nodiscard]] inline MonthlySeries read_series_csv(const std::string& path,
                                                   const std::string& name) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    MonthlySeries out(name);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv_detail::trim(line).empty()) continue;
        auto fields = csv_detail::split_line(line);
        if (lineno == 1 && !fields.empty() &&
            (fields[0].empty() || !std::isdigit(static_cast<unsigned char>(fields[0][0]))))
            continue;  // header
        auto where = [&] { return path + ":" + std::to_string(lineno); };
        if (fields.size() != 2)
            throw data_error("expected 2 columns at " + where());
        if (csv_detail::is_missing(fields[1])) continue;
        MonthKey key;
        try {
            key = MonthKey::parse(fields[0]);
        } catch (const data_error& e) {
            throw data_error(std::string(e.what()) + " at " + where());
        }
        char* end = nullptr;
        double v = std::strtod(fields[1].c_str(), &end);
        if (end == fields[1].c_str() || *end != '\0')
            throw data_error("bad value '" + fields[1] + "' at " + where());
        try {
            out.insert(key, v);
        } catch (const data_error& e) {
            throw data_error(std::string(e.what()) + " at " + where());
        }
    }
    return out;
}

inline void write_series_csv(const std::string& path, const MonthlySeries& series) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << "date,value\n";
    char buf[64];
    for (const auto& [key, value] : series.observations()) {
        std::snprintf(buf, sizeof buf, "%.17g", value);
        out << key.str() << "," << buf << "\n";
    }
}

/// File stem without directory or extension, the default series name.
[[nodiscard]] inline std::string path_stem(const std::string& path) {
    size_t slash = path.find_last_of("/\\");
    size_t start = slash == std::string::npos ? 0 : slash + 1;
    size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || dot <= start) dot = path.size();
    return path.substr(start, dot - start);
}

}  // namespace lgdkit
