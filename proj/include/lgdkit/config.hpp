#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lgdkit/csv.hpp"  // trim helper
#include "lgdkit/errors.hpp"
#include "lgdkit/month_key.hpp"

namespace lgdkit {

/// Flat key = value run configuration with dotted section prefixes
/// ("screen.leads = 0,12"). '#' starts a comment; keys are unique.
class RunConfig {
  public:
    RunConfig() = default;

    [[nodiscard]] static RunConfig from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw config_error("cannot open config '" + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        RunConfig cfg;
        cfg.raw_ = buffer.str();
        cfg.path_ = path;
        cfg.parse();
        return cfg;
    }

    [[nodiscard]] static RunConfig from_string(const std::string& text) {
        RunConfig cfg;
        cfg.raw_ = text;
        cfg.path_ = "<inline>";
        cfg.parse();
        return cfg;
    }

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }

    [[nodiscard]] std::string require(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw config_error("config: missing key '" + key + "' in " + path_);
        return it->second;
    }

    [[nodiscard]] std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    [[nodiscard]] std::optional<std::string> maybe(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] double get_double(const std::string& key) const {
        return parse_double(key, require(key));
    }
    [[nodiscard]] double get_double(const std::string& key, double fallback) const {
        auto v = maybe(key);
        return v ? parse_double(key, *v) : fallback;
    }

    [[nodiscard]] long get_int(const std::string& key) const {
        return parse_int(key, require(key));
    }
    [[nodiscard]] long get_int(const std::string& key, long fallback) const {
        auto v = maybe(key);
        return v ? parse_int(key, *v) : fallback;
    }

    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const {
        auto v = maybe(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw config_error("config: bad boolean '" + *v + "' for " + key);
    }

    /// Comma-separated list, items trimmed, empties dropped.
    [[nodiscard]] std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        auto v = maybe(key);
        if (!v) return out;
        std::string cur;
        for (char c : *v) {
            if (c == ',') {
                auto item = csv_detail::trim(cur);
                if (!item.empty()) out.push_back(item);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        auto item = csv_detail::trim(cur);
        if (!item.empty()) out.push_back(item);
        return out;
    }

    /// Keys under a prefix, e.g. prefix "fit.formula." yields the model
    /// names of every "fit.formula.<name>" entry, in file order.
    [[nodiscard]] std::vector<std::string> keys_under(const std::string& prefix) const {
        std::vector<std::string> out;
        for (const auto& key : order_)
            if (key.rfind(prefix, 0) == 0) out.push_back(key.substr(prefix.size()));
        return out;
    }

    /// "1983-03..2022-12" inclusive window.
    [[nodiscard]] static MonthWindow parse_window(const std::string& text) {
        auto sep = text.find("..");
        if (sep == std::string::npos)
            throw config_error("config: bad window '" + text + "' (expected A..B)");
        MonthWindow w{MonthKey::parse(csv_detail::trim(text.substr(0, sep))),
                      MonthKey::parse(csv_detail::trim(text.substr(sep + 2)))};
        if (w.end < w.start) throw config_error("config: window '" + text + "' is reversed");
        return w;
    }

    /// FNV-1a of the raw config bytes, reported in every output file.
    [[nodiscard]] std::string hash_hex() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : raw_) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    [[nodiscard]] const std::string& path() const { return path_; }

  private:
    void parse() {
        std::istringstream in(raw_);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto hash_pos = line.find('#');
            if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
            line = csv_detail::trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error("config: expected key = value at " + path_ + ":" +
                                   std::to_string(lineno));
            std::string key = csv_detail::trim(line.substr(0, eq));
            std::string value = csv_detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw config_error("config: empty key at " + path_ + ":" +
                                   std::to_string(lineno));
            if (!values_.emplace(key, value).second)
                throw config_error("config: duplicate key '" + key + "' at " + path_ + ":" +
                                   std::to_string(lineno));
            order_.push_back(key);
        }
    }

    [[nodiscard]] double parse_double(const std::string& key, const std::string& v) const {
        char* end = nullptr;
        double out = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw config_error("config: bad number '" + v + "' for " + key);
        return out;
    }

    [[nodiscard]] long parse_int(const std::string& key, const std::string& v) const {
        char* end = nullptr;
        long out = std::strtol(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0')
            throw config_error("config: bad integer '" + v + "' for " + key);
        return out;
    }

    std::string raw_;
    std::string path_;
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

}  // namespace lgdkit
