#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/month_key.hpp"

namespace lgdkit {

/// Kind of monthly transformation. DIFF/RDIFF/LDIFF take a horizon in
/// months: x_t - x_{t-k}, x_t/x_{t-k} - 1 and log(x_t/x_{t-k}).
enum class TransformKind { RAW, DIFF, RDIFF, LDIFF };

struct TransformSpec {
    TransformKind kind = TransformKind::RAW;
    int horizon_k = 1;

    /// "RAW", "DIFF12M", "RDIFF6M", ... — the naming the screening
    /// reports use.
    [[nodiscard]] std::string label() const {
        switch (kind) {
            case TransformKind::RAW: return "RAW";
            case TransformKind::DIFF: return "DIFF" + std::to_string(horizon_k) + "M";
            case TransformKind::RDIFF: return "RDIFF" + std::to_string(horizon_k) + "M";
            case TransformKind::LDIFF: return "LDIFF" + std::to_string(horizon_k) + "M";
        }
        return "?";
    }

    /// Parses "RAW" / "DIFFkM" / "RDIFFkM" / "LDIFFkM".
    [[nodiscard]] static TransformSpec parse(const std::string& text) {
        auto tail_k = [&](size_t prefix_len) {
            if (text.size() < prefix_len + 2 || text.back() != 'M')
                throw config_error("invalid transform '" + text + "'");
            int k = 0;
            for (size_t i = prefix_len; i + 1 < text.size(); ++i) {
                if (text[i] < '0' || text[i] > '9')
                    throw config_error("invalid transform '" + text + "'");
                k = k * 10 + (text[i] - '0');
            }
            return k;
        };
        if (text == "RAW") return {TransformKind::RAW, 1};
        if (text.rfind("RDIFF", 0) == 0) return {TransformKind::RDIFF, tail_k(5)};
        if (text.rfind("LDIFF", 0) == 0) return {TransformKind::LDIFF, tail_k(5)};
        if (text.rfind("DIFF", 0) == 0) return {TransformKind::DIFF, tail_k(4)};
        throw config_error("invalid transform '" + text + "'");
    }

    void validate() const {
        if (kind != TransformKind::RAW && horizon_k < 1)
            throw config_error("transform horizon must be >= 1, got " +
                               std::to_string(horizon_k));
    }
};

/// Calendar-indexed monthly real series. Missing months are simply
/// absent keys; at most one value per month. Immutable in spirit: all
/// operations return new series.
class MonthlySeries {
  public:
    MonthlySeries() = default;
    explicit MonthlySeries(std::string name) : name_(std::move(name)) {}
    MonthlySeries(std::string name, std::map<MonthKey, double> obs)
        : name_(std::move(name)), obs_(std::move(obs)) {}

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::map<MonthKey, double>& observations() const { return obs_; }
    [[nodiscard]] size_t size() const { return obs_.size(); }
    [[nodiscard]] bool empty() const { return obs_.empty(); }

    [[nodiscard]] std::optional<double> at(MonthKey k) const {
        auto it = obs_.find(k);
        if (it == obs_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] MonthKey first_key() const {
        if (obs_.empty()) throw data_error("empty series '" + name_ + "'");
        return obs_.begin()->first;
    }
    [[nodiscard]] MonthKey last_key() const {
        if (obs_.empty()) throw data_error("empty series '" + name_ + "'");
        return obs_.rbegin()->first;
    }

    /// Months absent between first and last key.
    [[nodiscard]] int missing_months() const {
        if (obs_.empty()) return 0;
        int span = last_key().index() - first_key().index() + 1;
        return span - static_cast<int>(obs_.size());
    }

    void insert(MonthKey k, double v) {
        if (!obs_.emplace(k, v).second)
            throw data_error("duplicate observation at " + k.str() + " in '" + name_ + "'");
    }

    void rename(std::string name) { name_ = std::move(name); }

  private:
    std::string name_;
    std::map<MonthKey, double> obs_;
};

/// Applies a transformation. Output months are a subset of input months;
/// a month is absent whenever any required input is absent, and RDIFF /
/// LDIFF rows with a non-positive base (or non-positive ratio under
/// LDIFF) become missing rather than errors.
[[nodiscard]] inline MonthlySeries apply_transform(const MonthlySeries& series,
                                                   const TransformSpec& spec) {
    spec.validate();
    if (spec.kind == TransformKind::RAW) return series;
    MonthlySeries out(series.name() + "." + spec.label());
    const int k = spec.horizon_k;
    for (const auto& [key, value] : series.observations()) {
        auto base = series.at(key.plus_months(-k));
        if (!base) continue;
        switch (spec.kind) {
            case TransformKind::DIFF:
                out.insert(key, value - *base);
                break;
            case TransformKind::RDIFF:
                if (*base > 0.0) out.insert(key, value / *base - 1.0);
                break;
            case TransformKind::LDIFF:
                if (*base > 0.0 && value > 0.0) out.insert(key, std::log(value / *base));
                break;
            case TransformKind::RAW:
                break;
        }
    }
    return out;
}

/// Moves the value at month t to month t - months, so aligning the
/// shifted series with an unshifted one at t pairs x_t with y_{t+months}.
/// Negative months lag instead.
[[nodiscard]] inline MonthlySeries shift_forward(const MonthlySeries& series, int months) {
    MonthlySeries out(series.name());
    for (const auto& [key, value] : series.observations())
        out.insert(key.plus_months(-months), value);
    return out;
}

/// Chronological (a, b) pairs over the months where both have values.
[[nodiscard]] inline std::vector<std::pair<double, double>> align(const MonthlySeries& a,
                                                                  const MonthlySeries& b) {
    std::vector<std::pair<double, double>> pairs;
    const auto& bo = b.observations();
    auto it = bo.begin();
    for (const auto& [key, value] : a.observations()) {
        while (it != bo.end() && it->first < key) ++it;
        if (it == bo.end()) break;
        if (it->first == key) pairs.emplace_back(value, it->second);
    }
    return pairs;
}

/// Restricts to start <= key <= end (inclusive).
[[nodiscard]] inline MonthlySeries window(const MonthlySeries& series, MonthKey start,
                                          MonthKey end) {
    if (start > end)
        throw config_error("invalid window " + start.str() + ".." + end.str());
    MonthlySeries out(series.name());
    auto lo = series.observations().lower_bound(start);
    auto hi = series.observations().upper_bound(end);
    for (auto it = lo; it != hi; ++it) out.insert(it->first, it->second);
    return out;
}

[[nodiscard]] inline MonthlySeries window(const MonthlySeries& series, const MonthWindow& w) {
    return window(series, w.start, w.end);
}

}  // namespace lgdkit
