#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/monthly_series.hpp"

namespace lgdkit {

using PairedSample = std::vector<std::pair<double, double>>;

/// Pearson product-moment correlation; empty when n < 2 or either
/// marginal is constant (undefined is a value here, not an error).
[[nodiscard]] inline std::optional<double> pearson(const PairedSample& sample) {
    const size_t n = sample.size();
    if (n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : sample) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [x, y] : sample) {
        double dx = x - mx, dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

/// One screening cell: corr(Tx(x)_t, Ty(y)_{t+lead}) over t in window.
struct CorrelationReport {
    std::string series_x_name;
    std::string series_y_name;
    TransformSpec transform_x;
    TransformSpec transform_y;
    int lead_months = 0;
    MonthWindow window{{0, 1}, {0, 1}};
    int n_pairs = 0;
    std::optional<double> pearson_r;
    // Filled by the screening pipeline when stationarity checks run.
    std::optional<double> adf_p_x;
    std::optional<double> adf_p_y;
};

/// Transforms both series, shifts y forward by lead_months, windows the
/// pairing month t, aligns and correlates. The window always indexes t,
/// the month of the x observation.
[[nodiscard]] inline CorrelationReport screen(const MonthlySeries& x, const MonthlySeries& y,
                                              const TransformSpec& tx, const TransformSpec& ty,
                                              int lead_months, const MonthWindow& win) {
    auto xt = window(apply_transform(x, tx), win);
    auto yt = window(shift_forward(apply_transform(y, ty), lead_months), win);
    auto pairs = align(xt, yt);
    CorrelationReport rep;
    rep.series_x_name = x.name();
    rep.series_y_name = y.name();
    rep.transform_x = tx;
    rep.transform_y = ty;
    rep.lead_months = lead_months;
    rep.window = win;
    rep.n_pairs = static_cast<int>(pairs.size());
    rep.pearson_r = pearson(pairs);
    return rep;
}

/// Strictly increasing edges defining left-open/right-closed buckets
/// (-inf, e1], (e1, e2], ..., (ek, +inf) — a partition of the line.
struct BucketSpec {
    std::vector<double> edges;

    void validate() const {
        for (size_t i = 1; i < edges.size(); ++i)
            if (!(edges[i - 1] < edges[i]))
                throw config_error("bucket edges must be strictly increasing");
    }

    [[nodiscard]] size_t bucket_count() const { return edges.size() + 1; }

    [[nodiscard]] size_t bucket_of(double v) const {
        size_t i = 0;
        while (i < edges.size() && v > edges[i]) ++i;
        return i;
    }

    /// "(0.02, 0.04]"-style label for bucket i.
    [[nodiscard]] std::string label(size_t i) const {
        auto fmt = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return std::string(buf);
        };
        if (edges.empty()) return "(-inf, +inf)";
        if (i == 0) return "(-inf, " + fmt(edges[0]) + "]";
        if (i == edges.size()) return "(" + fmt(edges.back()) + ", +inf)";
        return "(" + fmt(edges[i - 1]) + ", " + fmt(edges[i]) + "]";
    }
};

struct BucketedReport {
    size_t bucket_index = 0;
    std::string bucket_label;
    int month_count = 0;
    CorrelationReport report;
};

/// Same pipeline as screen(), partitioned by the bucket of the x value
/// at the pairing month. Bucket counts sum to the unbucketed n_pairs;
/// undefined correlations are reported with their counts.
[[nodiscard]] inline std::vector<BucketedReport> screen_bucketed(
    const MonthlySeries& x, const MonthlySeries& y, const TransformSpec& tx,
    const TransformSpec& ty, int lead_months, const MonthWindow& win,
    const BucketSpec& buckets) {
    buckets.validate();
    auto xt = window(apply_transform(x, tx), win);
    auto yt = window(shift_forward(apply_transform(y, ty), lead_months), win);
    auto pairs = align(xt, yt);
    std::vector<PairedSample> parts(buckets.bucket_count());
    for (const auto& p : pairs) parts[buckets.bucket_of(p.first)].push_back(p);
    std::vector<BucketedReport> out;
    for (size_t i = 0; i < parts.size(); ++i) {
        BucketedReport br;
        br.bucket_index = i;
        br.bucket_label = buckets.label(i);
        br.month_count = static_cast<int>(parts[i].size());
        br.report.series_x_name = x.name();
        br.report.series_y_name = y.name();
        br.report.transform_x = tx;
        br.report.transform_y = ty;
        br.report.lead_months = lead_months;
        br.report.window = win;
        br.report.n_pairs = br.month_count;
        br.report.pearson_r = pearson(parts[i]);
        out.push_back(std::move(br));
    }
    return out;
}

/// Exact Fisher identity (1 + i) = (1 + r)(1 + pi).
[[nodiscard]] inline double fisher_nominal(double real_rate, double expected_inflation) {
    if (real_rate <= -1.0 || expected_inflation <= -1.0)
        throw domain_error("fisher_nominal arguments must exceed -1");
    return (1.0 + real_rate) * (1.0 + expected_inflation) - 1.0;
}

/// Pairwise correlations between several transforms of one series,
/// computed over the months where every listed transform has a value
/// (optionally restricted to a window). Undefined entries are NaN.
[[nodiscard]] inline std::vector<std::vector<double>> transform_correlation_matrix(
    const MonthlySeries& series, const std::vector<TransformSpec>& specs,
    const std::optional<MonthWindow>& win = std::nullopt) {
    if (specs.size() < 2) throw config_error("transform matrix needs at least 2 specs");
    std::vector<MonthlySeries> transformed;
    transformed.reserve(specs.size());
    for (const auto& spec : specs) {
        auto t = apply_transform(series, spec);
        transformed.push_back(win ? window(t, *win) : t);
    }
    std::set<MonthKey> common;
    bool first = true;
    for (const auto& t : transformed) {
        std::set<MonthKey> keys;
        for (const auto& [k, v] : t.observations()) keys.insert(k);
        if (first) {
            common = std::move(keys);
            first = false;
        } else {
            std::set<MonthKey> inter;
            for (const auto& k : common)
                if (keys.count(k)) inter.insert(k);
            common = std::move(inter);
        }
    }
    std::vector<std::vector<double>> cols(specs.size());
    for (size_t j = 0; j < specs.size(); ++j)
        for (const auto& k : common) cols[j].push_back(*transformed[j].at(k));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> mat(specs.size(), std::vector<double>(specs.size(), 1.0));
    for (size_t i = 0; i < specs.size(); ++i) {
        for (size_t j = i + 1; j < specs.size(); ++j) {
            PairedSample s;
            for (size_t t = 0; t < cols[i].size(); ++t) s.emplace_back(cols[i][t], cols[j][t]);
            auto r = pearson(s);
            mat[i][j] = mat[j][i] = r ? *r : nan;
        }
    }
    return mat;
}

}  // namespace lgdkit
