#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/monthly_series.hpp"
#include "lgdkit/normal.hpp"
#include "lgdkit/ols.hpp"

namespace lgdkit {

/// Deterministic terms in the ADF regression.
enum class AdfRegression { constant, constant_and_trend, none };

struct AdfResult {
    double test_statistic = 0.0;
    double p_value = 1.0;
    int lags_used = 0;
    AdfRegression regression_kind = AdfRegression::constant;
    int n_obs = 0;  // rows in the final regression
};

namespace adf_detail {

// MacKinnon (1994, 2010) response-surface coefficients for the single-
// series tau distribution. p = Phi(poly(stat)), with the quadratic fit
// in the left tail (stat <= star) and the cubic elsewhere; outside
// [min, max] the p-value saturates at 0 or 1.
struct TauSurface {
    double star, lo, hi;
    double small_p[3];
    double large_p[4];
};

inline const TauSurface& surface(AdfRegression kind) {
    static const TauSurface none{-1.04, -19.04, std::numeric_limits<double>::infinity(),
                                 {0.6344, 1.2378, 0.032496},
                                 {0.4797, 0.93557, -0.06999, 0.033066}};
    static const TauSurface constant{-1.61, -18.83, 2.74,
                                     {2.1659, 1.4412, 0.038269},
                                     {1.7339, 0.93202, -0.12745, -0.010368}};
    static const TauSurface trend{-2.89, -16.18, 0.7,
                                  {3.2512, 1.6047, 0.049588},
                                  {2.5261, 0.61654, -0.37956, -0.060285}};
    switch (kind) {
        case AdfRegression::none: return none;
        case AdfRegression::constant: return constant;
        case AdfRegression::constant_and_trend: return trend;
    }
    return constant;
}

inline int deterministic_terms(AdfRegression kind) {
    switch (kind) {
        case AdfRegression::none: return 0;
        case AdfRegression::constant: return 1;
        case AdfRegression::constant_and_trend: return 2;
    }
    return 1;
}

// Design for Delta x_t = rho x_{t-1} + sum_j delta_j Delta x_{t-j} + det
// over the last `rows` usable observations. Column 0 is the level lag.
inline void build_design(const std::vector<double>& x, int lags, int rows,
                         AdfRegression kind, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    const int nd = static_cast<int>(x.size()) - 1;  // available differences
    const int k = 1 + lags + deterministic_terms(kind);
    X.resize(rows, k);
    y.resize(rows);
    for (int r = 0; r < rows; ++r) {
        int t = nd - rows + r;  // index into the difference series
        y[r] = x[t + 1] - x[t];
        X(r, 0) = x[t];
        for (int j = 1; j <= lags; ++j) X(r, j) = x[t - j + 1] - x[t - j];
        int c = 1 + lags;
        if (kind != AdfRegression::none) X(r, c++) = 1.0;
        if (kind == AdfRegression::constant_and_trend) X(r, c) = static_cast<double>(t + 1);
    }
}

}  // namespace adf_detail

/// MacKinnon response-surface p-value for an ADF tau statistic.
[[nodiscard]] inline double mackinnon_pvalue(double stat, AdfRegression kind) {
    const auto& s = adf_detail::surface(kind);
    if (stat > s.hi) return 1.0;
    if (stat < s.lo) return 0.0;
    double z;
    if (stat <= s.star)
        z = s.small_p[0] + stat * (s.small_p[1] + stat * s.small_p[2]);
    else
        z = s.large_p[0] + stat * (s.large_p[1] + stat * (s.large_p[2] + stat * s.large_p[3]));
    return norm_cdf(z);
}

/// Schwert's rule-of-thumb lag bound, floor(12 (n/100)^(1/4)).
[[nodiscard]] inline int schwert_lag_bound(int n) {
    return static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
}

/// Augmented Dickey-Fuller test. Lag order is chosen by AIC over
/// 0..max_lags on a common sample (Schwert bound when unset), then the
/// statistic comes from a refit on all rows usable at the chosen lag.
[[nodiscard]] inline AdfResult adf_test(const std::vector<double>& data, AdfRegression kind,
                                        std::optional<int> max_lags = std::nullopt) {
    const int n = static_cast<int>(data.size());
    if (n < 4) throw data_error("ADF: too few observations");
    bool constant = true;
    for (int i = 1; i < n; ++i)
        if (data[i] != data[0]) {
            constant = false;
            break;
        }
    if (constant) throw data_error("ADF: series is constant");

    const int ntrend = adf_detail::deterministic_terms(kind);
    int maxlag = max_lags.value_or(schwert_lag_bound(n));
    maxlag = std::min(maxlag, (n - 1) / 2 - ntrend - 1);
    maxlag = std::max(maxlag, 0);

    const int common_rows = (n - 1) - maxlag;
    if (common_rows < 15)
        throw data_error("ADF: needs >= 15 usable observations after lag construction, have " +
                         std::to_string(common_rows));

    int best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    for (int p = 0; p <= maxlag; ++p) {
        adf_detail::build_design(data, p, common_rows, kind, X, y);
        if (common_rows <= X.cols()) break;
        double aic;
        try {
            aic = ols(X, y).aic();
        } catch (const numeric_error&) {
            continue;  // collinear candidate, skip
        }
        if (aic < best_aic) {
            best_aic = aic;
            best_lag = p;
        }
    }

    const int rows = (n - 1) - best_lag;
    adf_detail::build_design(data, best_lag, rows, kind, X, y);
    auto fit = ols(X, y);
    AdfResult res;
    res.test_statistic = fit.t_value(0);
    res.p_value = mackinnon_pvalue(res.test_statistic, kind);
    res.lags_used = best_lag;
    res.regression_kind = kind;
    res.n_obs = rows;
    return res;
}

/// Series overload: runs on the longest run of consecutive months.
[[nodiscard]] inline AdfResult adf_test(const MonthlySeries& series, AdfRegression kind,
                                        std::optional<int> max_lags = std::nullopt) {
    std::vector<double> best, cur;
    std::optional<MonthKey> prev;
    for (const auto& [key, value] : series.observations()) {
        if (prev && key.index() != prev->index() + 1) {
            if (cur.size() > best.size()) best = cur;
            cur.clear();
        }
        cur.push_back(value);
        prev = key;
    }
    if (cur.size() > best.size()) best = cur;
    return adf_test(best, kind, max_lags);
}

}  // namespace lgdkit
