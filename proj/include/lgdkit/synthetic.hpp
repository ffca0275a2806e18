#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/lgd.hpp"
#include "lgdkit/monthly_series.hpp"
#include "lgdkit/rng.hpp"

namespace lgdkit {

/// One macro driver of the generated loss index.
struct MevLoading {
    std::string series_name;
    TransformSpec transform;
    double coefficient = 0.0;

    [[nodiscard]] std::string column_name() const {
        return series_name + "." + transform.label();
    }
};

/// Extra loan-level covariate drawn i.i.d. normal.
struct CovariateSpec {
    std::string name;
    double mean = 0.0;
    double sd = 1.0;
    double coefficient = 0.0;
};

/// Settings for the synthetic portfolio generator. The raw LGD of loan i
/// is intercept + sum(mev loadings at the default month) + sum(covariate
/// loadings) + N(0, noise_sigma^2); balance, values and workout cost are
/// then back-solved so the workout accounting reproduces that LGD with
/// B_s = B_d.
struct GeneratorConfig {
    int n_loans = 1000;
    std::map<int, double> year_weights;  // default-year distribution
    double intercept = 0.1;
    double noise_sigma = 0.25;
    std::vector<MevLoading> mev_loadings;
    std::vector<CovariateSpec> covariates;
    double ltv_mean = 0.7;
    double ltv_sd = 0.1;              // truncated to [0.05, 1.5]
    double ltv_coefficient = 0.0;     // optional loading on LTV_d
    double workout_ratio_mean = 0.05;
    double workout_ratio_sd = 0.02;   // truncated at 0
    double balance_log_mean = 14.7;   // exp ~ 2.4e6
    double balance_log_sd = 0.5;
    int resolution_min_months = 6;
    int resolution_max_months = 36;
    int appraisal_jitter_months = 3;

    void validate() const {
        if (n_loans < 1) throw config_error("generator: n_loans must be positive");
        if (year_weights.empty()) throw config_error("generator: year_weights required");
        if (noise_sigma < 0.0) throw config_error("generator: noise_sigma must be >= 0");
        if (resolution_min_months < 0 || resolution_max_months > 120 ||
            resolution_min_months > resolution_max_months)
            throw config_error("generator: resolution range must sit inside 0..120");
        for (const auto& l : mev_loadings)
            if (!std::isfinite(l.coefficient))
                throw config_error("generator: non-finite loading for " + l.column_name());
    }
};

/// Deterministic synthetic portfolio: every loan draws from its own
/// derived RNG stream, so the output is independent of evaluation order
/// and byte-stable for a fixed (config, seed).
[[nodiscard]] inline std::vector<LoanDefaultRecord> generate_synthetic_portfolio(
    const GeneratorConfig& config, const std::vector<MonthlySeries>& mev_panel,
    std::uint64_t seed) {
    config.validate();

    // transform each referenced series once
    std::vector<MonthlySeries> drivers;
    for (const auto& loading : config.mev_loadings) {
        const MonthlySeries* src = nullptr;
        for (const auto& s : mev_panel)
            if (s.name() == loading.series_name) src = &s;
        if (!src)
            throw config_error("generator: series '" + loading.series_name +
                               "' not in MEV panel");
        drivers.push_back(apply_transform(*src, loading.transform));
    }

    std::vector<int> years;
    std::vector<double> weights;
    for (const auto& [y, w] : config.year_weights) {
        if (w < 0.0) throw config_error("generator: negative year weight");
        years.push_back(y);
        weights.push_back(w);
    }

    std::vector<LoanDefaultRecord> out;
    out.reserve(config.n_loans);
    std::vector<std::string> missing;
    for (int i = 0; i < config.n_loans; ++i) {
        Rng rng = Rng::for_chunk(seed, static_cast<std::uint64_t>(i));
        LoanDefaultRecord r;
        char id[16];
        std::snprintf(id, sizeof id, "L%06d", i + 1);
        r.loan_id = id;
        int year = years[rng.categorical(weights)];
        int month = static_cast<int>(rng.uniform_int(12)) + 1;
        r.default_month = {year, month};
        int span = config.resolution_max_months - config.resolution_min_months + 1;
        r.sale_month = r.default_month.plus_months(
            config.resolution_min_months + static_cast<int>(rng.uniform_int(span)));

        double ltv = std::clamp(rng.normal(config.ltv_mean, config.ltv_sd), 0.05, 1.5);
        r.covariates["LTV_d"] = ltv;
        double index = config.intercept + config.ltv_coefficient * ltv;
        for (const auto& cov : config.covariates) {
            double v = rng.normal(cov.mean, cov.sd);
            r.covariates[cov.name] = v;
            index += cov.coefficient * v;
        }
        bool gap = false;
        for (size_t k = 0; k < drivers.size(); ++k) {
            auto v = drivers[k].at(r.default_month);
            if (!v) {
                missing.push_back(config.mev_loadings[k].column_name() + "@" +
                                  r.default_month.str());
                gap = true;
                continue;
            }
            index += config.mev_loadings[k].coefficient * *v;
        }
        if (gap) continue;
        double lgd = index + (config.noise_sigma > 0.0
                                  ? rng.normal(0.0, config.noise_sigma)
                                  : 0.0);

        // back-solve components consistent with the workout accounting
        r.balance_at_default =
            std::exp(rng.normal(config.balance_log_mean, config.balance_log_sd));
        r.balance_at_sale = r.balance_at_default;
        r.value_at_default = r.balance_at_default / ltv;
        double w = std::max(0.0, rng.normal(config.workout_ratio_mean,
                                            config.workout_ratio_sd));
        if (lgd > 1.0 + w) w = lgd - 1.0;  // keep V_s >= 0
        r.workout_cost = w * r.balance_at_default;
        r.value_at_sale = r.balance_at_default * (1.0 + w - lgd);
        r.appraisal_month = r.default_month.plus_months(
            -static_cast<int>(rng.uniform_int(config.appraisal_jitter_months + 1)));
        r.validate();
        out.push_back(std::move(r));
    }
    if (!missing.empty()) {
        std::string msg = "generator: MEV panel gaps at";
        int shown = 0;
        for (const auto& m : missing) {
            msg += " " + m;
            if (++shown == 8) break;
        }
        if (missing.size() > 8) msg += " (+" + std::to_string(missing.size() - 8) + " more)";
        throw data_error(msg);
    }
    return out;
}

}  // namespace lgdkit
