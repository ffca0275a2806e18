#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgdkit/adf.hpp"
#include "lgdkit/errors.hpp"
#include "lgdkit/mars.hpp"
#include "lgdkit/normal.hpp"
#include "lgdkit/stats.hpp"
#include "lgdkit/tobit.hpp"
#include "lgdkit/validation.hpp"
#include "lgdkit/version.hpp"

namespace lgdkit {

using ordered_json = nlohmann::ordered_json;

/// Stamp carried by every report: producing command, config hash, seed
/// and toolkit version. Reports carry no timestamps, so fixed-seed runs
/// are byte-identical.
struct ReportMeta {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;

    [[nodiscard]] ordered_json json() const {
        return ordered_json{{"command", command},
                            {"config", config_hash},
                            {"seed", seed},
                            {"version", kVersion}};
    }

    [[nodiscard]] std::string csv_banner() const {
        return "# lgdkit " + command + " config=" + config_hash +
               " seed=" + std::to_string(seed) + " version=" + kVersion;
    }
};

namespace report_detail {

inline std::string fmt(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string opt_fmt(const std::optional<double>& v) {
    return v ? fmt(*v) : "";
}

}  // namespace report_detail

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << content;
}

inline void write_json_file(const std::string& path, const ordered_json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

// ------------------------------------------------------------- screening

struct ScreenRow {
    CorrelationReport report;
    std::string bucket;  // empty for the unbucketed row
    int month_count = 0;
};

inline std::string screening_csv(const std::vector<ScreenRow>& rows, const ReportMeta& meta) {
    std::string out = meta.csv_banner() + "\n";
    out +=
        "x_name,x_transform,y_name,y_transform,lead_months,window_start,window_end,"
        "n_pairs,pearson_r,adf_p_x,adf_p_y,bucket\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out += r.series_x_name + "," + r.transform_x.label() + "," + r.series_y_name + "," +
               r.transform_y.label() + "," + std::to_string(r.lead_months) + "," +
               r.window.start.str() + "," + r.window.end.str() + "," +
               std::to_string(r.n_pairs) + "," + report_detail::opt_fmt(r.pearson_r) + "," +
               report_detail::opt_fmt(r.adf_p_x) + "," + report_detail::opt_fmt(r.adf_p_y) +
               "," + row.bucket + "\n";
    }
    return out;
}

// ------------------------------------------------------------------- adf

inline ordered_json adf_json(const std::string& series_label, const AdfResult& r) {
    const char* kind = r.regression_kind == AdfRegression::constant ? "constant"
                       : r.regression_kind == AdfRegression::constant_and_trend
                           ? "constant_and_trend"
                           : "none";
    return ordered_json{{"series", series_label},   {"test_statistic", r.test_statistic},
                        {"p_value", r.p_value},     {"lags_used", r.lags_used},
                        {"regression_kind", kind},  {"n_obs", r.n_obs}};
}

// ------------------------------------------------------------- tobit fit

/// Coefficient table mirroring the usual published layout: estimate,
/// standard error, z value and two-sided normal p.
inline ordered_json fit_report_json(const TobitFit& fit, const ReportMeta& meta) {
    ordered_json coef = ordered_json::array();
    for (Eigen::Index j = 0; j < fit.beta.size(); ++j) {
        double se = fit.std_errors[j];
        double z = se > 0.0 ? fit.beta[j] / se : std::numeric_limits<double>::quiet_NaN();
        double p = se > 0.0 ? std::erfc(std::abs(z) / kSqrt2)
                            : std::numeric_limits<double>::quiet_NaN();
        coef.push_back(ordered_json{{"name", fit.column_names[j]},
                                    {"estimate", fit.beta[j]},
                                    {"std_error", se},
                                    {"z_value", z},
                                    {"p_value", p}});
    }
    return ordered_json{{"meta", meta.json()},
                        {"model", fit.model_name},
                        {"coefficients", coef},
                        {"sigma", fit.sigma},
                        {"sigma_std_error", fit.std_errors[fit.beta.size()]},
                        {"log_likelihood", fit.log_likelihood},
                        {"bic", fit.bic},
                        {"n_obs", fit.n_obs},
                        {"n_censored", fit.n_censored},
                        {"converged", fit.converged},
                        {"iterations", fit.iterations}};
}

/// Rebuilds the model surface needed for scoring from a fit report.
[[nodiscard]] inline TobitFit fit_from_report_json(const ordered_json& doc) {
    TobitFit fit;
    fit.model_name = doc.value("model", "");
    const auto& coef = doc.at("coefficients");
    fit.beta.resize(static_cast<Eigen::Index>(coef.size()));
    fit.std_errors.resize(static_cast<Eigen::Index>(coef.size()) + 1);
    Eigen::Index j = 0;
    for (const auto& c : coef) {
        fit.column_names.push_back(c.at("name").get<std::string>());
        fit.beta[j] = c.at("estimate").get<double>();
        fit.std_errors[j] = c.value("std_error", 0.0);
        ++j;
    }
    fit.sigma = doc.at("sigma").get<double>();
    fit.std_errors[j] = doc.value("sigma_std_error", 0.0);
    fit.log_likelihood = doc.value("log_likelihood", 0.0);
    fit.bic = doc.value("bic", 0.0);
    fit.n_obs = doc.value("n_obs", 0);
    fit.n_censored = doc.value("n_censored", 0);
    fit.converged = doc.value("converged", false);
    fit.iterations = doc.value("iterations", 0);
    return fit;
}

// ------------------------------------------------------------------ mars

inline ordered_json mars_model_json(const MarsModel& model, const ReportMeta& meta) {
    ordered_json terms = ordered_json::array();
    for (int j = 0; j < model.n_terms(); ++j)
        terms.push_back(ordered_json{{"index", j + 1},
                                     {"term", model.basis[j].formula(model.variable_names)},
                                     {"coefficient", model.coefficients[j]}});
    return ordered_json{{"meta", meta.json()},
                        {"terms", terms},
                        {"gcv", model.gcv},
                        {"rss", model.rss},
                        {"n_train", model.n_train},
                        {"max_degree", model.max_degree},
                        {"penalty_d", model.penalty_d}};
}

// ------------------------------------------------------------- stability

inline std::string stability_csv(const StabilityReport& report, const ReportMeta& meta) {
    std::string out = meta.csv_banner() + "\n";
    out += "fold,held_out,degenerate,column,refit_estimate,full_estimate,full_std_error,"
           "flagged\n";
    const auto& full = report.full_sample_fit;
    for (const auto& fold : report.per_fold) {
        if (fold.degenerate) {
            out += std::to_string(fold.fold_label) + "," +
                   std::to_string(fold.held_out_size) + ",true,,,,,\n";
            continue;
        }
        for (size_t j = 0; j < full.column_names.size(); ++j) {
            bool flagged = false;
            for (const auto& f : report.flags)
                flagged |= f.fold_label == fold.fold_label &&
                           f.column == full.column_names[j];
            out += std::to_string(fold.fold_label) + "," +
                   std::to_string(fold.held_out_size) + ",false," + full.column_names[j] +
                   "," + report_detail::fmt(fold.fit.beta[static_cast<Eigen::Index>(j)]) +
                   "," + report_detail::fmt(full.beta[static_cast<Eigen::Index>(j)]) + "," +
                   report_detail::fmt(full.std_errors[static_cast<Eigen::Index>(j)]) + "," +
                   (flagged ? "true" : "false") + "\n";
        }
    }
    return out;
}

inline ordered_json stability_json(const StabilityReport& report, const ReportMeta& meta) {
    ordered_json folds = ordered_json::array();
    for (const auto& fold : report.per_fold) {
        ordered_json pf{{"fold", fold.fold_label},
                        {"held_out", fold.held_out_size},
                        {"degenerate", fold.degenerate}};
        if (fold.degenerate) {
            pf["note"] = fold.note;
        } else {
            ordered_json est = ordered_json::object();
            for (size_t j = 0; j < report.full_sample_fit.column_names.size(); ++j)
                est[report.full_sample_fit.column_names[j]] =
                    fold.fit.beta[static_cast<Eigen::Index>(j)];
            pf["estimates"] = est;
        }
        folds.push_back(pf);
    }
    ordered_json flags = ordered_json::array();
    for (const auto& f : report.flags)
        flags.push_back(ordered_json{{"fold", f.fold_label},
                                     {"column", f.column},
                                     {"refit_estimate", f.refit_estimate},
                                     {"full_estimate", f.full_estimate},
                                     {"full_std_error", f.full_std_error}});
    return ordered_json{{"meta", meta.json()},
                        {"threshold_se", report.threshold_se},
                        {"full_fit", fit_report_json(report.full_sample_fit, meta)},
                        {"folds", folds},
                        {"flags", flags}};
}

// ------------------------------------------------------------- quarterly

inline std::string quarterly_csv(const std::vector<QuarterlyMeanRow>& rows,
                                 const ReportMeta& meta) {
    std::string out = meta.csv_banner() + "\n";
    out += "quarter,n_loans,actual_mean_lgd,predicted_mean_lgd\n";
    for (const auto& r : rows)
        out += r.quarter.str() + "," + std::to_string(r.n_loans) + "," +
               report_detail::fmt(r.actual_mean) + "," + report_detail::fmt(r.predicted_mean) +
               "\n";
    return out;
}

}  // namespace lgdkit
