#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/lgd.hpp"
#include "lgdkit/monthly_series.hpp"
#include "lgdkit/tobit.hpp"

namespace lgdkit {

/// One formula term: "1" (intercept), a loan covariate name, or a
/// macro term "SERIES.TRANSFORM" evaluated at the default month
/// (e.g. "CPI_M.LDIFF6M").
struct FormulaTerm {
    enum class Kind { intercept, covariate, mev };
    Kind kind = Kind::covariate;
    std::string name;          // full column label
    std::string series_name;   // mev only
    TransformSpec transform;   // mev only

    [[nodiscard]] static FormulaTerm parse(const std::string& text) {
        FormulaTerm t;
        t.name = text;
        if (text == "1") {
            t.kind = Kind::intercept;
            t.name = "(Intercept)";
            return t;
        }
        auto dot = text.find_last_of('.');
        if (dot != std::string::npos && dot + 1 < text.size()) {
            try {
                t.transform = TransformSpec::parse(text.substr(dot + 1));
                t.kind = Kind::mev;
                t.series_name = text.substr(0, dot);
                return t;
            } catch (const config_error&) {
                // not a transform suffix: fall through to covariate
            }
        }
        t.kind = Kind::covariate;
        return t;
    }
};

[[nodiscard]] inline std::vector<FormulaTerm> parse_formula(
    const std::vector<std::string>& terms) {
    if (terms.empty()) throw config_error("empty model formula");
    std::vector<FormulaTerm> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(FormulaTerm::parse(t));
    return out;
}

/// Rows of a fitted dataset: design matrix, censored response and the
/// default month that produced each row.
struct ModelFrame {
    DesignMatrix X;
    Eigen::VectorXd y;
    std::vector<MonthKey> default_month;
    std::vector<std::string> loan_id;
};

/// Evaluates a formula over loan records against an MEV panel. Macro
/// terms are transformed once and read at each loan's default month;
/// a missing covariate or macro value is a data error naming the row.
[[nodiscard]] inline ModelFrame build_model_frame(
    const std::vector<LoanDefaultRecord>& records,
    const std::vector<MonthlySeries>& mev_panel, const std::vector<FormulaTerm>& terms) {
    if (records.empty()) throw data_error("model frame: no records");
    const int n = static_cast<int>(records.size());
    const int p = static_cast<int>(terms.size());

    std::vector<MonthlySeries> mev_columns(terms.size());
    for (size_t j = 0; j < terms.size(); ++j) {
        if (terms[j].kind != FormulaTerm::Kind::mev) continue;
        const MonthlySeries* src = nullptr;
        for (const auto& s : mev_panel)
            if (s.name() == terms[j].series_name) src = &s;
        if (!src)
            throw config_error("model frame: series '" + terms[j].series_name +
                               "' not in MEV panel");
        mev_columns[j] = apply_transform(*src, terms[j].transform);
    }

    ModelFrame frame;
    frame.X.values.resize(n, p);
    for (const auto& t : terms) frame.X.names.push_back(t.name);
    frame.y.resize(n);
    frame.default_month.reserve(records.size());
    frame.loan_id.reserve(records.size());
    for (int i = 0; i < n; ++i) {
        const auto& r = records[i];
        frame.y[i] = observed_lgd(r);
        frame.default_month.push_back(r.default_month);
        frame.loan_id.push_back(r.loan_id);
        for (int j = 0; j < p; ++j) {
            const auto& t = terms[j];
            switch (t.kind) {
                case FormulaTerm::Kind::intercept:
                    frame.X.values(i, j) = 1.0;
                    break;
                case FormulaTerm::Kind::covariate: {
                    auto it = r.covariates.find(t.name);
                    if (it == r.covariates.end())
                        throw data_error("model frame: loan " + r.loan_id +
                                         " lacks covariate '" + t.name + "'");
                    frame.X.values(i, j) = it->second;
                    break;
                }
                case FormulaTerm::Kind::mev: {
                    auto v = mev_columns[j].at(r.default_month);
                    if (!v)
                        throw data_error("model frame: " + t.name + " missing at " +
                                         r.default_month.str() + " (loan " + r.loan_id + ")");
                    frame.X.values(i, j) = *v;
                    break;
                }
            }
        }
    }
    return frame;
}

}  // namespace lgdkit
