#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgdkit/csv.hpp"
#include "lgdkit/errors.hpp"
#include "lgdkit/month_key.hpp"
#include "lgdkit/monthly_series.hpp"
#include "lgdkit/stats.hpp"

namespace lgdkit {

/// One resolved default. B/V/W follow the workout accounting: balance,
/// property value and workout cost, subscripted at default (d) and sale (s).
struct LoanDefaultRecord {
    std::string loan_id;
    MonthKey default_month;
    MonthKey sale_month;
    double balance_at_default = 0.0;  // B_d > 0
    double balance_at_sale = 0.0;     // B_s > 0
    double value_at_default = 0.0;    // V_d > 0
    double value_at_sale = 0.0;       // V_s >= 0
    double workout_cost = 0.0;        // W_{d,s} >= 0
    std::optional<MonthKey> appraisal_month;
    std::map<std::string, double> covariates;

    [[nodiscard]] double ltv_at_default() const {
        return balance_at_default / value_at_default;
    }
    [[nodiscard]] int resolution_months() const {
        return sale_month.index() - default_month.index();
    }

    void validate() const {
        if (sale_month < default_month)
            throw data_error("loan " + loan_id + ": sale before default");
        if (resolution_months() > 120)
            throw data_error("loan " + loan_id + ": resolution time exceeds 120 months");
        if (balance_at_default <= 0.0 || balance_at_sale <= 0.0 || value_at_default <= 0.0)
            throw data_error("loan " + loan_id + ": balances and V_d must be positive");
        if (value_at_sale < 0.0 || workout_cost < 0.0)
            throw data_error("loan " + loan_id + ": V_s and W must be non-negative");
    }
};

struct LgdOutcome {
    double raw_lgd = 0.0;
    double censored_lgd = 0.0;
};

/// Workout LGD: (B_d + W_{d,s} - V_s) / B_d.
[[nodiscard]] inline double raw_lgd(const LoanDefaultRecord& r) {
    if (r.balance_at_default <= 0.0)
        throw domain_error("raw_lgd: B_d must be positive");
    return (r.balance_at_default + r.workout_cost - r.value_at_sale) / r.balance_at_default;
}

/// The decomposition 1 - 1/LTV_d - (dV/V_d)/LTV_d + W/B_d, equal to the
/// workout LGD whenever the balance does not move between default and sale.
[[nodiscard]] inline double lgd_decomposed(double ltv_d, double value_change_ratio,
                                           double workout_ratio) {
    if (ltv_d <= 0.0) throw domain_error("lgd_decomposed: LTV_d must be positive");
    return 1.0 - 1.0 / ltv_d - value_change_ratio / ltv_d + workout_ratio;
}

/// Left-censor at zero.
[[nodiscard]] inline LgdOutcome censor(double raw) {
    return {raw, std::max(raw, 0.0)};
}

[[nodiscard]] inline double observed_lgd(const LoanDefaultRecord& r) {
    return censor(raw_lgd(r)).censored_lgd;
}

/// Which value feeds V_d in the value-change study: the recorded
/// (appraisal) value, or the balance divided by the recorded LTV_d
/// covariate when the appraisal is not trusted.
enum class ValueBasis { appraisal, model_ltv };

/// Correlation between per-loan value change dV_{d,s}/V_d and CPI YoY at
/// the default month, restricted to defaults with an appraisal within
/// `appraisal_window_months` of the default date.
[[nodiscard]] inline CorrelationReport value_change_correlation_real_time(
    const std::vector<LoanDefaultRecord>& records, const MonthlySeries& cpi_yoy,
    int appraisal_window_months, ValueBasis basis = ValueBasis::appraisal) {
    PairedSample sample;
    std::optional<MonthKey> lo, hi;
    for (const auto& r : records) {
        if (!r.appraisal_month) continue;
        int gap = std::abs(r.appraisal_month->index() - r.default_month.index());
        if (gap > appraisal_window_months) continue;
        auto c = cpi_yoy.at(r.default_month);
        if (!c) continue;
        double v_d = basis == ValueBasis::appraisal
                         ? r.value_at_default
                         : r.balance_at_default / r.covariates.at("LTV_d");
        sample.emplace_back((r.value_at_sale - v_d) / v_d, *c);
        if (!lo || r.default_month < *lo) lo = r.default_month;
        if (!hi || *hi < r.default_month) hi = r.default_month;
    }
    if (sample.empty())
        throw data_error("value-change study: no records survive the appraisal filter");
    CorrelationReport rep;
    rep.series_x_name = "dV_over_Vd";
    rep.series_y_name = cpi_yoy.name();
    rep.lead_months = 0;
    rep.window = {*lo, *hi};
    rep.n_pairs = static_cast<int>(sample.size());
    // pearson over (cpi, dv) pairs, symmetric either way
    rep.pearson_r = pearson(sample);
    return rep;
}

// --------------------------------------------------------------- loan CSV

inline const char* kLoanCsvHeader =
    "loan_id,default_month,sale_month,B_d,B_s,V_d,V_s,W,appraisal_month";

inline void write_loans_csv(const std::string& path,
                            const std::vector<LoanDefaultRecord>& records,
                            const std::string& banner = "") {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    if (!banner.empty()) out << banner << "\n";
    // covariate columns: union of names, sorted
    std::vector<std::string> cov_names;
    for (const auto& r : records)
        for (const auto& [k, v] : r.covariates)
            if (std::find(cov_names.begin(), cov_names.end(), k) == cov_names.end())
                cov_names.push_back(k);
    std::sort(cov_names.begin(), cov_names.end());
    out << kLoanCsvHeader;
    for (const auto& c : cov_names) out << "," << c;
    out << "\n";
    char buf[64];
    for (const auto& r : records) {
        out << r.loan_id << "," << r.default_month.str() << "," << r.sale_month.str();
        for (double v : {r.balance_at_default, r.balance_at_sale, r.value_at_default,
                         r.value_at_sale, r.workout_cost}) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << "," << buf;
        }
        out << "," << (r.appraisal_month ? r.appraisal_month->str() : "");
        for (const auto& c : cov_names) {
            auto it = r.covariates.find(c);
            if (it == r.covariates.end()) {
                out << ",";
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", it->second);
                out << "," << buf;
            }
        }
        out << "\n";
    }
}

[[nodiscard]] inline std::vector<LoanDefaultRecord> read_loans_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    std::vector<std::string> header;
    std::vector<LoanDefaultRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv_detail::trim(line).empty()) continue;
        if (line[0] == '#') continue;  // banner/comment lines
        auto fields = csv_detail::split_line(line);
        auto where = [&] { return path + ":" + std::to_string(lineno); };
        if (header.empty()) {
            header = fields;
            if (header.size() < 9 || header[0] != "loan_id")
                throw data_error("unexpected loan CSV header at " + where());
            continue;
        }
        if (fields.size() != header.size())
            throw data_error("expected " + std::to_string(header.size()) + " columns at " +
                             where());
        auto num = [&](const std::string& text) {
            char* end = nullptr;
            double v = std::strtod(text.c_str(), &end);
            if (end == text.c_str() || *end != '\0')
                throw data_error("bad number '" + text + "' at " + where());
            return v;
        };
        LoanDefaultRecord r;
        r.loan_id = fields[0];
        r.default_month = MonthKey::parse(fields[1]);
        r.sale_month = MonthKey::parse(fields[2]);
        r.balance_at_default = num(fields[3]);
        r.balance_at_sale = num(fields[4]);
        r.value_at_default = num(fields[5]);
        r.value_at_sale = num(fields[6]);
        r.workout_cost = num(fields[7]);
        if (!csv_detail::is_missing(fields[8])) r.appraisal_month = MonthKey::parse(fields[8]);
        for (size_t c = 9; c < fields.size(); ++c)
            if (!csv_detail::is_missing(fields[c])) r.covariates[header[c]] = num(fields[c]);
        r.validate();
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace lgdkit
