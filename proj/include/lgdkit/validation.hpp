#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lgdkit/design.hpp"
#include "lgdkit/errors.hpp"
#include "lgdkit/parallel.hpp"
#include "lgdkit/rng.hpp"
#include "lgdkit/tobit.hpp"

namespace lgdkit {

/// Row-to-fold assignment. k-fold plans shuffle with a seed and deal
/// round-robin so fold sizes differ by at most one; leave-one-group
/// plans label rows by the grouping value itself (e.g. default year).
struct FoldPlan {
    std::vector<int> assignment;
    std::string scheme;

    [[nodiscard]] std::vector<int> fold_labels() const {
        std::vector<int> labels = assignment;
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        return labels;
    }
};

[[nodiscard]] inline FoldPlan k_fold_plan(int n_rows, int k, std::uint64_t seed) {
    if (k < 2) throw config_error("k-fold: k must be at least 2");
    if (k > n_rows) throw config_error("k-fold: more folds than rows");
    std::vector<int> order(n_rows);
    for (int i = 0; i < n_rows; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    FoldPlan plan;
    plan.assignment.resize(n_rows);
    for (int pos = 0; pos < n_rows; ++pos) plan.assignment[order[pos]] = pos % k;
    plan.scheme = "k_fold(k=" + std::to_string(k) + ",seed=" + std::to_string(seed) + ")";
    return plan;
}

[[nodiscard]] inline FoldPlan leave_one_group_plan(const std::vector<int>& group_values,
                                                   const std::string& group_key = "group") {
    if (group_values.empty()) throw config_error("leave-one-group: no rows");
    FoldPlan plan;
    plan.assignment = group_values;
    plan.scheme = "leave_one_group(" + group_key + ")";
    return plan;
}

struct FoldRefit {
    int fold_label = 0;
    int held_out_size = 0;
    bool degenerate = false;  // split could not be fit; run continues
    std::string note;
    TobitFit fit;
};

struct CoefficientFlag {
    int fold_label = 0;
    std::string column;
    double refit_estimate = 0.0;
    double full_estimate = 0.0;
    double full_std_error = 0.0;
};

struct StabilityReport {
    TobitFit full_sample_fit;
    double threshold_se = 1.0;
    std::vector<FoldRefit> per_fold;
    std::vector<CoefficientFlag> flags;
};

/// Refits on every fold complement and flags coefficients that land more
/// than threshold_se full-sample standard errors from the full-sample
/// estimate. Degenerate splits (e.g. all-censored training data) are
/// reported per fold, never fatal. Fold refits are independent and run
/// on `jobs` threads; the report is assembled in fold-label order either
/// way.
[[nodiscard]] inline StabilityReport run_stability_cv(const DesignMatrix& X,
                                                      const Eigen::VectorXd& y,
                                                      const FoldPlan& plan,
                                                      double threshold_se,
                                                      const TobitOptions& options = {},
                                                      int jobs = 1) {
    const int n = X.n_rows();
    if (static_cast<int>(plan.assignment.size()) != n)
        throw config_error("stability cv: plan length != rows");
    StabilityReport report;
    report.threshold_se = threshold_se;
    report.full_sample_fit = fit_tobit(X, y, options);

    const auto labels = plan.fold_labels();
    report.per_fold.resize(labels.size());
    parallel_for(static_cast<int>(labels.size()), jobs, [&](int idx) {
        const int label = labels[static_cast<size_t>(idx)];
        int held = 0;
        for (int a : plan.assignment) held += a == label;
        FoldRefit fold;
        fold.fold_label = label;
        fold.held_out_size = held;
        const int keep = n - held;
        if (keep == 0) {
            fold.degenerate = true;
            fold.note = "empty training split";
            report.per_fold[static_cast<size_t>(idx)] = std::move(fold);
            return;
        }
        DesignMatrix Xt;
        Xt.names = X.names;
        Xt.values.resize(keep, X.n_cols());
        Eigen::VectorXd yt(keep);
        int r = 0;
        for (int i = 0; i < n; ++i) {
            if (plan.assignment[i] == label) continue;
            Xt.values.row(r) = X.values.row(i);
            yt[r] = y[i];
            ++r;
        }
        try {
            fold.fit = fit_tobit(Xt, yt, options);
        } catch (const error& e) {
            fold.degenerate = true;
            fold.note = e.what();
        }
        report.per_fold[static_cast<size_t>(idx)] = std::move(fold);
    });

    for (const auto& fold : report.per_fold) {
        if (fold.degenerate) continue;
        for (int j = 0; j < X.n_cols(); ++j) {
            double gap = std::abs(fold.fit.beta[j] - report.full_sample_fit.beta[j]);
            double se = report.full_sample_fit.std_errors[j];
            if (gap > threshold_se * se)
                report.flags.push_back({fold.fold_label, X.names[j], fold.fit.beta[j],
                                        report.full_sample_fit.beta[j], se});
        }
    }
    return report;
}

/// Calendar quarter key, Jan-Mar = Q1.
struct QuarterKey {
    int year = 0;
    int quarter = 1;

    friend auto operator<=>(const QuarterKey&, const QuarterKey&) = default;

    [[nodiscard]] static QuarterKey of(MonthKey m) { return {m.year, m.quarter()}; }
    [[nodiscard]] std::string str() const {
        return std::to_string(year) + "Q" + std::to_string(quarter);
    }
    [[nodiscard]] static QuarterKey parse(const std::string& text) {
        int y = 0, q = 0;
        if (std::sscanf(text.c_str(), "%dQ%d", &y, &q) != 2 || q < 1 || q > 4)
            throw config_error("invalid quarter '" + text + "' (expected e.g. 2008Q2)");
        return {y, q};
    }
};

struct QuarterlyMeanRow {
    QuarterKey quarter;
    int n_loans = 0;
    double actual_mean = 0.0;     // mean observed censored LGD
    double predicted_mean = 0.0;  // mean censored-mean prediction
};

/// Simple (unweighted) quarterly averages of actual vs predicted
/// censored LGD, grouped by the calendar quarter of the default month.
[[nodiscard]] inline std::vector<QuarterlyMeanRow> quarterly_mean_fit(
    const ModelFrame& frame, const TobitFit& fit,
    CensoredMeanForm form = CensoredMeanForm::textbook) {
    std::map<QuarterKey, QuarterlyMeanRow> rows;
    for (int i = 0; i < frame.X.n_rows(); ++i) {
        QuarterKey q = QuarterKey::of(frame.default_month[i]);
        auto& row = rows[q];
        row.quarter = q;
        row.n_loans += 1;
        row.actual_mean += frame.y[i];
        row.predicted_mean += predict_censored_mean(fit, frame.X.values.row(i).transpose(),
                                                     form);
    }
    std::vector<QuarterlyMeanRow> out;
    out.reserve(rows.size());
    for (auto& [q, row] : rows) {
        row.actual_mean /= row.n_loans;
        row.predicted_mean /= row.n_loans;
        out.push_back(row);
    }
    return out;
}

/// One candidate model scored on a shared set of records.
struct RankedCandidate {
    std::string name;
    double underestimation = 0.0;  // actual mean - predicted mean at the quarter
};

struct DownturnCandidate {
    std::string name;
    TobitFit fit;
    const ModelFrame* frame = nullptr;  // same records, candidate-specific columns
};

/// Sorts candidates by (actual - predicted) mean censored LGD at the
/// target quarter, ascending: the lower the underestimation, the better
/// the model captures the downturn.
[[nodiscard]] inline std::vector<RankedCandidate> downturn_underestimation_rank(
    const std::vector<DownturnCandidate>& candidates, QuarterKey target_quarter,
    CensoredMeanForm form = CensoredMeanForm::textbook) {
    if (candidates.empty()) throw config_error("downturn rank: no candidates");
    const ModelFrame* first = candidates.front().frame;
    for (const auto& c : candidates) {
        if (!c.frame) throw config_error("downturn rank: candidate without data");
        if (c.frame->X.n_rows() != first->X.n_rows() || c.frame->y != first->y)
            throw config_error("downturn rank: candidates score different records");
    }
    std::vector<RankedCandidate> out;
    for (const auto& c : candidates) {
        auto rows = quarterly_mean_fit(*c.frame, c.fit, form);
        const QuarterlyMeanRow* hit = nullptr;
        for (const auto& r : rows)
            if (r.quarter == target_quarter) hit = &r;
        if (!hit)
            throw data_error("downturn rank: no defaults in quarter " + target_quarter.str());
        out.push_back({c.name, hit->actual_mean - hit->predicted_mean});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.underestimation != b.underestimation)
            return a.underestimation < b.underestimation;
        return a.name < b.name;
    });
    return out;
}

}  // namespace lgdkit
