#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/tobit.hpp"  // DesignMatrix

namespace lgdkit {

/// One hinge factor max(0, direction * (x[variable] - knot)).
struct HingeFactor {
    int variable = 0;
    int direction = +1;  // +1: max(0, x - knot); -1: max(0, knot - x)
    double knot = 0.0;
};

/// Product of hinge factors; empty product is the intercept.
struct BasisFunction {
    std::vector<HingeFactor> factors;

    [[nodiscard]] int degree() const { return static_cast<int>(factors.size()); }

    [[nodiscard]] int variable_use_count(int v) const {
        int c = 0;
        for (const auto& f : factors) c += f.variable == v;
        return c;
    }

    [[nodiscard]] double eval(const Eigen::VectorXd& x) const {
        double prod = 1.0;
        for (const auto& f : factors) {
            double h = f.direction > 0 ? x[f.variable] - f.knot : f.knot - x[f.variable];
            if (h <= 0.0) return 0.0;
            prod *= h;
        }
        return prod;
    }

    [[nodiscard]] std::string formula(const std::vector<std::string>& names) const {
        if (factors.empty()) return "(Intercept)";
        std::string out;
        for (const auto& f : factors) {
            if (!out.empty()) out += " * ";
            const std::string& var = f.variable < static_cast<int>(names.size())
                                         ? names[f.variable]
                                         : "x" + std::to_string(f.variable);
            char knot[40];
            std::snprintf(knot, sizeof knot, "%.4f", std::abs(f.knot));
            if (f.direction > 0)
                out += "max(0, " + var + (f.knot < 0.0 ? " + " : " - ") + knot + ")";
            else
                out += std::string("max(0, ") + (f.knot < 0.0 ? "-" : "") + knot + " - " +
                       var + ")";
        }
        return out;
    }
};

struct MarsModel {
    std::vector<BasisFunction> basis;  // [0] is the intercept
    Eigen::VectorXd coefficients;
    double gcv = std::numeric_limits<double>::infinity();
    double rss = 0.0;
    int n_train = 0;
    int max_degree = 1;
    double penalty_d = 3.0;
    std::vector<std::string> variable_names;

    [[nodiscard]] int n_terms() const { return static_cast<int>(basis.size()); }
};

struct MarsOptions {
    int max_terms = 21;      // total basis functions, intercept included
    int max_degree = 1;      // 1 = additive
    double penalty_d = 3.0;
    int min_span = 0;        // 0: auto ceil(n/50) observations between knots
    double rss_tolerance = 1e-10;  // relative improvement floor
    bool allow_self_product = false;  // permit a variable twice in one product
};

namespace mars_detail {

inline Eigen::MatrixXd basis_matrix(const std::vector<BasisFunction>& basis,
                                    const Eigen::MatrixXd& X) {
    Eigen::MatrixXd B(X.rows(), basis.size());
    for (size_t j = 0; j < basis.size(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            B(i, static_cast<Eigen::Index>(j)) = basis[j].eval(X.row(i).transpose());
    return B;
}

/// Distinct (variable, knot) pairs across all hinge factors.
inline int knot_count(const std::vector<BasisFunction>& basis) {
    std::set<std::pair<int, double>> knots;
    for (const auto& b : basis)
        for (const auto& f : b.factors) knots.insert({f.variable, f.knot});
    return static_cast<int>(knots.size());
}

/// GCV with effective parameters C = rank(B) + penalty * #knots.
inline double gcv_of(const Eigen::MatrixXd& B, const Eigen::VectorXd& y,
                     const std::vector<BasisFunction>& basis, double penalty_d,
                     double* rss_out = nullptr, Eigen::VectorXd* coef_out = nullptr) {
    const double n = static_cast<double>(B.rows());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::VectorXd coef = qr.solve(y);
    double rss = (y - B * coef).squaredNorm();
    if (rss_out) *rss_out = rss;
    if (coef_out) *coef_out = coef;
    double c = static_cast<double>(qr.rank()) + penalty_d * knot_count(basis);
    if (c >= n) return std::numeric_limits<double>::infinity();
    double denom = 1.0 - c / n;
    return (rss / n) / (denom * denom);
}

struct Candidate {
    int parent = -1;
    int variable = -1;
    double knot = 0.0;
    double gain = -1.0;

    [[nodiscard]] bool beats(const Candidate& other) const {
        const double eps = 1e-12 * (1.0 + std::max(gain, other.gain));
        if (gain > other.gain + eps) return true;
        if (gain < other.gain - eps) return false;
        // deterministic tie-break: smallest variable, then knot, then parent
        if (variable != other.variable) return variable < other.variable;
        if (knot != other.knot) return knot < other.knot;
        return parent < other.parent;
    }
};

}  // namespace mars_detail

/// Greedy forward basis growth: at every step tries mirrored hinge pairs
/// (parent * max(0, x - t), parent * max(0, t - x)) over all admissible
/// parents, variables and thinned knot candidates, keeping the pair with
/// the largest RSS drop. Candidate scoring works on components orthogonal
/// to the current basis, so collinear candidates score zero gain instead
/// of destabilizing the fit.
[[nodiscard]] inline MarsModel forward_pass(const DesignMatrix& X, const Eigen::VectorXd& y,
                                            const MarsOptions& options = {}) {
    const int n = X.n_rows();
    const int p = X.n_cols();
    if (options.max_terms < 1) throw config_error("mars: max_terms must be >= 1");
    if (n <= options.max_terms)
        throw data_error("mars: needs more observations than max_terms");
    if (y.size() != n) throw data_error("mars: response length mismatch");
    double y_mean = y.mean();
    double y_scale = (y.array() - y_mean).matrix().squaredNorm();
    if (y_scale == 0.0) throw data_error("mars: constant response");

    const int min_span =
        options.min_span > 0 ? options.min_span
                             : static_cast<int>(std::ceil(static_cast<double>(n) / 50.0));

    MarsModel model;
    model.n_train = n;
    model.max_degree = options.max_degree;
    model.penalty_d = options.penalty_d;
    model.variable_names = X.names;
    model.basis.push_back(BasisFunction{});  // intercept

    // orthonormal basis Q of the current design span and the residual
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd Q(n, 1);
    Q.col(0).setConstant(inv_sqrt_n);
    Eigen::VectorXd resid = y - Eigen::VectorXd::Constant(n, y_mean);
    double rss = resid.squaredNorm();

    auto orthogonalize = [&](Eigen::VectorXd v) {
        v -= Q * (Q.transpose() * v);
        v -= Q * (Q.transpose() * v);  // second pass for numerical hygiene
        return v;
    };

    while (model.n_terms() + 2 <= options.max_terms && rss > 1e-14 * y_scale) {
        mars_detail::Candidate best;
        for (int parent = 0; parent < model.n_terms(); ++parent) {
            const BasisFunction& pb = model.basis[parent];
            if (pb.degree() + 1 > options.max_degree) continue;
            Eigen::VectorXd parent_col(n);
            for (int i = 0; i < n; ++i) parent_col[i] = pb.eval(X.values.row(i).transpose());
            for (int v = 0; v < p; ++v) {
                int uses = pb.variable_use_count(v);
                if (uses >= (options.allow_self_product ? 2 : 1)) continue;
                // admissible rows: parent support
                std::vector<std::pair<double, int>> rows;
                rows.reserve(n);
                for (int i = 0; i < n; ++i)
                    if (parent_col[i] > 0.0) rows.emplace_back(X.values(i, v), i);
                if (rows.size() < 2) continue;
                std::sort(rows.begin(), rows.end());
                std::vector<double> knots;
                double last = std::numeric_limits<double>::quiet_NaN();
                for (size_t r = 0; r < rows.size(); r += min_span) {
                    if (rows[r].first != last) knots.push_back(rows[r].first);
                    last = rows[r].first;
                }
                for (double t : knots) {
                    Eigen::VectorXd u(n), w(n);
                    for (int i = 0; i < n; ++i) {
                        double x = X.values(i, v);
                        u[i] = parent_col[i] * std::max(0.0, x - t);
                        w[i] = parent_col[i] * std::max(0.0, t - x);
                    }
                    double gain = 0.0;
                    Eigen::VectorXd qu = orthogonalize(u);
                    double nu = qu.norm();
                    if (nu > 1e-10 * std::sqrt(static_cast<double>(n))) {
                        qu /= nu;
                        double proj = qu.dot(resid);
                        gain += proj * proj;
                        Eigen::VectorXd qw = orthogonalize(w);
                        qw -= qu * qu.dot(qw);
                        double nw = qw.norm();
                        if (nw > 1e-10 * std::sqrt(static_cast<double>(n))) {
                            qw /= nw;
                            double pw = qw.dot(resid);
                            gain += pw * pw;
                        }
                    } else {
                        Eigen::VectorXd qw = orthogonalize(w);
                        double nw = qw.norm();
                        if (nw > 1e-10 * std::sqrt(static_cast<double>(n))) {
                            qw /= nw;
                            double pw = qw.dot(resid);
                            gain += pw * pw;
                        }
                    }
                    mars_detail::Candidate cand{parent, v, t, gain};
                    if (best.parent < 0 || cand.beats(best)) best = cand;
                }
            }
        }
        if (best.parent < 0 || best.gain <= options.rss_tolerance * rss) break;

        // materialize the chosen pair, keeping only rank-increasing columns
        BasisFunction plus = model.basis[best.parent];
        plus.factors.push_back({best.variable, +1, best.knot});
        BasisFunction minus = model.basis[best.parent];
        minus.factors.push_back({best.variable, -1, best.knot});
        for (const auto& term : {plus, minus}) {
            Eigen::VectorXd col(n);
            for (int i = 0; i < n; ++i) col[i] = term.eval(X.values.row(i).transpose());
            Eigen::VectorXd q = orthogonalize(col);
            double nq = q.norm();
            if (nq <= 1e-10 * std::sqrt(static_cast<double>(n))) continue;
            q /= nq;
            model.basis.push_back(term);
            Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
            Q.col(Q.cols() - 1) = q;
            resid -= q * q.dot(resid);
        }
        double new_rss = resid.squaredNorm();
        if (new_rss > rss) break;  // numerically stuck
        rss = new_rss;
    }

    Eigen::MatrixXd B = mars_detail::basis_matrix(model.basis, X.values);
    model.gcv = mars_detail::gcv_of(B, y, model.basis, options.penalty_d, &model.rss,
                                    &model.coefficients);
    return model;
}

/// Backward deletion: repeatedly removes the basis function whose removal
/// minimizes GCV and returns the best subset visited (the input model
/// itself when it is already GCV-minimal). The intercept never leaves.
[[nodiscard]] inline MarsModel backward_prune(const MarsModel& model, const DesignMatrix& X,
                                              const Eigen::VectorXd& y) {
    if (model.n_train != X.n_rows())
        throw data_error("prune: model was fit on a different sample");
    std::vector<BasisFunction> current = model.basis;
    std::vector<BasisFunction> best_basis = model.basis;
    double best_gcv = model.gcv;

    while (current.size() > 1) {
        double round_best = std::numeric_limits<double>::infinity();
        size_t drop = 0;
        for (size_t j = 1; j < current.size(); ++j) {
            std::vector<BasisFunction> trial;
            trial.reserve(current.size() - 1);
            for (size_t k = 0; k < current.size(); ++k)
                if (k != j) trial.push_back(current[k]);
            Eigen::MatrixXd B = mars_detail::basis_matrix(trial, X.values);
            double g = mars_detail::gcv_of(B, y, trial, model.penalty_d);
            if (g < round_best) {
                round_best = g;
                drop = j;
            }
        }
        if (drop == 0) break;
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(drop));
        if (round_best < best_gcv) {
            best_gcv = round_best;
            best_basis = current;
        }
    }

    MarsModel pruned = model;
    pruned.basis = best_basis;
    Eigen::MatrixXd B = mars_detail::basis_matrix(pruned.basis, X.values);
    pruned.gcv = mars_detail::gcv_of(B, y, pruned.basis, model.penalty_d, &pruned.rss,
                                     &pruned.coefficients);
    return pruned;
}

/// Forward growth followed by backward pruning; deterministic for fixed
/// data and options.
[[nodiscard]] inline MarsModel mars_fit(const DesignMatrix& X, const Eigen::VectorXd& y,
                                        const MarsOptions& options = {}) {
    return backward_prune(forward_pass(X, y, options), X, y);
}

[[nodiscard]] inline double mars_predict(const MarsModel& model, const Eigen::VectorXd& x) {
    if (!model.variable_names.empty() &&
        x.size() != static_cast<Eigen::Index>(model.variable_names.size()))
        throw data_error("mars_predict: input width " + std::to_string(x.size()) +
                         " != training width " + std::to_string(model.variable_names.size()));
    double out = 0.0;
    for (int j = 0; j < model.n_terms(); ++j) out += model.coefficients[j] * model.basis[j].eval(x);
    return out;
}

}  // namespace lgdkit
