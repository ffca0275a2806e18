#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "lgdkit/errors.hpp"
#include "lgdkit/normal.hpp"
#include "lgdkit/ols.hpp"

namespace lgdkit {

/// Dense regression design with named columns. The intercept, when
/// wanted, is an explicit column.
struct DesignMatrix {
    Eigen::MatrixXd values;          // n x p
    std::vector<std::string> names;  // p column names

    [[nodiscard]] int n_rows() const { return static_cast<int>(values.rows()); }
    [[nodiscard]] int n_cols() const { return static_cast<int>(values.cols()); }

    void validate() const {
        if (names.size() != static_cast<size_t>(values.cols()))
            throw data_error("design: column name count mismatch");
        if (values.rows() <= values.cols())
            throw data_error("design: needs more rows than columns");
        if (!values.allFinite()) throw data_error("design: non-finite entries");
        for (int a = 0; a < values.cols(); ++a)
            for (int b = a + 1; b < values.cols(); ++b)
                if (values.col(a) == values.col(b))
                    throw data_error("design: duplicated columns '" + names[a] + "' and '" +
                                     names[b] + "'");
    }
};

struct TobitFit {
    std::string model_name;
    std::vector<std::string> column_names;
    Eigen::VectorXd beta;
    double sigma = 1.0;
    Eigen::VectorXd std_errors;  // length p+1: beta..., sigma
    double log_likelihood = 0.0;
    int n_obs = 0;
    int n_censored = 0;
    double bic = 0.0;
    bool converged = false;
    int iterations = 0;
    std::uint64_t sample_tag = 0;  // fingerprint of the response sample
};

struct TobitOptions {
    double gradient_tolerance = 1e-8;
    int max_iterations = 500;
    std::string model_name;
};

namespace tobit_detail {

[[nodiscard]] inline std::uint64_t sample_fingerprint(const Eigen::VectorXd& y) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        std::uint64_t bits;
        double v = y[i];
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof bits);
        mix(bits);
    }
    return h;
}

}  // namespace tobit_detail

/// Negative log-likelihood of the left-censored-at-zero Tobit model in
/// the Olsen parametrization gamma = beta/sigma, theta = 1/sigma:
/// censored rows contribute -ln Phi(-x'gamma), uncensored rows
/// -ln theta - ln phi(theta y - x'gamma). Globally convex in
/// (gamma, theta).
[[nodiscard]] inline double tobit_negative_log_likelihood(const Eigen::VectorXd& gamma,
                                                          double theta,
                                                          const DesignMatrix& X,
                                                          const Eigen::VectorXd& y) {
    if (theta <= 0.0) throw domain_error("tobit NLL: theta must be positive");
    if (X.values.rows() != y.size()) throw data_error("tobit NLL: row count mismatch");
    if (!X.values.allFinite() || !y.allFinite())
        throw data_error("tobit NLL: non-finite rows");
    Eigen::VectorXd xg = X.values * gamma;
    double nll = 0.0;
    const double ln_theta = std::log(theta);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) {
            nll -= norm_lcdf(-xg[i]);
        } else {
            double r = theta * y[i] - xg[i];
            nll += -ln_theta + kLnSqrt2Pi + 0.5 * r * r;
        }
    }
    return nll;
}

namespace tobit_detail {

/// NLL with analytic gradient in (gamma_1..gamma_p, theta).
inline double nll_gradient(const Eigen::VectorXd& gamma, double theta,
                           const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           Eigen::VectorXd& grad) {
    const int p = static_cast<int>(X.cols());
    Eigen::VectorXd xg = X * gamma;
    grad.setZero(p + 1);
    double nll = 0.0;
    const double ln_theta = std::log(theta);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) {
            double z = -xg[i];
            nll -= norm_lcdf(z);
            grad.head(p) += mills_ratio(z) * X.row(i).transpose();
        } else {
            double r = theta * y[i] - xg[i];
            nll += -ln_theta + kLnSqrt2Pi + 0.5 * r * r;
            grad.head(p) -= r * X.row(i).transpose();
            grad[p] += -1.0 / theta + r * y[i];
        }
    }
    return nll;
}

/// Observed information (Hessian of the NLL) at (gamma, theta).
inline Eigen::MatrixXd observed_information(const Eigen::VectorXd& gamma, double theta,
                                            const Eigen::MatrixXd& X,
                                            const Eigen::VectorXd& y) {
    const int p = static_cast<int>(X.cols());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p + 1, p + 1);
    Eigen::VectorXd xg = X * gamma;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        Eigen::VectorXd x = X.row(i).transpose();
        if (y[i] == 0.0) {
            double z = -xg[i];
            double lam = mills_ratio(z);
            H.topLeftCorner(p, p) += lam * (lam + z) * x * x.transpose();
        } else {
            H.topLeftCorner(p, p) += x * x.transpose();
            H.block(0, p, p, 1) -= y[i] * x;
            H.block(p, 0, 1, p) -= y[i] * x.transpose();
            H(p, p) += 1.0 / (theta * theta) + y[i] * y[i];
        }
    }
    return H;
}

}  // namespace tobit_detail

/// Maximum-likelihood Tobit fit. BFGS on the convex Olsen objective with
/// analytic gradient; OLS on the uncensored rows seeds the start. Maps
/// back to (beta, sigma) and reports delta-method standard errors from
/// the inverse observed information.
[[nodiscard]] inline TobitFit fit_tobit(const DesignMatrix& X, const Eigen::VectorXd& y,
                                        const TobitOptions& options = {}) {
    X.validate();
    const int n = X.n_rows();
    const int p = X.n_cols();
    if (y.size() != n) throw data_error("fit_tobit: response length mismatch");
    if (!y.allFinite()) throw data_error("fit_tobit: non-finite response");
    int n_censored = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) throw data_error("fit_tobit: negative response (censoring is at 0)");
        n_censored += y[i] == 0.0;
    }
    if (n_censored == n) throw data_error("fit_tobit: all observations censored");

    // rank check with offending column names
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.values);
    if (qr.rank() < p) {
        std::string cols;
        auto perm = qr.colsPermutation().indices();
        for (int j = qr.rank(); j < p; ++j)
            cols += (cols.empty() ? "" : ", ") + X.names[perm[j]];
        throw numeric_error("fit_tobit: rank-deficient design, offending columns: " + cols);
    }

    // start from OLS on the uncensored rows
    const int n_unc = n - n_censored;
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(p);
    double theta;
    if (n_unc > p) {
        Eigen::MatrixXd Xu(n_unc, p);
        Eigen::VectorXd yu(n_unc);
        int r = 0;
        for (int i = 0; i < n; ++i)
            if (y[i] != 0.0) {
                Xu.row(r) = X.values.row(i);
                yu[r] = y[i];
                ++r;
            }
        auto start = ols(Xu, yu);
        double sd = std::sqrt(std::max(start.sigma2, 1e-12));
        gamma = start.coef / sd;
        theta = 1.0 / sd;
    } else {
        double sd = std::max(std::sqrt(y.squaredNorm() / n), 1e-6);
        theta = 1.0 / sd;
    }

    // BFGS with backtracking; theta stays positive by step shrinking.
    // The iteration works on the mean NLL so the gradient tolerance is a
    // per-observation scale independent of n.
    const int dim = p + 1;
    const double inv_n = 1.0 / static_cast<double>(n);
    auto mean_nll_grad = [&](const Eigen::VectorXd& pt, Eigen::VectorXd& g) {
        double f = tobit_detail::nll_gradient(pt.head(p), pt[p], X.values, y, g);
        g *= inv_n;
        return f * inv_n;
    };
    Eigen::VectorXd x_cur(dim);
    x_cur.head(p) = gamma;
    x_cur[p] = theta;
    Eigen::VectorXd grad(dim), grad_new(dim);
    double f_cur = mean_nll_grad(x_cur, grad);
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(dim, dim);
    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            converged = true;
            break;
        }
        Eigen::VectorXd dir = -Hinv * grad;
        if (dir.dot(grad) >= 0.0) {  // safeguard: reset curvature
            Hinv.setIdentity();
            dir = -grad;
        }
        double step = 1.0;
        double slope = grad.dot(dir);
        Eigen::VectorXd x_new;
        double f_new = f_cur;
        bool progressed = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x_cur + step * dir;
            if (x_new[p] > 0.0) {
                f_new = mean_nll_grad(x_new, grad_new);
                if (std::isfinite(f_new) && f_new <= f_cur + 1e-4 * step * slope) {
                    progressed = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!progressed) break;  // roundoff floor reached
        Eigen::VectorXd s = x_new - x_cur;
        Eigen::VectorXd yv = grad_new - grad;
        double sy = s.dot(yv);
        if (sy > 1e-14) {
            Eigen::VectorXd Hy = Hinv * yv;
            double yHy = yv.dot(Hy);
            Hinv += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
                    (Hy * s.transpose() + s * Hy.transpose()) / sy;
        }
        x_cur = x_new;
        f_cur = f_new;
        grad = grad_new;
    }

    TobitFit fit;
    fit.model_name = options.model_name;
    fit.column_names = X.names;
    fit.sigma = 1.0 / x_cur[p];
    fit.beta = x_cur.head(p) * fit.sigma;
    fit.log_likelihood = -f_cur * static_cast<double>(n);
    fit.n_obs = n;
    fit.n_censored = n_censored;
    fit.bic = -2.0 * fit.log_likelihood + (p + 1) * std::log(static_cast<double>(n));
    fit.converged = converged;
    fit.iterations = iter;
    fit.sample_tag = tobit_detail::sample_fingerprint(y);

    // delta-method standard errors in (beta, sigma)
    Eigen::MatrixXd info =
        tobit_detail::observed_information(x_cur.head(p), x_cur[p], X.values, y);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::MatrixXd cov_olsen = ldlt.solve(Eigen::MatrixXd::Identity(dim, dim));
    if (ldlt.info() != Eigen::Success || !cov_olsen.allFinite())
        throw numeric_error("fit_tobit: singular observed information");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
    const double th = x_cur[p];
    for (int j = 0; j < p; ++j) {
        J(j, j) = 1.0 / th;
        J(j, p) = -x_cur[j] / (th * th);
    }
    J(p, p) = -1.0 / (th * th);
    Eigen::MatrixXd cov = J * cov_olsen * J.transpose();
    fit.std_errors = cov.diagonal().array().max(0.0).sqrt();
    return fit;
}

/// Which argument Phi receives in the censored-mean formula: `textbook`
/// evaluates Phi at mu/sigma, `unscaled_phi` at mu itself (a convention
/// some published fits use; the two agree only when sigma = 1).
enum class CensoredMeanForm { textbook, unscaled_phi };

/// E[max(Y, 0) | x] for Y ~ N(x'beta, sigma^2):
/// Phi(mu/sigma) mu + sigma phi(mu/sigma). Strictly positive for finite mu.
[[nodiscard]] inline double predict_censored_mean(const TobitFit& fit,
                                                  const Eigen::VectorXd& x,
                                                  CensoredMeanForm form =
                                                      CensoredMeanForm::textbook) {
    if (x.size() != fit.beta.size())
        throw data_error("predict: input width " + std::to_string(x.size()) +
                         " != model width " + std::to_string(fit.beta.size()));
    double mu = x.dot(fit.beta);
    double z = form == CensoredMeanForm::textbook ? mu / fit.sigma : mu;
    return norm_cdf(z) * mu + fit.sigma * norm_pdf(z);
}

/// Ascending BIC; ties break toward fewer parameters, then name order.
/// Candidates must score the same response sample.
[[nodiscard]] inline std::vector<TobitFit> rank_by_bic(std::vector<TobitFit> fits) {
    if (fits.empty()) return fits;
    for (const auto& f : fits)
        if (f.n_obs != fits[0].n_obs || f.sample_tag != fits[0].sample_tag)
            throw config_error("rank_by_bic: fits score different samples");
    std::stable_sort(fits.begin(), fits.end(), [](const TobitFit& a, const TobitFit& b) {
        if (a.bic != b.bic) return a.bic < b.bic;
        if (a.beta.size() != b.beta.size()) return a.beta.size() < b.beta.size();
        return a.model_name < b.model_name;
    });
    return fits;
}

}  // namespace lgdkit
