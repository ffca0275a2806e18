#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "lgdkit/errors.hpp"

namespace lgdkit {

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd std_err;   // classic sigma^2 (X'X)^-1
    double ssr = 0.0;
    double sigma2 = 0.0;       // SSR / (n - k)
    double log_likelihood = 0.0;  // Gaussian, MLE variance
    int n_obs = 0;
    int n_params = 0;

    [[nodiscard]] double aic() const { return -2.0 * log_likelihood + 2.0 * n_params; }
    [[nodiscard]] double bic() const {
        return -2.0 * log_likelihood + n_params * std::log(static_cast<double>(n_obs));
    }
    [[nodiscard]] double t_value(int j) const { return coef[j] / std_err[j]; }
};

/// Ordinary least squares with classic standard errors.
[[nodiscard]] inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const int n = static_cast<int>(X.rows());
    const int k = static_cast<int>(X.cols());
    if (n <= k) throw data_error("OLS needs more rows than columns");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw numeric_error("rank-deficient design in OLS");
    OlsFit fit;
    fit.coef = qr.solve(y);
    Eigen::VectorXd resid = y - X * fit.coef;
    fit.ssr = resid.squaredNorm();
    fit.n_obs = n;
    fit.n_params = k;
    fit.sigma2 = fit.ssr / static_cast<double>(n - k);
    Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(
        Eigen::MatrixXd::Identity(k, k));
    fit.std_err = (fit.sigma2 * xtx_inv.diagonal().array()).sqrt();
    double s2_mle = fit.ssr / static_cast<double>(n);
    fit.log_likelihood =
        -0.5 * n * (std::log(2.0 * M_PI) + std::log(s2_mle) + 1.0);
    return fit;
}

}  // namespace lgdkit
