#pragma once

#include <cmath>

namespace lgdkit {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;
inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kLnSqrt2Pi = 0.9189385332046727;

/// Standard normal density.
[[nodiscard]] inline double norm_pdf(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

/// Standard normal CDF via erfc; accurate over the full double range
/// down to Phi ~ 1e-308.
[[nodiscard]] inline double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / kSqrt2);
}

/// log Phi(z). Direct evaluation holds to z ~ -37 where erfc underflows;
/// beyond that the standard asymptotic tail expansion takes over.
[[nodiscard]] inline double norm_lcdf(double z) {
    if (z > -37.0) {
        double p = norm_cdf(z);
        if (p > 0.0) return std::log(p);
    }
    double z2 = z * z;
    // Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - 15/z^6)
    double corr = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - kLnSqrt2Pi - std::log(-z) + std::log(corr);
}

/// Inverse Mills ratio phi(z)/Phi(z); asymptotic branch keeps the ratio
/// finite for deep negative z.
[[nodiscard]] inline double mills_ratio(double z) {
    if (z > -37.0) {
        double p = norm_cdf(z);
        if (p > 0.0) return norm_pdf(z) / p;
    }
    double z2 = z * z;
    double corr = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -z / corr;
}

}  // namespace lgdkit
