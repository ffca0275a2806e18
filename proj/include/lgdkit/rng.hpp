#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lgdkit/errors.hpp"

namespace lgdkit {

/// Deterministic random source. mt19937_64 supplies bits; the
/// distribution transforms are spelled out here because the <random>
/// distribution classes have implementation-defined sequences and
/// fixed-seed runs must be byte-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    [[nodiscard]] double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n) by rejection.
    [[nodiscard]] std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw domain_error("uniform_int(0)");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via polar Box-Muller (cached second deviate).
    [[nodiscard]] double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    [[nodiscard]] double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Index draw from unnormalized non-negative weights.
    [[nodiscard]] size_t categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0 || !std::isfinite(w)) throw domain_error("negative categorical weight");
            total += w;
        }
        if (total <= 0.0) throw domain_error("categorical weights sum to zero");
        double u = uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

    /// Fisher-Yates shuffle (std::shuffle is implementation-defined).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derived stream for a work chunk; stable regardless of scheduling.
    [[nodiscard]] static Rng for_chunk(std::uint64_t seed, std::uint64_t chunk) {
        // splitmix64 step keeps derived seeds well separated
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (chunk + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace lgdkit
