#pragma once

// Samplers for one-sided stable subordinators and rotationally invariant
// alpha-stable increments.
//
// Normalization: the characteristic exponent of L is fixed to |xi|^alpha, so
// E exp(i xi.L_t) = exp(-t |xi|^alpha). Any other multiplicative constant is
// a deterministic rescaling of time and does not change convergence orders.

#include "rng.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinstab {

struct StableParams {
    double alpha = 1.5;
    int dim = 1;

    StableParams() = default;
    StableParams(double alpha_, int dim_) : alpha(alpha_), dim(dim_) { validate(); }

    /// alpha = 2 is the Gaussian limit and is admitted for debugging only.
    void validate() const
    {
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw std::invalid_argument("stable index alpha must lie in (1,2], got " + std::to_string(alpha));
        if (dim < 1)
            throw std::invalid_argument("dimension must be >= 1, got " + std::to_string(dim));
    }
};

/// Positive stable variable S with E exp(-lambda S) = exp(-lambda^a), 0 < a < 1,
/// by the Kanter / Chambers-Mallows-Stuck representation.
inline double sample_one_sided_stable(double a, RngStream& rng)
{
    if (!(a > 0.0 && a < 1.0))
        throw std::invalid_argument("one-sided stable index must lie in (0,1), got " + std::to_string(a));
    for (;;) {
        const double u = std::numbers::pi * rng.uniform_open();
        const double e = rng.exponential();
        const double su = std::sin(u);
        // uniform_open already excludes 0, but pi*u can round to pi.
        if (!(su > 0.0) || u >= std::numbers::pi) continue;
        const double s = std::sin(a * u) / std::pow(su, 1.0 / a)
                         * std::pow(std::sin((1.0 - a) * u) / e, (1.0 - a) / a);
        if (s > 0.0 && std::isfinite(s)) return s;
    }
}

/// Writes one increment of L over a step of length dt into out (size dim):
/// sqrt(2 S) N with S = dt^{2/alpha} S_{alpha/2} and N standard Gaussian.
inline void sample_isotropic_stable_increment(const StableParams& params, double dt, RngStream& rng,
                                              std::span<double> out)
{
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (out.size() != static_cast<std::size_t>(params.dim))
        throw std::invalid_argument("output span does not match dimension");
    double scale;
    if (params.alpha == 2.0) {
        scale = std::sqrt(2.0 * dt);
    } else {
        const double s = std::pow(dt, 2.0 / params.alpha) * sample_one_sided_stable(0.5 * params.alpha, rng);
        scale = std::sqrt(2.0 * s);
    }
    for (double& o : out) o = scale * rng.normal();
}

inline std::vector<double> sample_isotropic_stable_increment(const StableParams& params, double dt, RngStream& rng)
{
    std::vector<double> out(static_cast<std::size_t>(params.dim));
    sample_isotropic_stable_increment(params, dt, rng, out);
    return out;
}

/// (1/M) sum_k exp(i xi . sample_k).
inline std::complex<double> empirical_cf(std::span<const std::vector<double>> samples, std::span<const double> xi)
{
    if (samples.empty()) throw std::invalid_argument("empirical_cf needs at least one sample");
    double re = 0.0, im = 0.0;
    for (const auto& s : samples) {
        if (s.size() != xi.size()) throw std::invalid_argument("empirical_cf: dimension mismatch");
        double phase = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) phase += xi[j] * s[j];
        re += std::cos(phase);
        im += std::sin(phase);
    }
    const double m = static_cast<double>(samples.size());
    return {re / m, im / m};
}

/// Scalar convenience for d = 1 samples.
inline std::complex<double> empirical_cf(std::span<const double> samples, double xi)
{
    if (samples.empty()) throw std::invalid_argument("empirical_cf needs at least one sample");
    double re = 0.0, im = 0.0;
    for (double s : samples) {
        re += std::cos(xi * s);
        im += std::sin(xi * s);
    }
    const double m = static_cast<double>(samples.size());
    return {re / m, im / m};
}

} // namespace kinstab
