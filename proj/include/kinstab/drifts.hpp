#pragma once

// Bounded drift families with prescribed anisotropic Hoelder regularity.
//
// Every family is componentwise separable: b_j(x, v) = A [f(x_j) + g(v_j)].
// The position part carries exponent (alpha + beta) / (1 + alpha), the
// velocity part exponent beta.

#include "kinetic_path.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kinstab {

enum class DriftKind { zero, constant, separable_holder, multiscale };

inline std::string_view to_string(DriftKind kind)
{
    switch (kind) {
    case DriftKind::zero: return "zero";
    case DriftKind::constant: return "constant";
    case DriftKind::separable_holder: return "separable";
    case DriftKind::multiscale: return "multiscale";
    }
    return "unknown";
}

inline DriftKind parse_drift_kind(std::string_view name)
{
    if (name == "zero") return DriftKind::zero;
    if (name == "constant") return DriftKind::constant;
    if (name == "separable" || name == "separable_holder") return DriftKind::separable_holder;
    if (name == "multiscale") return DriftKind::multiscale;
    throw std::invalid_argument("unknown drift kind '" + std::string(name) + "' (expected zero|constant|separable|multiscale)");
}

/// Admissible velocity regularity: (1 - alpha/2, min(1, (alpha-1)(1+alpha))).
/// Orders above 1 would need higher-order difference constructions.
inline double beta_lower_bound(double alpha) { return 1.0 - alpha / 2.0; }
inline double beta_upper_bound(double alpha) { return std::min(1.0, (alpha - 1.0) * (1.0 + alpha)); }

/// sign(u) * min(|u|^gamma, 1).
inline double clipped_power(double u, double gamma)
{
    const double a = std::min(std::pow(std::abs(u), gamma), 1.0);
    return u < 0.0 ? -a : a;
}

struct DriftSpec {
    DriftKind kind = DriftKind::zero;
    double amplitude = 1.0;
    std::vector<double> c;       // kind == constant
    double beta = 0.6;
    double alpha = 1.5;
    int scales = 16;             // kind == multiscale, terms k = 0..scales
    std::vector<double> phases_x; // phi_k
    std::vector<double> phases_v; // psi_k

    double position_exponent() const { return (alpha + beta) / (1.0 + alpha); }

    void validate(int dim) const
    {
        if (!(alpha > 1.0 && alpha < 2.0))
            throw std::invalid_argument("drift: alpha must lie in (1,2), got " + std::to_string(alpha));
        if (!(amplitude > 0.0) && kind != DriftKind::zero && kind != DriftKind::constant)
            throw std::invalid_argument("drift: amplitude must be positive");
        if (kind == DriftKind::constant && c.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("drift: constant vector has wrong dimension");
        if (kind == DriftKind::separable_holder || kind == DriftKind::multiscale) {
            const double lo = beta_lower_bound(alpha), hi = beta_upper_bound(alpha);
            if (!(beta > lo && beta < hi))
                throw std::invalid_argument("drift: beta=" + std::to_string(beta) + " outside (" + std::to_string(lo)
                                            + ", " + std::to_string(hi) + ")");
        }
        if (kind == DriftKind::multiscale) {
            if (scales < 1) throw std::invalid_argument("drift: multiscale needs scales >= 1");
            if (phases_x.size() != static_cast<std::size_t>(scales + 1)
                || phases_v.size() != static_cast<std::size_t>(scales + 1))
                throw std::invalid_argument("drift: multiscale phase tables have wrong length");
            if (wx_.size() != phases_x.size()) throw std::invalid_argument("drift: multiscale weights not prepared");
        }
    }

    /// Sup-norm bound of |b(z)| (Euclidean over components).
    double sup_bound(int dim) const
    {
        switch (kind) {
        case DriftKind::zero: return 0.0;
        case DriftKind::constant: return euclidean_norm(c);
        default: return 2.0 * amplitude * std::sqrt(static_cast<double>(dim));
        }
    }

    /// f(x_j) scaled by A (or c_j for constant drift).
    double position_term(std::size_t j, double xj) const
    {
        switch (kind) {
        case DriftKind::zero: return 0.0;
        case DriftKind::constant: return c[j];
        case DriftKind::separable_holder: return amplitude * clipped_power(xj, position_exponent());
        case DriftKind::multiscale: {
            double s = 0.0;
            for (int k = 0; k <= scales; ++k)
                s += wx_[static_cast<std::size_t>(k)] * std::cos(std::ldexp(xj, k) + phases_x[static_cast<std::size_t>(k)]);
            return amplitude * s;
        }
        }
        return 0.0;
    }

    /// g(v_j) scaled by A.
    double velocity_term(std::size_t, double vj) const
    {
        switch (kind) {
        case DriftKind::zero:
        case DriftKind::constant: return 0.0;
        case DriftKind::separable_holder: return amplitude * clipped_power(vj, beta);
        case DriftKind::multiscale: {
            double s = 0.0;
            for (int k = 0; k <= scales; ++k)
                s += wv_[static_cast<std::size_t>(k)] * std::cos(std::ldexp(vj, k) + phases_v[static_cast<std::size_t>(k)]);
            return amplitude * s;
        }
        }
        return 0.0;
    }

    /// Precomputes the multiscale weights 2^{-k s} / sum_k 2^{-k s}.
    void prepare()
    {
        wx_.clear();
        wv_.clear();
        if (kind != DriftKind::multiscale) return;
        double tx = 0.0, tv = 0.0;
        for (int k = 0; k <= scales; ++k) {
            wx_.push_back(std::exp2(-k * position_exponent()));
            wv_.push_back(std::exp2(-k * beta));
            tx += wx_.back();
            tv += wv_.back();
        }
        for (auto& w : wx_) w /= tx;
        for (auto& w : wv_) w /= tv;
    }

private:
    std::vector<double> wx_;
    std::vector<double> wv_;
};

inline DriftSpec make_zero_drift(double alpha = 1.5, double beta = 0.6)
{
    DriftSpec s;
    s.kind = DriftKind::zero;
    s.alpha = alpha;
    s.beta = beta;
    return s;
}

inline DriftSpec make_constant_drift(std::vector<double> c, double alpha = 1.5, double beta = 0.6)
{
    DriftSpec s;
    s.kind = DriftKind::constant;
    s.c = std::move(c);
    s.alpha = alpha;
    s.beta = beta;
    return s;
}

inline DriftSpec make_separable_drift(double amplitude, double alpha, double beta)
{
    DriftSpec s;
    s.kind = DriftKind::separable_holder;
    s.amplitude = amplitude;
    s.alpha = alpha;
    s.beta = beta;
    s.validate(1);
    return s;
}

/// Weierstrass-type drift. Phases are drawn from the reserved phase stream of `seed`.
inline DriftSpec make_multiscale_drift(double amplitude, double alpha, double beta, int scales, std::uint64_t seed)
{
    DriftSpec s;
    s.kind = DriftKind::multiscale;
    s.amplitude = amplitude;
    s.alpha = alpha;
    s.beta = beta;
    s.scales = scales;
    RngStream rng(seed, kDriftPhaseStream);
    for (int k = 0; k <= scales; ++k) {
        s.phases_x.push_back(2.0 * std::numbers::pi * rng.uniform_open());
        s.phases_v.push_back(2.0 * std::numbers::pi * rng.uniform_open());
    }
    s.prepare();
    s.validate(1);
    return s;
}

inline void drift_eval(const DriftSpec& spec, std::span<const double> x, std::span<const double> v, std::span<double> out)
{
    if (x.size() != v.size() || out.size() != x.size()) throw std::invalid_argument("drift_eval: dimension mismatch");
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = spec.position_term(j, x[j]) + spec.velocity_term(j, v[j]);
}

inline std::vector<double> drift_eval(const DriftSpec& spec, const PhasePoint& z)
{
    std::vector<double> out(z.dim());
    drift_eval(spec, z.x, z.v, out);
    return out;
}

namespace detail {

inline void random_unit(RngStream& rng, std::span<double> out)
{
    double n = 0.0;
    do {
        n = 0.0;
        for (double& o : out) {
            o = rng.normal();
            n += o * o;
        }
    } while (n == 0.0);
    n = std::sqrt(n);
    for (double& o : out) o /= n;
}

inline double difference_norm(const DriftSpec& spec, const PhasePoint& a, const PhasePoint& b)
{
    const auto ba = drift_eval(spec, a);
    const auto bb = drift_eval(spec, b);
    double s = 0.0;
    for (std::size_t j = 0; j < ba.size(); ++j) s += (ba[j] - bb[j]) * (ba[j] - bb[j]);
    return std::sqrt(s);
}

} // namespace detail

/// Displacement geometry used by the seminorm probes.
enum class PairMode { mixed, position_only, velocity_only };

/**
 * Max of |b(z) - b(z')| / |z - z'|_a^exponent over n_pairs pairs whose
 * anisotropic separation is exactly `scale`. Base points are uniform in
 * [-box, box]^{2d}.
 */
inline double holder_ratio_at_scale(const DriftSpec& spec, int dim, double exponent, double scale, long n_pairs,
                                    double box, RngStream& rng, PairMode mode = PairMode::mixed)
{
    if (n_pairs < 1) throw std::invalid_argument("holder estimate needs n_pairs >= 1");
    const auto d = static_cast<std::size_t>(dim);
    double best = 0.0;
    std::vector<double> ux(d), uv(d);
    for (long p = 0; p < n_pairs; ++p) {
        PhasePoint z(d);
        for (std::size_t j = 0; j < d; ++j) {
            z.x[j] = box * (2.0 * rng.uniform_open() - 1.0);
            z.v[j] = box * (2.0 * rng.uniform_open() - 1.0);
        }
        // split the anisotropic budget between position and velocity
        double share = 0.5;
        if (mode == PairMode::mixed) share = rng.uniform_open();
        else if (mode == PairMode::position_only) share = 1.0;
        else share = 0.0;
        detail::random_unit(rng, ux);
        detail::random_unit(rng, uv);
        const double rx = std::pow(share * scale, 1.0 + spec.alpha);
        const double rv = (1.0 - share) * scale;
        PhasePoint z2 = z;
        for (std::size_t j = 0; j < d; ++j) {
            z2.x[j] += rx * ux[j];
            z2.v[j] += rv * uv[j];
        }
        const double dist = aniso_dist(z, z2, spec.alpha);
        if (!(dist > 0.0)) continue;
        best = std::max(best, detail::difference_norm(spec, z, z2) / std::pow(dist, exponent));
    }
    return best;
}

/// Lower bound on the anisotropic beta-Hoelder seminorm of b, sampling pairs
/// at separations 2^0, 2^-1, ..., 2^-12 (round robin).
inline double holder_seminorm_estimate(const DriftSpec& spec, int dim, long n_pairs, double box, RngStream& rng)
{
    if (n_pairs < 1) throw std::invalid_argument("holder estimate needs n_pairs >= 1");
    if (spec.kind == DriftKind::zero || spec.kind == DriftKind::constant) return 0.0;
    constexpr int kScales = 13;
    double best = 0.0;
    for (int s = 0; s < kScales; ++s) {
        const long share = n_pairs / kScales + (s < n_pairs % kScales ? 1 : 0);
        if (share == 0) continue;
        best = std::max(best, holder_ratio_at_scale(spec, dim, spec.beta, std::exp2(-s), share, box, rng));
    }
    return best;
}

} // namespace kinstab
