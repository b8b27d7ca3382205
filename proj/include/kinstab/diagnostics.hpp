#pragma once

// Distributional checks for the noise samplers and regularity checks for the
// drift families. Each check produces one DiagnosticRow.

#include "alpha_stable.hpp"
#include "drifts.hpp"
#include "harness.hpp"
#include "kinetic_path.hpp"
#include "stats.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace kinstab {

inline std::string param_str(const char* name, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%g", name, v);
    return buf;
}

/// First coordinates of `count` independent increments of L over [0, t].
inline std::vector<double> sample_stable_values(double alpha, int dim, double t, long count, RngStream& rng)
{
    const StableParams params{alpha, dim};
    std::vector<double> buf(static_cast<std::size_t>(dim)), out;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        sample_isotropic_stable_increment(params, t, rng, buf);
        out.push_back(buf[0]);
    }
    return out;
}

/// |empirical CF(xi e_1) - exp(-|xi|^alpha)| from `count` draws of L_1.
inline DiagnosticRow cf_check(double alpha, int dim, double xi, long count, RngStream& rng, double tol = 0.01)
{
    const auto s = sample_stable_values(alpha, dim, 1.0, count, rng);
    const auto cf = empirical_cf(s, xi);
    const double exact = std::exp(-std::pow(std::abs(xi), alpha));
    const double err = std::abs(cf - std::complex<double>(exact, 0.0));
    return {"cf", param_str("alpha", alpha) + ";" + param_str("xi", xi), cf.real(), exact, tol, err <= tol};
}

/// |Im empirical CF| <= 3 / sqrt(M).
inline DiagnosticRow symmetry_check(double alpha, int dim, double xi, long count, RngStream& rng)
{
    const auto s = sample_stable_values(alpha, dim, 1.0, count, rng);
    const double im = std::abs(empirical_cf(s, xi).imag());
    const double tol = 3.0 / std::sqrt(static_cast<double>(count));
    return {"cf_symmetry", param_str("alpha", alpha) + ";" + param_str("xi", xi), im, 0.0, tol, im <= tol};
}

/// Mean of exp(-lambda S) for the one-sided stable law of index a.
inline DiagnosticRow laplace_check(double a, double lambda, long count, RngStream& rng, double tol = 0.01)
{
    double acc = 0.0;
    for (long i = 0; i < count; ++i) acc += std::exp(-lambda * sample_one_sided_stable(a, rng));
    const double mean = acc / static_cast<double>(count);
    const double exact = std::exp(-std::pow(lambda, a));
    return {"laplace", param_str("a", a) + ";" + param_str("lambda", lambda), mean, exact, tol,
            std::abs(mean - exact) <= tol};
}

/// Two-sample KS distance between L_t and t^{1/alpha} L_1.
inline DiagnosticRow self_similarity_check(double alpha, int dim, double t, long count, RngStream& rng,
                                           double tol = 0.02)
{
    auto lt = sample_stable_values(alpha, dim, t, count, rng);
    auto l1 = sample_stable_values(alpha, dim, 1.0, count, rng);
    const double scale = std::pow(t, 1.0 / alpha);
    for (double& v : l1) v *= scale;
    const double d = ks_two_sample(std::move(lt), std::move(l1));
    return {"self_similarity", param_str("alpha", alpha) + ";" + param_str("t", t), d, 0.0, tol, d <= tol};
}

/// Slope of log P(|L_1| > x) against log x over x in [x_lo, x_hi].
inline double tail_slope(double alpha, int dim, long count, RngStream& rng, double x_lo = 2.0, double x_hi = 50.0,
                         int points = 20)
{
    const StableParams params{alpha, dim};
    std::vector<double> norms, buf(static_cast<std::size_t>(dim));
    norms.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        sample_isotropic_stable_increment(params, 1.0, rng, buf);
        norms.push_back(euclidean_norm(buf));
    }
    std::ranges::sort(norms);
    std::vector<double> xs, ys;
    for (int k = 0; k < points; ++k) {
        const double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(k) / (points - 1));
        const auto above = norms.end() - std::upper_bound(norms.begin(), norms.end(), x);
        if (above == 0) continue;
        xs.push_back(std::log(x));
        ys.push_back(std::log(static_cast<double>(above) / static_cast<double>(count)));
    }
    return least_squares(xs, ys).slope;
}

inline DiagnosticRow tail_index_check(double alpha, int dim, long count, RngStream& rng, double tol = 0.15)
{
    const double slope = tail_slope(alpha, dim, count, rng);
    return {"tail_index", param_str("alpha", alpha), slope, -alpha, tol, std::abs(slope + alpha) <= tol};
}

/// Dyadic times 2^-10 .. 2^-3.
inline std::vector<double> dyadic_gaps()
{
    std::vector<double> g;
    for (int k = 10; k >= 3; --k) g.push_back(std::exp2(-k));
    return g;
}

/// Log-log slope of || |L_t|^gamma ^ 1 ||_{L_p} over dyadic t; one-sided check
/// slope >= min(gamma/alpha, 1/p) - tol.
inline DiagnosticRow noise_moment_check(double alpha, int dim, double gamma, double p, long count, RngStream& rng,
                                        double tol = 0.1)
{
    const StableParams params{alpha, dim};
    std::vector<double> xs, ys, buf(static_cast<std::size_t>(dim));
    for (double t : dyadic_gaps()) {
        double acc = 0.0;
        for (long i = 0; i < count; ++i) {
            sample_isotropic_stable_increment(params, t, rng, buf);
            acc += std::pow(std::min(std::pow(euclidean_norm(buf), gamma), 1.0), p);
        }
        xs.push_back(std::log(t));
        ys.push_back(std::log(std::pow(acc / static_cast<double>(count), 1.0 / p)));
    }
    const double slope = least_squares(xs, ys).slope;
    const double bound = std::min(gamma / alpha, 1.0 / p);
    return {"noise_moment", param_str("gamma", gamma) + ";" + param_str("p", p), slope, bound, tol,
            slope >= bound - tol};
}

inline std::vector<MasterPath> build_paths(long count, long n_fine, const StableParams& params, std::uint64_t seed,
                                           int threads = 1)
{
    std::vector<MasterPath> paths(static_cast<std::size_t>(count), MasterPath(1, params.alpha, params.dim));
    parallel_for(count, threads, [&](long p) {
        RngStream rng(seed, static_cast<std::uint64_t>(p));
        paths[static_cast<std::size_t>(p)] = build_master_path(n_fine, params, rng);
    });
    return paths;
}

/// Log-log slope of moment_diagnostic over dyadic gaps t - s, starting at s.
inline double kinetic_moment_slope(std::span<const MasterPath> paths, double s, double gamma, double p)
{
    std::vector<double> xs, ys;
    for (double gap : dyadic_gaps()) {
        xs.push_back(std::log(gap));
        ys.push_back(std::log(moment_diagnostic(paths, s, s + gap, gamma, p)));
    }
    return least_squares(xs, ys).slope;
}

inline DiagnosticRow kinetic_moment_check(std::span<const MasterPath> paths, double gamma, double p, double tol = 0.1)
{
    const double alpha = paths.front().alpha();
    const double slope = kinetic_moment_slope(paths, 0.5, gamma, p);
    const double bound = std::min(gamma / alpha, 1.0 / p);
    return {"kinetic_moment", param_str("gamma", gamma) + ";" + param_str("p", p), slope, bound, tol,
            slope >= bound - tol};
}

/// KS distances, coordinate by coordinate, between M_t - Gamma_{t-s} M_s on
/// `shifted` and M_{t-s} on the independent `fresh` paths. Returns the worst one.
inline DiagnosticRow shift_markov_check(std::span<const MasterPath> shifted, std::span<const MasterPath> fresh, double s,
                                        double t, double significance = 0.01)
{
    const int dim = shifted.front().dim();
    double worst = 0.0;
    for (int coord = 0; coord < 2 * dim; ++coord) {
        std::vector<double> a, b;
        for (const auto& path : shifted) {
            const auto m = kinetic_increment(path, path.index_of(s), path.index_of(t));
            a.push_back(coord < dim ? m.x[coord] : m.v[coord - dim]);
        }
        for (const auto& path : fresh) {
            const auto m = path.node(path.index_of(t - s));
            b.push_back(coord < dim ? m.x[coord] : m.v[coord - dim]);
        }
        worst = std::max(worst, ks_two_sample(std::move(a), std::move(b)));
    }
    const double crit = ks_critical_two_sample(significance, shifted.size(), fresh.size());
    return {"shift_markov", param_str("s", s) + ";" + param_str("t", t), worst, 0.0, crit, worst <= crit};
}

/// sup |b(z)| over `count` uniform points in [-box, box]^{2d} against the documented bound.
inline DiagnosticRow drift_bound_check(const DriftSpec& spec, int dim, long count, double box, RngStream& rng)
{
    const auto d = static_cast<std::size_t>(dim);
    PhasePoint z(d);
    std::vector<double> out(d);
    double worst = 0.0;
    for (long i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            z.x[j] = box * (2.0 * rng.uniform_open() - 1.0);
            z.v[j] = box * (2.0 * rng.uniform_open() - 1.0);
        }
        drift_eval(spec, z.x, z.v, out);
        worst = std::max(worst, euclidean_norm(out));
    }
    const double bound = spec.sup_bound(dim);
    return {"drift_bound", std::string(to_string(spec.kind)), worst, bound, 0.0, worst <= bound * (1.0 + 1e-12)};
}

/// Seminorm estimates at growing sample sizes; passes when the largest sample
/// does not exceed 1.5x the smallest (no divergence).
inline std::vector<DiagnosticRow> holder_stability_check(const DriftSpec& spec, int dim, double box, std::uint64_t seed)
{
    std::vector<DiagnosticRow> rows;
    std::vector<double> est;
    for (long n : {1000L, 10000L, 100000L}) {
        RngStream rng(seed, static_cast<std::uint64_t>(n));
        est.push_back(holder_seminorm_estimate(spec, dim, n, box, rng));
        rows.push_back({"holder_seminorm", param_str("pairs", static_cast<double>(n)), est.back(),
                        spec.kind == DriftKind::separable_holder ? 4.0 * std::sqrt(static_cast<double>(dim)) : 0.0,
                        0.01, true});
        if (spec.kind == DriftKind::separable_holder) rows.back().pass = est.back() <= rows.back().expected + 0.01;
    }
    const double ratio = est.front() > 0.0 ? est.back() / est.front() : 1.0;
    rows.push_back({"holder_stability", "pairs=1e3..1e5", ratio, 1.0, 0.5, ratio <= 1.5});
    return rows;
}

/// Growth of the velocity difference quotient from separation 2^-4 to 2^-10,
/// with the given exponent in the denominator.
inline double regularity_growth(const DriftSpec& spec, int dim, double exponent, long pairs, std::uint64_t seed)
{
    RngStream r1(seed, 1), r2(seed, 2);
    const double coarse = holder_ratio_at_scale(spec, dim, exponent, std::exp2(-4), pairs, 4.0, r1, PairMode::velocity_only);
    const double fine = holder_ratio_at_scale(spec, dim, exponent, std::exp2(-10), pairs, 4.0, r2, PairMode::velocity_only);
    return fine / coarse;
}

inline std::vector<DiagnosticRow> regularity_witness_check(const DriftSpec& spec, int dim, std::uint64_t seed,
                                                           long pairs = 50000)
{
    const double sharp = regularity_growth(spec, dim, spec.beta, pairs, seed);
    const double rough = regularity_growth(spec, dim, spec.beta + 0.2, pairs, seed);
    return {{"regularity_bounded", param_str("exponent", spec.beta), sharp, 1.0, 1.0, sharp <= 2.0},
            {"regularity_diverges", param_str("exponent", spec.beta + 0.2), rough, 2.0, 0.0, rough >= 2.0}};
}

/// max |b(-z) + b(z)| for the odd family.
inline DiagnosticRow oddness_check(const DriftSpec& spec, int dim, long count, double box, RngStream& rng)
{
    const auto d = static_cast<std::size_t>(dim);
    PhasePoint z(d), mz(d);
    double worst = 0.0;
    for (long i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            z.x[j] = box * (2.0 * rng.uniform_open() - 1.0);
            z.v[j] = box * (2.0 * rng.uniform_open() - 1.0);
            mz.x[j] = -z.x[j];
            mz.v[j] = -z.v[j];
        }
        const auto a = drift_eval(spec, z), b = drift_eval(spec, mz);
        for (std::size_t j = 0; j < d; ++j) worst = std::max(worst, std::abs(a[j] + b[j]));
    }
    return {"oddness", std::string(to_string(spec.kind)), worst, 0.0, 0.0, worst == 0.0};
}

} // namespace kinstab
