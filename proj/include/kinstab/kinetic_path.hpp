#pragma once

// Kinetic noise M_t = (int_0^t L_r dr, L_t) sampled on a dyadic master grid,
// together with the shear transport Gamma_t(x,v) = (x + t v, v), the grid map
// k_n and the anisotropic distance.

#include "alpha_stable.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinstab {

struct PhasePoint {
    std::vector<double> x;
    std::vector<double> v;

    PhasePoint() = default;
    explicit PhasePoint(std::size_t dim) : x(dim, 0.0), v(dim, 0.0) {}
    PhasePoint(std::vector<double> x_, std::vector<double> v_) : x(std::move(x_)), v(std::move(v_))
    {
        if (x.size() != v.size()) throw std::invalid_argument("PhasePoint: position and velocity dimensions differ");
    }

    std::size_t dim() const noexcept { return x.size(); }
    bool operator==(const PhasePoint&) const = default;
};

/// Gamma_t z = (x + t v, v).
inline PhasePoint gamma_shift(double t, const PhasePoint& z)
{
    PhasePoint out = z;
    for (std::size_t j = 0; j < z.dim(); ++j) out.x[j] = z.x[j] + t * z.v[j];
    return out;
}

/// k_n(t) = floor(n t) / n.
inline double grid_map_kn(double t, long n)
{
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("grid_map_kn: t must lie in [0,1]");
    if (n < 1) throw std::invalid_argument("grid_map_kn: n must be >= 1");
    const double nd = static_cast<double>(n);
    return std::floor(nd * t) / nd;
}

inline double euclidean_norm(std::span<const double> a)
{
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

/// |x - x'|^{1/(1+alpha)} + |v - v'|.
inline double aniso_dist(const PhasePoint& z, const PhasePoint& z2, double alpha)
{
    if (z.x.size() != z2.x.size() || z.v.size() != z2.v.size() || z.x.size() != z.v.size())
        throw std::invalid_argument("aniso_dist: dimension mismatch");
    double dx = 0.0, dv = 0.0;
    for (std::size_t j = 0; j < z.x.size(); ++j) {
        dx += (z.x[j] - z2.x[j]) * (z.x[j] - z2.x[j]);
        dv += (z.v[j] - z2.v[j]) * (z.v[j] - z2.v[j]);
    }
    return std::pow(std::sqrt(dx), 1.0 / (1.0 + alpha)) + std::sqrt(dv);
}

/// Anisotropic size of a displacement (dx, dv) given as raw arrays.
inline double aniso_norm(std::span<const double> dx, std::span<const double> dv, double alpha)
{
    return std::pow(euclidean_norm(dx), 1.0 / (1.0 + alpha)) + euclidean_norm(dv);
}

/**
 * One realization of the kinetic noise on t_i = i / n_fine, i = 0..n_fine.
 *
 * L and I are stored as two flat row-major arrays of (n_fine + 1) x dim.
 * I is the cumulative trapezoid integral of L, so coarse grids that divide
 * n_fine read exact restrictions of both.
 */
class MasterPath {
public:
    MasterPath(long n_fine, double alpha, int dim)
        : n_fine_(n_fine), alpha_(alpha), dim_(dim),
          L_(static_cast<std::size_t>((n_fine + 1) * dim), 0.0),
          I_(static_cast<std::size_t>((n_fine + 1) * dim), 0.0)
    {
    }

    long n_fine() const noexcept { return n_fine_; }
    double alpha() const noexcept { return alpha_; }
    int dim() const noexcept { return dim_; }
    double step() const noexcept { return 1.0 / static_cast<double>(n_fine_); }
    double time(long i) const noexcept { return static_cast<double>(i) / static_cast<double>(n_fine_); }

    std::span<const double> L(long i) const { return {L_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<const double> I(long i) const { return {I_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<double> L(long i) { return {L_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<double> I(long i) { return {I_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }

    /// M at node i as a phase point (I_i, L_i).
    PhasePoint node(long i) const
    {
        auto x = I(i);
        auto v = L(i);
        return {std::vector<double>(x.begin(), x.end()), std::vector<double>(v.begin(), v.end())};
    }

    /// Fine-grid index of time t; throws if t is not a grid point.
    long index_of(double t) const
    {
        const double scaled = t * static_cast<double>(n_fine_);
        const double r = std::round(scaled);
        if (!(t >= 0.0 && t <= 1.0) || std::abs(scaled - r) > 1e-9 * std::max(1.0, scaled))
            throw std::invalid_argument("time " + std::to_string(t) + " is not on the master grid");
        return static_cast<long>(r);
    }

    /// Recomputes I from L with the cumulative trapezoid rule.
    void integrate()
    {
        const double half_h = 0.5 * step();
        for (int j = 0; j < dim_; ++j) I_[j] = 0.0;
        for (long i = 0; i < n_fine_; ++i) {
            const double* l0 = L_.data() + i * dim_;
            const double* l1 = l0 + dim_;
            const double* i0 = I_.data() + i * dim_;
            double* i1 = I_.data() + (i + 1) * dim_;
            for (int j = 0; j < dim_; ++j) i1[j] = i0[j] + half_h * (l0[j] + l1[j]);
        }
    }

private:
    long n_fine_;
    double alpha_;
    int dim_;
    std::vector<double> L_;
    std::vector<double> I_;
};

inline void require_power_of_two(long n_fine)
{
    if (n_fine < 2 || !std::has_single_bit(static_cast<std::uint64_t>(n_fine)))
        throw std::invalid_argument("n_fine must be a power of two >= 2, got " + std::to_string(n_fine));
}

/// Builds a master path from explicit increments (n_fine rows of dim values).
inline MasterPath master_path_from_increments(long n_fine, double alpha, int dim, std::span<const double> increments)
{
    require_power_of_two(n_fine);
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (increments.size() != static_cast<std::size_t>(n_fine * dim))
        throw std::invalid_argument("expected n_fine * dim increments");
    MasterPath path(n_fine, alpha, dim);
    for (long i = 0; i < n_fine; ++i) {
        auto prev = path.L(i);
        auto next = path.L(i + 1);
        for (int j = 0; j < dim; ++j) next[j] = prev[j] + increments[static_cast<std::size_t>(i * dim + j)];
    }
    path.integrate();
    return path;
}

inline MasterPath build_master_path(long n_fine, const StableParams& params, RngStream& rng)
{
    require_power_of_two(n_fine);
    params.validate();
    MasterPath path(n_fine, params.alpha, params.dim);
    const double h = path.step();
    std::vector<double> dl(static_cast<std::size_t>(params.dim));
    for (long i = 0; i < n_fine; ++i) {
        sample_isotropic_stable_increment(params, h, rng, dl);
        auto prev = path.L(i);
        auto next = path.L(i + 1);
        for (int j = 0; j < params.dim; ++j) next[j] = prev[j] + dl[static_cast<std::size_t>(j)];
    }
    path.integrate();
    return path;
}

/// Keeps every factor-th node of L and re-integrates I on the coarser grid.
inline MasterPath restrict_master_path(const MasterPath& fine, long factor)
{
    if (factor < 1 || fine.n_fine() % factor != 0) throw std::invalid_argument("restriction factor must divide n_fine");
    const long n = fine.n_fine() / factor;
    require_power_of_two(n);
    MasterPath coarse(n, fine.alpha(), fine.dim());
    for (long i = 0; i <= n; ++i) std::ranges::copy(fine.L(i * factor), coarse.L(i).begin());
    coarse.integrate();
    return coarse;
}

/// M_t - Gamma_{t-s} M_s = (I_t - I_s - (t-s) L_s, L_t - L_s) for fine indices s <= t.
inline PhasePoint kinetic_increment(const MasterPath& path, long s_idx, long t_idx)
{
    const double gap = path.time(t_idx) - path.time(s_idx);
    PhasePoint out(static_cast<std::size_t>(path.dim()));
    for (int j = 0; j < path.dim(); ++j) {
        out.x[j] = path.I(t_idx)[j] - path.I(s_idx)[j] - gap * path.L(s_idx)[j];
        out.v[j] = path.L(t_idx)[j] - path.L(s_idx)[j];
    }
    return out;
}

/// Empirical L_p(Omega) norm of |M_t - Gamma_{t-s} M_s|_a^gamma ^ 1 over paths.
inline double moment_diagnostic(std::span<const MasterPath> paths, double s, double t, double gamma, double p)
{
    if (paths.empty()) throw std::invalid_argument("moment_diagnostic needs at least one path");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    if (!(s <= t)) throw std::invalid_argument("moment_diagnostic requires s <= t");
    double acc = 0.0;
    for (const auto& path : paths) {
        const long si = path.index_of(s);
        const long ti = path.index_of(t);
        const PhasePoint m = kinetic_increment(path, si, ti);
        const double size = aniso_norm(m.x, m.v, path.alpha());
        acc += std::pow(std::min(std::pow(size, gamma), 1.0), p);
    }
    return std::pow(acc / static_cast<double>(paths.size()), 1.0 / p);
}

} // namespace kinstab
