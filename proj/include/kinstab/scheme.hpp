#pragma once

// Gamma-shifted Euler scheme for the kinetic SDE
//
//   dX = V dt,   dV = b(X, V) dt + dL,
//
// driven by a MasterPath. On each coarse step the drift is frozen at the left
// node and transported along the free flow:  b(X_k + u V_k, V_k), u in [0, h).
// The state is carried as drift parts (Y, W) with X = Y + I and V = W + L, so
// the noise enters only through exact restrictions of the master path.

#include "drifts.hpp"
#include "kinetic_path.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinstab {

struct SchemeConfig {
    long n = 16;
    long m_quad = 0; ///< in-step midpoint nodes; 0 selects n_fine / n

    long resolved_quad(const MasterPath& master) const { return m_quad > 0 ? m_quad : master.n_fine() / n; }

    void validate(const MasterPath& master) const
    {
        if (n < 1) throw std::invalid_argument("scheme: n must be >= 1");
        if (master.n_fine() % n != 0)
            throw std::invalid_argument("scheme: n=" + std::to_string(n) + " does not divide n_fine="
                                        + std::to_string(master.n_fine()));
        if (m_quad < 0) throw std::invalid_argument("scheme: m_quad must be >= 1");
    }
};

/// Scheme output at the coarse nodes t_i = i / n, i = 0..n.
class Trajectory {
public:
    Trajectory(long n, int dim)
        : n_(n), dim_(dim), X_(size(n, dim)), V_(size(n, dim)), W_(size(n, dim))
    {
    }

    long n() const noexcept { return n_; }
    int dim() const noexcept { return dim_; }
    double time(long i) const noexcept { return static_cast<double>(i) / static_cast<double>(n_); }

    std::span<const double> X(long i) const { return {X_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<const double> V(long i) const { return {V_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    /// V_i - L_{t_i}.
    std::span<const double> W(long i) const { return {W_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }

    std::span<double> X(long i) { return {X_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<double> V(long i) { return {V_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<double> W(long i) { return {W_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }

    PhasePoint point(long i) const
    {
        return {std::vector<double>(X(i).begin(), X(i).end()), std::vector<double>(V(i).begin(), V(i).end())};
    }

    bool operator==(const Trajectory&) const = default;

private:
    static std::size_t size(long n, int dim) { return static_cast<std::size_t>((n + 1) * dim); }

    long n_;
    int dim_;
    std::vector<double> X_;
    std::vector<double> V_;
    std::vector<double> W_;
};

inline Trajectory run_euler(const SchemeConfig& cfg, const MasterPath& master, const DriftSpec& spec,
                            const PhasePoint& z0)
{
    cfg.validate(master);
    const int dim = master.dim();
    if (z0.x.size() != static_cast<std::size_t>(dim) || z0.v.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("scheme: initial condition dimension does not match the master path");
    if (spec.kind == DriftKind::constant && spec.c.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("scheme: drift dimension does not match the master path");

    const long n = cfg.n;
    const long stride = master.n_fine() / n;
    const long m = cfg.resolved_quad(master);
    const double h = 1.0 / static_cast<double>(n);
    const double sub = h / static_cast<double>(m);

    Trajectory traj(n, dim);
    std::vector<double> y(z0.x), w(z0.v);

    for (long k = 0;; ++k) {
        const auto I = master.I(k * stride);
        const auto L = master.L(k * stride);
        auto X = traj.X(k);
        auto V = traj.V(k);
        auto W = traj.W(k);
        for (int j = 0; j < dim; ++j) {
            X[j] = y[j] + I[j];
            V[j] = w[j] + L[j];
            W[j] = w[j];
        }
        if (k == n) break;

        for (int j = 0; j < dim; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            const double gv = spec.velocity_term(ju, V[j]);
            double q = 0.0, Q = 0.0;
            for (long i = 0; i < m; ++i) {
                const double u = (static_cast<double>(i) + 0.5) * sub;
                const double f = spec.position_term(ju, X[j] + u * V[j]) + gv;
                q += f;
                Q += (h - u) * f;
            }
            q *= sub;
            Q *= sub;
            y[ju] += h * w[ju] + Q;
            w[ju] += q;
        }
    }
    return traj;
}

/// The scheme at the master resolution, used as the reference solution.
inline Trajectory run_reference(const MasterPath& master, const DriftSpec& spec, const PhasePoint& z0,
                                long m_quad = 1)
{
    return run_euler(SchemeConfig{master.n_fine(), m_quad}, master, spec, z0);
}

/// Closed-form solution at fine node i for zero and constant drift:
/// (xi + t eta + c t^2/2 + I_t, eta + c t + L_t).
inline PhasePoint exact_solution(const DriftSpec& spec, const MasterPath& master, const PhasePoint& z0, long i)
{
    if (spec.kind != DriftKind::zero && spec.kind != DriftKind::constant)
        throw std::invalid_argument("exact_solution: only zero and constant drifts have closed forms");
    if (i < 0 || i > master.n_fine()) throw std::out_of_range("exact_solution: node index out of range");
    const double t = master.time(i);
    PhasePoint out(static_cast<std::size_t>(master.dim()));
    for (int j = 0; j < master.dim(); ++j) {
        const double c = spec.kind == DriftKind::constant ? spec.c.at(static_cast<std::size_t>(j)) : 0.0;
        out.x[j] = z0.x[j] + t * z0.v[j] + 0.5 * c * t * t + master.I(i)[j];
        out.v[j] = z0.v[j] + c * t + master.L(i)[j];
    }
    return out;
}

/// max_i |Z^fine(t_i) - Z^coarse(t_i)| over the coarse nodes, Euclidean on R^{2d}.
inline double sup_node_error(const Trajectory& fine, const Trajectory& coarse)
{
    if (fine.dim() != coarse.dim() || fine.n() % coarse.n() != 0)
        throw std::invalid_argument("sup_node_error: incompatible trajectories");
    const long stride = fine.n() / coarse.n();
    double worst = 0.0;
    for (long i = 0; i <= coarse.n(); ++i) {
        double s = 0.0;
        for (int j = 0; j < fine.dim(); ++j) {
            const double dx = fine.X(i * stride)[j] - coarse.X(i)[j];
            const double dv = fine.V(i * stride)[j] - coarse.V(i)[j];
            s += dx * dx + dv * dv;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

} // namespace kinstab
