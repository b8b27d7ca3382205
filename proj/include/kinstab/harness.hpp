#pragma once

// Monte Carlo strong-error estimation against the coupled fine-grid reference,
// log-log rate regression with path bootstrap, and CSV output.

#include "drifts.hpp"
#include "kinetic_path.hpp"
#include "parallel.hpp"
#include "scheme.hpp"
#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinstab {

/// 1/2 + min(beta / (alpha (1 + alpha)), 1/2).
inline double theoretical_rate(double alpha, double beta)
{
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("theoretical_rate: alpha must lie in (1,2), got " + std::to_string(alpha));
    if (!(beta > beta_lower_bound(alpha) && beta < (alpha - 1.0) * (1.0 + alpha)))
        throw std::invalid_argument("theoretical_rate: beta=" + std::to_string(beta) + " outside ("
                                    + std::to_string(beta_lower_bound(alpha)) + ", "
                                    + std::to_string((alpha - 1.0) * (1.0 + alpha)) + ")");
    return 0.5 + std::min(beta / (alpha * (1.0 + alpha)), 0.5);
}

/// Same exponent without the admissibility check; for hypothetical parameters.
inline double rate_exponent(double alpha, double beta) { return 0.5 + std::min(beta / (alpha * (1.0 + alpha)), 0.5); }

/// Absolute error below which a run is flagged as reproducing the solution exactly.
inline constexpr double kExactTolerance = 1e-9;
inline constexpr double kXiEpsilon = 0.05;
inline constexpr int kBootstrapResamples = 500;

struct ExperimentConfig {
    double alpha = 1.5;
    double beta = 0.6;
    DriftSpec drift = make_zero_drift();
    std::vector<long> n_list{16, 32, 64, 128, 256, 512};
    long n_fine = 8192;
    long paths = 2000;
    double moment = 2.0;
    std::uint64_t seed = 42;
    PhasePoint z0{std::vector<double>{0.0}, std::vector<double>{0.0}};
    long m_quad = 0; ///< 0 = n_fine / n for coarse runs, 1 for the reference
    int threads = 1;

    int dim() const { return static_cast<int>(z0.dim()); }

    void validate() const
    {
        StableParams{alpha, dim()};
        if (!(alpha < 2.0)) throw std::invalid_argument("experiment: alpha must lie in (1,2)");
        require_power_of_two(n_fine);
        if (n_list.empty()) throw std::invalid_argument("experiment: n_list is empty");
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            const long n = n_list[i];
            if (n < 1 || n_fine % n != 0)
                throw std::invalid_argument("experiment: n=" + std::to_string(n) + " does not divide n_fine="
                                            + std::to_string(n_fine));
            if (i > 0 && n <= n_list[i - 1]) throw std::invalid_argument("experiment: n_list must be strictly increasing");
        }
        if (n_list.back() > n_fine / 8)
            throw std::invalid_argument("experiment: max(n_list)=" + std::to_string(n_list.back())
                                        + " exceeds n_fine/8=" + std::to_string(n_fine / 8));
        if (paths < 2) throw std::invalid_argument("experiment: paths must be >= 2");
        if (!(moment >= 1.0)) throw std::invalid_argument("experiment: moment must be >= 1");
        if (threads < 1) throw std::invalid_argument("experiment: threads must be >= 1");
        if (m_quad < 0) throw std::invalid_argument("experiment: quadrature nodes must be >= 1");
        if (drift.alpha != alpha) throw std::invalid_argument("experiment: drift alpha differs from noise alpha");
        drift.validate(dim());
    }
};

/// e_{p,n}: sup-node error of path p at coarse level n (row-major paths x levels).
struct PathErrors {
    long paths = 0;
    std::size_t levels = 0;
    std::vector<double> values;

    double at(long p, std::size_t k) const { return values[static_cast<std::size_t>(p) * levels + k]; }
};

/// Simulates every path and records the coarse-vs-reference errors.
/// Path p always uses stream (seed, p), so the result is independent of threads.
inline PathErrors compute_path_errors(const ExperimentConfig& cfg)
{
    cfg.validate();
    PathErrors out;
    out.paths = cfg.paths;
    out.levels = cfg.n_list.size();
    out.values.assign(static_cast<std::size_t>(cfg.paths) * out.levels, 0.0);
    const StableParams params{cfg.alpha, cfg.dim()};
    parallel_for(cfg.paths, cfg.threads, [&](long p) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(p));
        const MasterPath master = build_master_path(cfg.n_fine, params, rng);
        const Trajectory ref = run_reference(master, cfg.drift, cfg.z0);
        for (std::size_t k = 0; k < out.levels; ++k) {
            const Trajectory coarse = run_euler(SchemeConfig{cfg.n_list[k], cfg.m_quad}, master, cfg.drift, cfg.z0);
            out.values[static_cast<std::size_t>(p) * out.levels + k] = sup_node_error(ref, coarse);
        }
    });
    return out;
}

struct RateRow {
    long n = 0;
    double error = 0.0;  ///< (mean_p e^m)^{1/m}
    double stderr_ = 0.0; ///< bootstrap standard error
    double median = 0.0; ///< median path error
};

struct RateReport {
    double alpha = 0.0;
    double beta = 0.0;
    DriftKind drift_kind = DriftKind::zero;
    long n_fine = 0;
    long paths = 0;
    double moment = 2.0;
    std::uint64_t seed = 0;

    std::vector<RateRow> rows;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double slope_lo = std::numeric_limits<double>::quiet_NaN();
    double slope_hi = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    double theoretical = 0.0;
    double xi_hat = 0.0;
    bool degenerate = false; ///< every error below kExactTolerance
    int inversions = 0;      ///< count of n where the error increased
    bool non_monotone = false;

    std::string status() const
    {
        if (degenerate) return "degenerate: exact";
        if (non_monotone) return "non-monotone decay";
        return "ok";
    }
};

/// OLS of -log(error) on log(n). Requires >= 3 rows, all positive.
inline LinearFit fit_rate(std::span<const long> ns, std::span<const double> errors)
{
    if (ns.size() != errors.size()) throw std::invalid_argument("fit_rate: size mismatch");
    if (ns.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 rows");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(errors[i] > 0.0)) throw std::invalid_argument("fit_rate: non-positive error (degenerate run)");
        xs.push_back(std::log(static_cast<double>(ns[i])));
        ys.push_back(-std::log(errors[i]));
    }
    return least_squares(xs, ys);
}

inline LinearFit fit_rate(std::span<const RateRow> rows)
{
    std::vector<long> ns;
    std::vector<double> es;
    for (const auto& r : rows) {
        ns.push_back(r.n);
        es.push_back(r.error);
    }
    return fit_rate(ns, es);
}

namespace detail {

inline std::vector<double> moment_errors(const PathErrors& e, std::span<const long> sample, double moment)
{
    std::vector<double> out(e.levels, 0.0);
    for (long p : sample)
        for (std::size_t k = 0; k < e.levels; ++k) out[k] += std::pow(e.at(p, k), moment);
    for (auto& v : out) v = std::pow(v / static_cast<double>(sample.size()), 1.0 / moment);
    return out;
}

} // namespace detail

/// Aggregates path errors into a report: L_m errors, bootstrap (over paths)
/// standard errors and slope interval, and the a.s. normalized-error diagnostic.
inline RateReport summarize(const ExperimentConfig& cfg, const PathErrors& errors, double moment)
{
    RateReport rep;
    rep.alpha = cfg.alpha;
    rep.beta = cfg.beta;
    rep.drift_kind = cfg.drift.kind;
    rep.n_fine = cfg.n_fine;
    rep.paths = errors.paths;
    rep.moment = moment;
    rep.seed = cfg.seed;
    rep.theoretical = theoretical_rate(cfg.alpha, cfg.beta);

    std::vector<long> all(static_cast<std::size_t>(errors.paths));
    for (long p = 0; p < errors.paths; ++p) all[static_cast<std::size_t>(p)] = p;
    const auto point = detail::moment_errors(errors, all, moment);

    std::vector<std::vector<double>> boot_errors(errors.levels);
    std::vector<double> boot_slopes;
    RngStream rng(cfg.seed, kBootstrapStream);
    std::vector<long> sample(all.size());
    const bool degenerate = *std::ranges::max_element(point) <= kExactTolerance;
    for (int b = 0; b < kBootstrapResamples; ++b) {
        for (auto& s : sample) s = static_cast<long>(rng.below(static_cast<std::uint64_t>(errors.paths)));
        const auto est = detail::moment_errors(errors, sample, moment);
        for (std::size_t k = 0; k < errors.levels; ++k) boot_errors[k].push_back(est[k]);
        if (!degenerate && errors.levels >= 3 && std::ranges::all_of(est, [](double e) { return e > 0.0; }))
            boot_slopes.push_back(fit_rate(cfg.n_list, est).slope);
    }

    for (std::size_t k = 0; k < errors.levels; ++k) {
        std::vector<double> col;
        col.reserve(static_cast<std::size_t>(errors.paths));
        for (long p = 0; p < errors.paths; ++p) col.push_back(errors.at(p, k));
        rep.rows.push_back({cfg.n_list[k], point[k], sample_stddev(boot_errors[k]), median(std::move(col))});
    }

    for (std::size_t k = 1; k < rep.rows.size(); ++k)
        if (rep.rows[k].error > rep.rows[k - 1].error) ++rep.inversions;

    rep.degenerate = degenerate;
    if (!degenerate) {
        rep.non_monotone = rep.inversions > 1;
        if (rep.rows.size() >= 3) {
            const LinearFit fit = fit_rate(rep.rows);
            rep.slope = fit.slope;
            rep.intercept = fit.intercept;
            rep.r_squared = fit.r_squared;
        }
        if (!boot_slopes.empty()) {
            rep.slope_lo = quantile(boot_slopes, 0.025);
            rep.slope_hi = quantile(boot_slopes, 0.975);
        }
    }
    const double exponent = rep.theoretical - 2.0 * kXiEpsilon;
    for (const auto& r : rep.rows)
        rep.xi_hat = std::max(rep.xi_hat, r.error * std::pow(static_cast<double>(r.n), exponent));
    return rep;
}

inline RateReport strong_error_experiment(const ExperimentConfig& cfg)
{
    const PathErrors errors = compute_path_errors(cfg);
    return summarize(cfg, errors, cfg.moment);
}

inline constexpr const char* kRateHeader = "alpha,beta,drift_kind,n,n_fine,paths,moment,error,stderr,seed";
inline constexpr const char* kSummaryHeader = "slope,slope_lo,slope_hi,theoretical_rate,xi_hat,r_squared";
inline constexpr const char* kDiagnosticsHeader = "test,param,value,expected,tolerance,pass";

namespace detail {

inline std::string fmt_real(double v, const char* spec = "%.10e")
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::ofstream open_for_write(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

inline void finish(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace detail

inline std::string rate_csv(const RateReport& rep)
{
    std::string s = std::string(kRateHeader) + "\n";
    for (const auto& r : rep.rows) {
        s += detail::fmt_real(rep.alpha, "%.6f") + "," + detail::fmt_real(rep.beta, "%.6f") + ","
             + std::string(to_string(rep.drift_kind)) + "," + std::to_string(r.n) + "," + std::to_string(rep.n_fine)
             + "," + std::to_string(rep.paths) + "," + detail::fmt_real(rep.moment, "%.6f") + ","
             + detail::fmt_real(r.error) + "," + detail::fmt_real(r.stderr_) + "," + std::to_string(rep.seed) + "\n";
    }
    return s;
}

inline std::string summary_csv(const RateReport& rep)
{
    return std::string(kSummaryHeader) + "\n" + detail::fmt_real(rep.slope, "%.6f") + ","
           + detail::fmt_real(rep.slope_lo, "%.6f") + "," + detail::fmt_real(rep.slope_hi, "%.6f") + ","
           + detail::fmt_real(rep.theoretical, "%.6f") + "," + detail::fmt_real(rep.xi_hat) + ","
           + detail::fmt_real(rep.r_squared, "%.6f") + "\n";
}

/// Per-n rate rows. Deterministic formatting, fixed column order.
inline void write_csv(const RateReport& rep, const std::string& path)
{
    auto out = detail::open_for_write(path);
    out << rate_csv(rep);
    detail::finish(out, path);
}

inline void write_summary_csv(const RateReport& rep, const std::string& path)
{
    auto out = detail::open_for_write(path);
    out << summary_csv(rep);
    detail::finish(out, path);
}

struct DiagnosticRow {
    std::string test;
    std::string param;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline std::string diagnostics_csv(std::span<const DiagnosticRow> rows)
{
    std::string s = std::string(kDiagnosticsHeader) + "\n";
    for (const auto& r : rows)
        s += r.test + "," + r.param + "," + detail::fmt_real(r.value, "%.8f") + ","
             + detail::fmt_real(r.expected, "%.8f") + "," + detail::fmt_real(r.tolerance, "%.8f") + ","
             + (r.pass ? "true" : "false") + "\n";
    return s;
}

inline void write_diagnostics_csv(std::span<const DiagnosticRow> rows, const std::string& path)
{
    auto out = detail::open_for_write(path);
    out << diagnostics_csv(rows);
    detail::finish(out, path);
}

} // namespace kinstab
