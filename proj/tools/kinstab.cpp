#include "cli_config.hpp"

#include "kinstab/diagnostics.hpp"
#include "kinstab/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace kinstab;

namespace {

fs::path prepare_out_dir(const cli::CliConfig& cfg)
{
    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out + "': " + ec.message());
    std::ofstream manifest(dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    manifest << cli::manifest_text(cfg);
    if (!manifest) throw std::runtime_error("cannot write manifest in '" + cfg.out + "'");
    return dir;
}

int run_rates(const cli::CliConfig& cfg)
{
    const auto dir = prepare_out_dir(cfg);
    const ExperimentConfig& e = cfg.experiment;
    const auto start = std::chrono::steady_clock::now();
    const PathErrors errors = compute_path_errors(e);
    const RateReport rep = summarize(e, errors, e.moment);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& r : rep.rows)
        std::printf("n=%ld error=%.6e stderr=%.3e median=%.6e\n", r.n, r.error, r.stderr_, r.median);
    std::printf("theoretical_rate=%.6f\n", rep.theoretical);
    if (rep.degenerate) {
        std::printf("slope=nan status=%s\n", rep.status().c_str());
    } else {
        std::printf("slope=%.6f ci=[%.6f,%.6f] r_squared=%.6f xi_hat=%.6e status=%s\n", rep.slope, rep.slope_lo,
                    rep.slope_hi, rep.r_squared, rep.xi_hat, rep.status().c_str());
    }
    std::printf("paths=%ld threads=%d seconds=%.1f\n", rep.paths, e.threads, seconds);

    write_csv(rep, (dir / "rates.csv").string());
    write_summary_csv(rep, (dir / "summary.csv").string());
    return 0;
}

int run_simulate(const cli::CliConfig& cfg)
{
    const auto dir = prepare_out_dir(cfg);
    const ExperimentConfig& e = cfg.experiment;
    RngStream rng(e.seed, 0);
    const MasterPath master = build_master_path(e.n_fine, StableParams{e.alpha, e.dim()}, rng);

    std::vector<Trajectory> runs;
    for (long n : e.n_list) runs.push_back(run_euler(SchemeConfig{n, e.m_quad}, master, e.drift, e.z0));
    runs.push_back(run_reference(master, e.drift, e.z0));

    const std::string path = (dir / "trajectory.csv").string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "n,i,t";
    for (int j = 0; j < e.dim(); ++j) out << ",x" << j;
    for (int j = 0; j < e.dim(); ++j) out << ",v" << j;
    out << "\n";
    char buf[64];
    for (const auto& traj : runs) {
        for (long i = 0; i <= traj.n(); ++i) {
            std::snprintf(buf, sizeof buf, "%ld,%ld,%.10f", traj.n(), i, traj.time(i));
            out << buf;
            for (double x : traj.X(i)) {
                std::snprintf(buf, sizeof buf, ",%.17g", x);
                out << buf;
            }
            for (double v : traj.V(i)) {
                std::snprintf(buf, sizeof buf, ",%.17g", v);
                out << buf;
            }
            out << "\n";
        }
    }
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
    for (std::size_t k = 0; k + 1 < runs.size(); ++k)
        std::printf("n=%ld sup_error=%.6e\n", runs[k].n(), sup_node_error(runs.back(), runs[k]));
    return 0;
}

int emit_diagnostics(const cli::CliConfig& cfg, const std::vector<DiagnosticRow>& rows, const char* file)
{
    if (cfg.out.empty()) {
        std::cout << diagnostics_csv(rows);
    } else {
        const auto dir = prepare_out_dir(cfg);
        write_diagnostics_csv(rows, (dir / file).string());
    }
    const auto passed = std::ranges::count_if(rows, [](const DiagnosticRow& r) { return r.pass; });
    std::fprintf(stderr, "%ld/%zu checks passed\n", static_cast<long>(passed), rows.size());
    return 0;
}

int run_diagnose_noise(const cli::CliConfig& cfg)
{
    const double alpha = cfg.alpha;
    const int dim = cfg.dim;
    const long m = cfg.samples;
    std::uint64_t stream = 1000;
    auto next = [&] { return RngStream(cfg.seed, stream++); };

    std::vector<DiagnosticRow> rows;
    for (double xi : {0.5, 1.0, 2.0}) {
        auto rng = next();
        rows.push_back(cf_check(alpha, dim, xi, m, rng));
    }
    for (double xi : {0.5, 1.0, 2.0}) {
        auto rng = next();
        rows.push_back(symmetry_check(alpha, dim, xi, m, rng));
    }
    {
        auto rng = next();
        rows.push_back(laplace_check(alpha / 2.0, 1.0, m, rng));
    }
    {
        auto rng = next();
        rows.push_back(self_similarity_check(alpha, dim, 0.25, m, rng));
    }
    {
        // the tail regression is only meaningful with enough exceedances above x=50
        auto rng = next();
        rows.push_back(tail_index_check(alpha, dim, std::max(m, 1000000L), rng));
    }
    {
        auto rng = next();
        rows.push_back(noise_moment_check(alpha, dim, 1.0, 2.0, m, rng));
    }
    const long n_paths = std::min(m, 10000L);
    const StableParams params{alpha, dim};
    const auto paths = build_paths(n_paths, 4096, params, cfg.seed + 1, cfg.threads);
    rows.push_back(kinetic_moment_check(paths, cfg.beta, 2.0));
    const auto fresh = build_paths(n_paths, 4096, params, cfg.seed + 2, cfg.threads);
    rows.push_back(shift_markov_check(paths, fresh, 0.25, 0.75));
    return emit_diagnostics(cfg, rows, "diagnostics.csv");
}

int run_diagnose_drift(const cli::CliConfig& cfg)
{
    const DriftSpec& spec = cfg.experiment.drift;
    const int dim = cfg.dim;
    std::vector<DiagnosticRow> rows;
    RngStream rng(cfg.seed, 2000);
    rows.push_back(drift_bound_check(spec, dim, 1000000, 10.0, rng));
    for (auto& r : holder_stability_check(spec, dim, 4.0, cfg.seed)) rows.push_back(r);
    if (spec.kind == DriftKind::multiscale)
        for (auto& r : regularity_witness_check(spec, dim, cfg.seed)) rows.push_back(r);
    if (spec.kind == DriftKind::separable_holder) {
        RngStream odd(cfg.seed, 2001);
        rows.push_back(oddness_check(spec, dim, 100000, 10.0, odd));
    }
    return emit_diagnostics(cfg, rows, "drift_diagnostics.csv");
}

} // namespace

int main(int argc, char** argv)
{
    cli::CliConfig cfg;
    try {
        cfg = cli::parse_config(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const cli::HelpRequested& help) {
        std::cout << help.what();
        return 0;
    } catch (const cli::ConfigError& err) {
        std::string msg = err.what();
        std::ranges::replace(msg, '\n', ' ');
        std::fprintf(stderr, "error: config: %s\n", msg.c_str());
        return 2;
    }
    try {
        if (cfg.subcommand == "rates") return run_rates(cfg);
        if (cfg.subcommand == "simulate") return run_simulate(cfg);
        if (cfg.subcommand == "diagnose-noise") return run_diagnose_noise(cfg);
        return run_diagnose_drift(cfg);
    } catch (const std::exception& err) {
        std::string msg = err.what();
        std::ranges::replace(msg, '\n', ' ');
        std::fprintf(stderr, "error: runtime: %s\n", msg.c_str());
        return 3;
    }
}
