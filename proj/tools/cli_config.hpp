#pragma once

// Command-line and config-file handling for the kinstab tool.
//
// Config files are flat `key = value` text; keys are the long flag names
// without leading dashes (underscores accepted). Flags override file values.

#include "kinstab/harness.hpp"
#include "kinstab/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinstab::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Raised when --help was requested; carries the rendered help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for anything wrong with the requested configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    std::string subcommand;
    double alpha = 1.5;
    double beta = 0.6;
    std::string drift = "multiscale";
    double amplitude = 1.0;
    int scales = 16;
    std::vector<long> n_list{16, 32, 64, 128, 256, 512};
    long n_fine = 8192;
    long paths = 2000;
    double moment = 2.0;
    long quad = 0;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string out;
    int dim = 1;
    std::vector<double> z0; ///< 2*dim values (x then v); empty means the origin
    long samples = 100000;
    std::string config_path;

    /// Resolved experiment configuration; valid once parse_config returned.
    ExperimentConfig experiment;
};

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"rates", "simulate", "diagnose-noise", "diagnose-drift"};
    return names;
}

inline const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{"alpha", "beta",   "drift",  "amplitude", "scales", "n-list",
                                               "n-fine", "paths", "moment", "quad",      "seed",   "threads",
                                               "out",    "dim",   "z0",     "samples"};
    return keys;
}

inline std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

/// Parses `key = value` lines into flag/value pairs; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::ranges::replace(key, '_', '-');
        if (std::ranges::find(config_keys(), key) == config_keys().end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what)
{
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            T value;
            if constexpr (std::is_integral_v<T>) value = static_cast<T>(std::stoll(item, &used));
            else value = static_cast<T>(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(value);
        } catch (const std::logic_error&) {
            throw ConfigError(std::string("invalid ") + what + " entry '" + item + "'");
        }
    }
    return out;
}

namespace detail {

inline void validate(CliConfig& cfg)
{
    if (std::ranges::find(subcommands(), cfg.subcommand) == subcommands().end())
        throw ConfigError("unknown subcommand '" + cfg.subcommand + "' (expected rates|simulate|diagnose-noise|diagnose-drift)");
    if (!(cfg.alpha > 1.0 && cfg.alpha < 2.0))
        throw ConfigError("alpha=" + std::to_string(cfg.alpha) + " outside the admissible range (1,2)");
    const double lo = beta_lower_bound(cfg.alpha), hi = beta_upper_bound(cfg.alpha);
    if (!(cfg.beta > lo && cfg.beta < hi))
        throw ConfigError("beta=" + std::to_string(cfg.beta) + " violates 1-alpha/2 < beta < min(1,(alpha-1)(1+alpha)): need "
                          + std::to_string(lo) + " < beta < " + std::to_string(hi));
    if (cfg.dim < 1) throw ConfigError("dim must be >= 1");
    if (cfg.samples < 100) throw ConfigError("samples must be >= 100");
    if (cfg.scales < 1) throw ConfigError("scales must be >= 1");
    if (cfg.quad < 0) throw ConfigError("quad must be >= 0 (0 selects n_fine/n)");
    if ((cfg.subcommand == "rates" || cfg.subcommand == "simulate") && cfg.out.empty())
        throw ConfigError("missing output path (--out)");
    if (!cfg.z0.empty() && cfg.z0.size() != static_cast<std::size_t>(2 * cfg.dim))
        throw ConfigError("z0 needs 2*dim=" + std::to_string(2 * cfg.dim) + " values");

    ExperimentConfig& e = cfg.experiment;
    e.alpha = cfg.alpha;
    e.beta = cfg.beta;
    e.n_list = cfg.n_list;
    e.n_fine = cfg.n_fine;
    e.paths = cfg.paths;
    e.moment = cfg.moment;
    e.seed = cfg.seed;
    e.m_quad = cfg.quad;
    e.threads = cfg.threads;
    const auto d = static_cast<std::size_t>(cfg.dim);
    e.z0 = PhasePoint(d);
    if (!cfg.z0.empty()) {
        std::copy_n(cfg.z0.begin(), d, e.z0.x.begin());
        std::copy_n(cfg.z0.begin() + static_cast<long>(d), d, e.z0.v.begin());
    }
    try {
        switch (parse_drift_kind(cfg.drift)) {
        case DriftKind::zero: e.drift = make_zero_drift(cfg.alpha, cfg.beta); break;
        case DriftKind::constant: e.drift = make_constant_drift(std::vector<double>(d, cfg.amplitude), cfg.alpha, cfg.beta); break;
        case DriftKind::separable_holder: e.drift = make_separable_drift(cfg.amplitude, cfg.alpha, cfg.beta); break;
        case DriftKind::multiscale:
            e.drift = make_multiscale_drift(cfg.amplitude, cfg.alpha, cfg.beta, cfg.scales, cfg.seed);
            break;
        }
        if (cfg.subcommand == "rates" || cfg.subcommand == "simulate") e.validate();
        else e.drift.validate(cfg.dim);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
}

} // namespace detail

/**
 * Parses argv (without the program name) and an optional config text.
 * When `file_text` is absent and --config is given, the file is read here.
 * Every check happens before any sampling; failures raise ConfigError.
 */
inline CliConfig parse_config(const std::vector<std::string>& args, std::optional<std::string> file_text = std::nullopt)
{
    CliConfig cfg;
    cfg.threads = default_thread_count();

    CLI::App app{"kinstab: Gamma-shifted Euler scheme for kinetic SDEs with alpha-stable noise", "kinstab"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string n_list_text, z0_text;
    app.add_option("subcommand", cfg.subcommand, "rates | simulate | diagnose-noise | diagnose-drift")->required();
    app.add_option("--alpha", cfg.alpha, "stable index in (1,2)");
    app.add_option("--beta", cfg.beta, "anisotropic Hoelder exponent of the drift");
    app.add_option("--drift", cfg.drift, "zero | constant | separable | multiscale");
    app.add_option("--amplitude", cfg.amplitude, "drift amplitude A (constant drift: every component)");
    app.add_option("--scales", cfg.scales, "multiscale drift: highest dyadic scale K");
    app.add_option("--n-list", n_list_text, "comma separated coarse step counts");
    app.add_option("--n-fine", cfg.n_fine, "master grid size (power of two)");
    app.add_option("--paths", cfg.paths, "Monte Carlo paths");
    app.add_option("--moment", cfg.moment, "order m of the L_m error");
    app.add_option("--quad", cfg.quad, "in-step midpoint nodes (0 = n_fine/n)");
    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--threads", cfg.threads, "worker threads (env KINSTAB_THREADS)");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--dim", cfg.dim, "spatial dimension d");
    app.add_option("--z0", z0_text, "initial condition x_1..x_d,v_1..v_d");
    app.add_option("--samples", cfg.samples, "sample count for diagnose-noise");
    app.add_option("--config", cfg.config_path, "flat key=value config file");

    // Pre-scan for --config so file values can be placed ahead of the flags.
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!file_text && !config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        file_text = ss.str();
    }

    std::vector<std::string> merged;
    if (file_text)
        for (auto& [key, value] : parse_config_text(*file_text)) {
            merged.push_back("--" + key);
            merged.push_back(value);
        }
    merged.insert(merged.end(), args.begin(), args.end());

    try {
        std::vector<std::string> reversed(merged.rbegin(), merged.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& err) {
        throw ConfigError(err.what());
    }
    if (!n_list_text.empty()) cfg.n_list = parse_list<long>(n_list_text, "n-list");
    if (!z0_text.empty()) cfg.z0 = parse_list<double>(z0_text, "z0");
    detail::validate(cfg);
    return cfg;
}

/// Echo of the resolved configuration, one key=value per line.
inline std::string manifest_text(const CliConfig& cfg)
{
    std::ostringstream out;
    out.precision(17);
    out << "version=" << kVersion << "\n";
    out << "subcommand=" << cfg.subcommand << "\n";
    out << "alpha=" << cfg.alpha << "\n";
    out << "beta=" << cfg.beta << "\n";
    out << "drift=" << to_string(cfg.experiment.drift.kind) << "\n";
    out << "amplitude=" << cfg.amplitude << "\n";
    out << "scales=" << cfg.scales << "\n";
    out << "n-list=";
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) out << (i ? "," : "") << cfg.n_list[i];
    out << "\n";
    out << "n-fine=" << cfg.n_fine << "\n";
    out << "paths=" << cfg.paths << "\n";
    out << "moment=" << cfg.moment << "\n";
    out << "quad=" << cfg.quad << "\n";
    out << "seed=" << cfg.seed << "\n";
    out << "threads=" << cfg.threads << "\n";
    out << "out=" << cfg.out << "\n";
    out << "dim=" << cfg.dim << "\n";
    out << "z0=";
    for (int j = 0; j < cfg.dim; ++j) out << (j ? "," : "") << cfg.experiment.z0.x[static_cast<std::size_t>(j)];
    for (int j = 0; j < cfg.dim; ++j) out << "," << cfg.experiment.z0.v[static_cast<std::size_t>(j)];
    out << "\n";
    out << "samples=" << cfg.samples << "\n";
    return out.str();
}

} // namespace kinstab::cli
