#include "catch_amalgamated.hpp"

#include "cli_config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace kinstab;
using namespace kinstab::cli;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

std::string error_of(const std::string& args, std::optional<std::string> file = std::nullopt)
{
    try {
        parse_config(split(args), std::move(file));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& scratch)
{
    const auto out = scratch / "stdout.txt", err = scratch / "stderr.txt";
    const std::string cmd = std::string(KINSTAB_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path scratch_dir(const char* name)
{
    const auto dir = fs::temp_directory_path() / "kinstab_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("happy path configuration", "[cli]")
{
    const auto cfg = parse_config(
        split("rates --alpha 1.5 --beta 0.6 --paths 2000 --n-fine 8192 --n-list 16,32,64,128,256,512 --seed 42 --out results/"));
    CHECK(cfg.subcommand == "rates");
    CHECK(cfg.experiment.alpha == 1.5);
    CHECK(cfg.experiment.paths == 2000);
    CHECK(cfg.experiment.n_list == std::vector<long>{16, 32, 64, 128, 256, 512});
    CHECK(cfg.experiment.seed == 42);
    CHECK(cfg.experiment.drift.kind == DriftKind::multiscale);
    CHECK(cfg.out == "results/");
}

TEST_CASE("range errors name the admissible bounds", "[cli]")
{
    const auto a = error_of("rates --alpha 2.5 --out r");
    CHECK(a.find("(1,2)") != std::string::npos);
    const auto b = error_of("rates --beta 0.2 --alpha 1.5 --out r");
    CHECK(b.find("beta=0.2") != std::string::npos);
    CHECK(b.find("0.25") != std::string::npos);
}

TEST_CASE("structural configuration errors", "[cli]")
{
    CHECK(error_of("rates --n-list 16,24 --n-fine 8192 --out r").find("does not divide") != std::string::npos);
    CHECK(error_of("rates --n-list 16,32").find("missing output path") != std::string::npos);
    CHECK(error_of("launch --out r").find("unknown subcommand") != std::string::npos);
    CHECK(error_of("rates --out r --bogus 3").find("bogus") != std::string::npos);
    CHECK(error_of("rates --out r --n-list 16,x").find("'x'") != std::string::npos);
    CHECK(error_of("rates --out r --drift wiggly").find("wiggly") != std::string::npos);
    CHECK(error_of("rates --out r --dim 2 --z0 1,2,3").find("z0") != std::string::npos);
    CHECK_FALSE(error_of("diagnose-noise --alpha 1.5 --samples 100000 --seed 7").size());
}

TEST_CASE("config file values and precedence", "[cli]")
{
    const std::string file = "# experiment\nalpha = 1.4\nbeta=0.5\nn_list = 8,16,32\npaths=10\nout = from_file\n";
    const auto cfg = parse_config(split("rates --beta 0.7"), file);
    CHECK(cfg.alpha == 1.4);
    CHECK(cfg.beta == 0.7);
    CHECK(cfg.paths == 10);
    CHECK(cfg.n_list == std::vector<long>{8, 16, 32});
    CHECK(cfg.out == "from_file");

    CHECK(error_of("rates --out r", std::string("alpha=1.5\nwidth=3\n")).find("'width'") != std::string::npos);
    CHECK(error_of("rates --out r", std::string("alpha 1.5\n")).find("key=value") != std::string::npos);
}

TEST_CASE("thread count falls back to the environment", "[cli]")
{
    ::setenv("KINSTAB_THREADS", "5", 1);
    CHECK(parse_config(split("diagnose-drift")).threads == 5);
    CHECK(parse_config(split("diagnose-drift --threads 2")).threads == 2);
    ::unsetenv("KINSTAB_THREADS");
}

TEST_CASE("manifest echoes the resolved configuration", "[cli]")
{
    const auto cfg = parse_config(split("rates --out r --seed 9 --drift separable --dim 2 --z0 1,2,3,4 --threads 1"));
    const auto text = manifest_text(cfg);
    CHECK(text.find("version=1.0.0\n") != std::string::npos);
    CHECK(text.find("seed=9\n") != std::string::npos);
    CHECK(text.find("drift=separable\n") != std::string::npos);
    CHECK(text.find("z0=1,2,3,4\n") != std::string::npos);
}

TEST_CASE("cli exit codes", "[cli][process]")
{
    const auto dir = scratch_dir("codes");
    auto r = run_cli("rates --alpha 2.5 --out " + (dir / "x").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.rfind("error: config:", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    CHECK_FALSE(fs::exists(dir / "x"));

    r = run_cli("--help", dir);
    CHECK(r.code == 0);
}

TEST_CASE("rates with zero drift reports an exact scheme", "[cli][process]")
{
    const auto dir = scratch_dir("zero");
    const auto out = dir / "run";
    const auto r = run_cli("rates --drift zero --paths 8 --n-fine 1024 --n-list 16,32,64,128 --seed 3 --threads 2 --out "
                               + out.string(),
                           dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("degenerate: exact") != std::string::npos);
    CHECK(r.out.find("theoretical_rate=0.660000") != std::string::npos);
    CHECK(fs::exists(out / "rates.csv"));
    CHECK(fs::exists(out / "summary.csv"));
    CHECK(fs::exists(out / "manifest.txt"));
    CHECK(slurp(out / "summary.csv").find("nan") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical", "[cli][process]")
{
    const auto dir = scratch_dir("repeat");
    const std::string common = "rates --drift multiscale --paths 12 --n-fine 1024 --n-list 16,32,64,128 --seed 11 --out ";
    REQUIRE(run_cli(common + (dir / "a").string() + " --threads 1", dir).code == 0);
    REQUIRE(run_cli(common + (dir / "b").string() + " --threads 3", dir).code == 0);
    CHECK(slurp(dir / "a" / "rates.csv") == slurp(dir / "b" / "rates.csv"));
    CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
}

TEST_CASE("simulate writes the coupled trajectories", "[cli][process]")
{
    const auto dir = scratch_dir("simulate");
    const auto r = run_cli("simulate --drift separable --n-fine 256 --n-list 4,8 --out " + (dir / "s").string(), dir);
    REQUIRE(r.code == 0);
    const auto text = slurp(dir / "s" / "trajectory.csv");
    CHECK(text.rfind("n,i,t,x0,v0\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 5 + 9 + 257);
}

TEST_CASE("drift diagnostics pass for the provided families", "[cli][process]")
{
    for (const char* kind : {"separable", "multiscale"}) {
        const auto dir = scratch_dir(kind);
        const auto r = run_cli(std::string("diagnose-drift --drift ") + kind + " --out " + (dir / "d").string(), dir);
        REQUIRE(r.code == 0);
        const auto text = slurp(dir / "d" / "drift_diagnostics.csv");
        INFO(text);
        CHECK(text.rfind("test,param,value,expected,tolerance,pass\n", 0) == 0);
        CHECK(text.find(",false") == std::string::npos);
    }
}

TEST_CASE("noise diagnostics pass", "[cli][process]")
{
    const auto dir = scratch_dir("noise");
    const auto r = run_cli("diagnose-noise --alpha 1.5 --samples 100000 --seed 7", dir);
    REQUIRE(r.code == 0);
    INFO(r.out);
    CHECK(r.out.rfind("test,param,value,expected,tolerance,pass\n", 0) == 0);
    CHECK(r.out.find(",false") == std::string::npos);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 13);
}
