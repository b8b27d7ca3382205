#include "catch_amalgamated.hpp"

#include "kinstab/diagnostics.hpp"
#include "kinstab/kinetic_path.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace kinstab;
using Catch::Approx;

namespace {

PhasePoint random_point(RngStream& rng, std::size_t d, double scale)
{
    PhasePoint z(d);
    for (std::size_t j = 0; j < d; ++j) {
        z.x[j] = scale * (2.0 * rng.uniform_open() - 1.0);
        z.v[j] = scale * (2.0 * rng.uniform_open() - 1.0);
    }
    return z;
}

} // namespace

TEST_CASE("gamma_shift examples", "[kinetic_path]")
{
    const PhasePoint z({3.0}, {7.0});
    CHECK(gamma_shift(0.0, z) == z);
    CHECK(gamma_shift(1.0, PhasePoint({0.0}, {1.0})) == PhasePoint({1.0}, {1.0}));
}

TEST_CASE("gamma_shift group law", "[kinetic_path][property]")
{
    RngStream rng(11, 0);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int k = 0; k < 10000; ++k) {
        const auto z = random_point(rng, 3, 10.0);
        const double s = 2.0 * rng.uniform_open() - 1.0;
        const double t = 2.0 * rng.uniform_open() - 1.0;
        const auto lhs = gamma_shift(s, gamma_shift(t, z));
        const auto rhs = gamma_shift(s + t, z);
        REQUIRE(lhs.v == rhs.v);
        for (std::size_t j = 0; j < 3; ++j) {
            const double scale = std::abs(z.x[j]) + (std::abs(s) + std::abs(t)) * std::abs(z.v[j]);
            REQUIRE(std::abs(lhs.x[j] - rhs.x[j]) <= 4.0 * eps * scale);
        }
    }
}

TEST_CASE("grid_map_kn", "[kinetic_path]")
{
    CHECK(grid_map_kn(0.37, 10) == Approx(0.3));
    CHECK(grid_map_kn(0.3, 10) == Approx(0.3));
    CHECK(grid_map_kn(1.0, 4) == 1.0);
    CHECK(grid_map_kn(0.0, 7) == 0.0);
    CHECK_THROWS_AS(grid_map_kn(-0.1, 4), std::invalid_argument);
    CHECK_THROWS_AS(grid_map_kn(1.5, 4), std::invalid_argument);

    RngStream rng(12, 0);
    for (int k = 0; k < 1000; ++k) {
        const double t = rng.uniform_open();
        const long n = 1 + static_cast<long>(rng.below(1000));
        const double g = grid_map_kn(t, n);
        REQUIRE(g <= t);
        REQUIRE(t < g + 1.0 / static_cast<double>(n) + 1e-15);
    }
}

TEST_CASE("aniso_dist examples", "[kinetic_path]")
{
    const PhasePoint z({0.4, -1.0}, {2.0, 3.0});
    CHECK(aniso_dist(z, z, 1.5) == 0.0);
    CHECK(aniso_dist(PhasePoint({1.0}, {0.0}), PhasePoint({0.0}, {0.0}), 1.0) == Approx(1.0));
    CHECK(aniso_dist(PhasePoint({0.0}, {2.0}), PhasePoint({0.0}, {0.0}), 1.5) == Approx(2.0));
    CHECK(aniso_dist(PhasePoint({8.0}, {0.0}), PhasePoint({0.0}, {0.0}), 2.0) == Approx(2.0));
    CHECK_THROWS_AS(aniso_dist(PhasePoint({0.0}, {0.0}), PhasePoint({0.0, 0.0}, {0.0, 0.0}), 1.5),
                    std::invalid_argument);
}

TEST_CASE("aniso_dist is subadditive", "[kinetic_path][property]")
{
    RngStream rng(13, 0);
    for (int k = 0; k < 10000; ++k) {
        const double alpha = 1.0 + rng.uniform_open();
        const double scale = std::exp2(static_cast<double>(rng.below(12)) - 6.0);
        const auto a = random_point(rng, 2, scale), b = random_point(rng, 2, scale), w = random_point(rng, 2, scale);
        REQUIRE(aniso_dist(a, b, alpha) <= (aniso_dist(a, w, alpha) + aniso_dist(w, b, alpha)) * (1.0 + 1e-12));
    }
}

TEST_CASE("master path from zero increments", "[kinetic_path]")
{
    const std::vector<double> zeros(2, 0.0);
    const auto path = master_path_from_increments(2, 1.5, 1, zeros);
    for (long i = 0; i <= 2; ++i) {
        CHECK(path.L(i)[0] == 0.0);
        CHECK(path.I(i)[0] == 0.0);
    }
}

TEST_CASE("master path trapezoid by hand", "[kinetic_path]")
{
    const double d1 = 0.7, d2 = -1.9;
    const std::vector<double> inc{d1, d2};
    const auto path = master_path_from_increments(2, 1.5, 1, inc);
    CHECK(path.L(0)[0] == 0.0);
    CHECK(path.L(1)[0] == Approx(d1));
    CHECK(path.L(2)[0] == Approx(d1 + d2));
    CHECK(path.I(0)[0] == 0.0);
    CHECK(path.I(1)[0] == Approx(d1 / 4.0));
    CHECK(path.I(2)[0] == Approx(d1 / 4.0 + (2.0 * d1 + d2) / 4.0));
}

TEST_CASE("master path grid must be a power of two", "[kinetic_path]")
{
    RngStream rng(14, 0);
    CHECK_THROWS_AS(build_master_path(12, StableParams{1.5, 1}, rng), std::invalid_argument);
    CHECK_THROWS_AS(build_master_path(1, StableParams{1.5, 1}, rng), std::invalid_argument);
    CHECK_NOTHROW(build_master_path(16, StableParams{1.5, 1}, rng));
}

TEST_CASE("master path integral is reproducible bit for bit", "[kinetic_path]")
{
    RngStream rng(15, 0);
    const auto path = build_master_path(1024, StableParams{1.5, 2}, rng);
    const double h = 1.0 / 1024.0;
    std::vector<double> acc(2, 0.0);
    for (long i = 0; i < 1024; ++i) {
        for (int j = 0; j < 2; ++j) {
            acc[j] = acc[j] + 0.5 * h * (path.L(i)[j] + path.L(i + 1)[j]);
            REQUIRE(path.I(i + 1)[j] == acc[j]);
        }
    }
    CHECK(path.L(0)[0] == 0.0);
    CHECK(path.I(0)[1] == 0.0);
}

TEST_CASE("restriction keeps L and re-integrates I", "[kinetic_path]")
{
    RngStream rng(16, 0);
    const auto fine = build_master_path(256, StableParams{1.5, 1}, rng);
    const auto coarse = restrict_master_path(fine, 4);
    REQUIRE(coarse.n_fine() == 64);
    for (long i = 0; i <= 64; ++i) REQUIRE(coarse.L(i)[0] == fine.L(4 * i)[0]);
    CHECK_THROWS_AS(restrict_master_path(fine, 3), std::invalid_argument);
}

TEST_CASE("moment diagnostic edge cases", "[kinetic_path]")
{
    RngStream rng(17, 0);
    std::vector<MasterPath> paths;
    for (int p = 0; p < 50; ++p) paths.push_back(build_master_path(64, StableParams{1.5, 1}, rng));
    CHECK(moment_diagnostic(paths, 0.25, 0.25, 0.6, 2.0) == 0.0);
    CHECK(moment_diagnostic(paths, 0.25, 0.5, 1e-12, 2.0) == Approx(1.0).margin(1e-9));
    CHECK_THROWS_AS(moment_diagnostic(paths, 0.25, 0.3, 0.6, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(moment_diagnostic(paths, 0.5, 0.25, 0.6, 2.0), std::invalid_argument);
}

TEST_CASE("kinetic noise moment decays with the gap", "[kinetic_path]")
{
    const auto paths = build_paths(2000, 2048, StableParams{1.5, 1}, 18);
    const double slope = kinetic_moment_slope(paths, 0.5, 0.6, 2.0);
    CHECK(slope >= 0.6 / 1.5 - 0.1);
}

TEST_CASE("kinetic increment has the law of M at the gap", "[kinetic_path][property]")
{
    const auto shifted = build_paths(10000, 1024, StableParams{1.5, 1}, 19);
    const auto fresh = build_paths(10000, 1024, StableParams{1.5, 1}, 20);
    const auto row = shift_markov_check(shifted, fresh, 0.25, 0.75);
    CHECK(row.pass);
    CHECK(row.tolerance == Approx(0.023).margin(0.001));
}

TEST_CASE("kinetic increment is independent of the past", "[kinetic_path][property]")
{
    // The increment over [s,t] must not correlate with L_s (sign test on the velocity block).
    const auto paths = build_paths(4000, 256, StableParams{1.5, 1}, 21);
    long agree = 0;
    for (const auto& p : paths) {
        const auto m = kinetic_increment(p, 64, 192);
        if ((m.v[0] > 0.0) == (p.L(64)[0] > 0.0)) ++agree;
    }
    const double frac = static_cast<double>(agree) / 4000.0;
    CHECK(std::abs(frac - 0.5) <= 3.0 * 0.5 / std::sqrt(4000.0));
}
