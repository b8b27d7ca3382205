#include "catch_amalgamated.hpp"

#include "kinstab/diagnostics.hpp"
#include "kinstab/drifts.hpp"

#include <cmath>
#include <vector>

using namespace kinstab;
using Catch::Approx;

TEST_CASE("zero drift vanishes", "[drifts]")
{
    const auto spec = make_zero_drift();
    CHECK(drift_eval(spec, PhasePoint({1.0, -3.0}, {4.0, 0.5})) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("constant drift", "[drifts]")
{
    const auto spec = make_constant_drift({0.5, -2.0});
    CHECK(drift_eval(spec, PhasePoint({1.0, -3.0}, {4.0, 0.5})) == std::vector<double>{0.5, -2.0});
}

TEST_CASE("separable drift examples", "[drifts]")
{
    const auto spec = make_separable_drift(1.0, 1.5, 0.6);
    CHECK(spec.position_exponent() == Approx(2.1 / 2.5));
    CHECK(drift_eval(spec, PhasePoint({0.0}, {0.0}))[0] == 0.0);
    CHECK(drift_eval(spec, PhasePoint({0.0}, {1.0}))[0] == Approx(1.0));
    CHECK(drift_eval(spec, PhasePoint({0.5}, {-0.25}))[0]
          == Approx(std::pow(0.5, 0.84) - std::pow(0.25, 0.6)));
    CHECK(drift_eval(spec, PhasePoint({40.0}, {-9.0}))[0] == Approx(0.0));
}

TEST_CASE("separable drift is odd", "[drifts][property]")
{
    const auto spec = make_separable_drift(1.3, 1.5, 0.6);
    RngStream rng(31, 0);
    const auto row = oddness_check(spec, 2, 100000, 10.0, rng);
    CHECK(row.value == 0.0);
}

TEST_CASE("beta outside the admissible window is rejected", "[drifts]")
{
    CHECK_THROWS_AS(make_separable_drift(1.0, 1.5, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(make_separable_drift(1.0, 1.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_multiscale_drift(1.0, 1.2, 0.5, 8, 1), std::invalid_argument); // (0.2)(2.2)=0.44
    CHECK_NOTHROW(make_multiscale_drift(1.0, 1.2, 0.43, 8, 1));
    CHECK(beta_lower_bound(1.5) == Approx(0.25));
    CHECK(beta_upper_bound(1.5) == 1.0);
    CHECK(beta_upper_bound(1.2) == Approx(0.44));
}

TEST_CASE("multiscale phases are a function of the seed", "[drifts]")
{
    const auto a = make_multiscale_drift(1.0, 1.5, 0.6, 10, 5);
    const auto b = make_multiscale_drift(1.0, 1.5, 0.6, 10, 5);
    const auto c = make_multiscale_drift(1.0, 1.5, 0.6, 10, 6);
    CHECK(a.phases_x == b.phases_x);
    CHECK(a.phases_v == b.phases_v);
    CHECK(a.phases_x != c.phases_x);
    CHECK(a.phases_x.size() == 11);
}

TEST_CASE("drifts respect their sup bound", "[drifts][property]")
{
    for (const auto& spec : {make_separable_drift(1.0, 1.5, 0.6), make_multiscale_drift(1.0, 1.5, 0.6, 12, 3),
                             make_multiscale_drift(2.5, 1.5, 0.3, 12, 4)}) {
        RngStream rng(32, 0);
        const auto row = drift_bound_check(spec, 1, 1000000, 10.0, rng);
        INFO(row.test << " " << row.param << " " << row.value);
        CHECK(row.pass);
    }
    RngStream rng(33, 0);
    CHECK(drift_bound_check(make_separable_drift(1.0, 1.5, 0.6), 3, 100000, 10.0, rng).pass);
}

TEST_CASE("clipped power Hoelder constant by brute force", "[drifts]")
{
    // Oracle for the seminorm bound: sup |h(u)-h(u')| / |u-u'|^g over a dense grid stays <= 2.
    for (double g : {0.3, 0.6, 0.84, 0.95}) {
        double worst = 0.0;
        for (int i = -400; i <= 400; ++i)
            for (int k = i + 1; k <= 400; ++k) {
                const double u = i / 100.0, w = k / 100.0;
                worst = std::max(worst, std::abs(clipped_power(u, g) - clipped_power(w, g)) / std::pow(w - u, g));
            }
        INFO("gamma=" << g);
        CHECK(worst <= 2.0);
        CHECK(worst >= std::pow(2.0, 1.0 - g) - 1e-9);
    }
}

TEST_CASE("seminorm estimate of trivial drifts is zero", "[drifts]")
{
    RngStream rng(34, 0);
    CHECK(holder_seminorm_estimate(make_zero_drift(), 1, 1000, 4.0, rng) == 0.0);
    CHECK(holder_seminorm_estimate(make_constant_drift({3.0}), 1, 1000, 4.0, rng) == 0.0);
}

TEST_CASE("separable seminorm estimate is bounded and stable", "[drifts]")
{
    for (int dim : {1, 3}) {
        const auto spec = make_separable_drift(1.0, 1.5, 0.6);
        const auto rows = holder_stability_check(spec, dim, 4.0, 35);
        for (const auto& r : rows) {
            INFO(r.test << " " << r.param << " " << r.value);
            CHECK(r.pass);
        }
        CHECK(rows[2].value <= 4.0 * std::sqrt(static_cast<double>(dim)) + 0.01);
    }
}

TEST_CASE("multiscale drift is no smoother than beta in velocity", "[drifts]")
{
    const auto spec = make_multiscale_drift(1.0, 1.5, 0.6, 16, 42);
    const auto rows = regularity_witness_check(spec, 1, 36);
    REQUIRE(rows.size() == 2);
    INFO("bounded growth " << rows[0].value << ", rough growth " << rows[1].value);
    CHECK(rows[0].pass);
    CHECK(rows[1].pass);
}
