#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "alt/model.hpp"

using namespace alt;

namespace {

const Params kRegular{0.05, 0.06, 0.04, 0.05};
const Params kCrisis{0.05, -0.01, 0.04, 0.05};
const Params kStagnation{0.05, 0.0, 0.0, 0.05};

bool close_rel(double a, double b, double tol, double floor_scale = 1e-300) {
    const double scale = std::max({std::fabs(a), std::fabs(b), floor_scale});
    return std::fabs(a - b) <= tol * scale;
}

}  // namespace

TEST_CASE("diagonal T=L is a fixed axis: dT and dL vanish exactly") {
    for (const Params& p : {kRegular, kCrisis, kStagnation}) {
        const RateVector v = derivatives({1.0, 0.5, 0.5}, p);
        CHECK(v.dT == 0.0);
        CHECK(v.dL == 0.0);
    }
}

TEST_CASE("off-diagonal fixed point (T=0, L=L0) is stationary") {
    // crisis parameters put L0 = 0.04/0.09 = 4/9 inside [0,1]
    const double L0 = derive(kCrisis).L0;
    CHECK(L0 == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    const RateVector v = derivatives({1.0, L0, 0.0}, kCrisis);
    CHECK(v.dT == 0.0);
    CHECK(std::fabs(v.dL) < 1e-15);
}

TEST_CASE("hand-evaluated derivatives at (A=1, L=0.2, T=0.4), regular regime") {
    const RateVector v = derivatives({1.0, 0.2, 0.4}, kRegular);
    CHECK(v.dT == doctest::Approx(0.048).epsilon(1e-14));
    // dL = 0.2*((0.06 - 0.04*0.2 + 0.05*0.8)/0.6 + 0.8*0.4) = 71/750
    CHECK(v.dL == doctest::Approx(71.0 / 750.0).epsilon(1e-13));
    // dA/A = (0.06 - 0.008 + 0.05*0.2)/0.6 + 0.2*0.4 = 11/60
    CHECK(v.dA == doctest::Approx(11.0 / 60.0).epsilon(1e-13));
}

TEST_CASE("roa equals (1/A) dA/dtau wherever both are defined") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.01, 0.95);
    std::uniform_real_distribution<double> ua(0.1, 10.0);
    for (int i = 0; i < 10000; ++i) {
        const EconState s{ua(rng), u(rng), u(rng)};
        const double lhs = roa(s, kRegular);
        const double rhs = derivatives(s, kRegular).dA / s.assets;
        CHECK(close_rel(lhs, rhs, 1e-12, 1e-12));
    }
}

TEST_CASE("primary and beta/L0 forms of dL/dtau agree to 1e-12 relative") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(0.0, 0.99);
    std::uniform_real_distribution<double> ug(-0.1, 0.1);
    std::uniform_real_distribution<double> ur(0.0, 0.1);
    for (int i = 0; i < 10000; ++i) {
        const Params p{ur(rng) + 1e-3, ug(rng), ur(rng), 0.05};
        const double T = u(rng), L = u(rng);
        const double a = leverage_rate(T, L, p);
        const double b = leverage_rate_beta_form(T, L, p);
        const auto [beta, L0] = derive(p);
        // natural scale of the sum, to keep "relative" meaningful at sign changes
        const double scale = std::fabs(T - L) * (std::fabs(beta * (L0 - L) / (1.0 - T)) +
                                                 std::fabs(T * (1.0 - L)));
        CHECK(close_rel(a, b, 1e-12, scale));
    }
}

TEST_CASE("sign of dT/dtau: positive iff T in (0,1) and T > L, negative iff T < L") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double T = u(rng), L = u(rng);
        const double dT = trust_rate(T, L);
        if (T == 0.0 || T == 1.0 || T == L) {
            CHECK(dT == 0.0);
        } else if (T > L) {
            CHECK(dT > 0.0);
        } else {
            CHECK(dT < 0.0);
        }
    }
    CHECK(trust_rate(0.0, 0.7) == 0.0);
    CHECK(trust_rate(1.0, 0.2) == 0.0);
}

TEST_CASE("roe basics") {
    CHECK(roe(0.0, kRegular) == kRegular.g_tilde);  // unlevered firm
    CHECK(roe(0.5, kRegular) == doctest::Approx(0.08).epsilon(1e-15));
    CHECK_THROWS_AS(roe(1.0, kRegular), std::domain_error);
}

TEST_CASE("on the diagonal, roa equals roe (and the diagonal closed form)") {
    for (const Params& p : {kRegular, kCrisis, kStagnation}) {
        for (double L : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double on_axis = roa(L, L, p);
            CHECK(close_rel(on_axis, roe(L, p), 1e-13, 1e-15));
            CHECK(close_rel(on_axis, diagonal_roa(L, p), 1e-13, 1e-15));
        }
    }
}

TEST_CASE("diagonal roa with g = r is the constant r") {
    const Params p{0.05, 0.03, 0.03, 0.05};
    for (double L : {0.0, 0.2, 0.5, 0.8})
        CHECK(roa(L, L, p) == doctest::Approx(0.03).epsilon(1e-14));
}

TEST_CASE("diagonal roa with g = r = 0 is exactly zero") {
    for (double L : {0.0, 0.25, 0.5, 0.9}) CHECK(roa(L, L, kStagnation) == 0.0);
}

TEST_CASE("growth identity r_D = r_L + r_A holds exactly") {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> u(0.01, 0.95);
    for (int i = 0; i < 1000; ++i) {
        const EconState s{1.0, u(rng), u(rng)};
        const GrowthRates g = growth_rates(s, kRegular);
        CHECK(g.debt == g.leverage + g.assets);
    }
}

TEST_CASE("on the fixed axis r_L = 0, hence r_D = r_A") {
    const GrowthRates g = growth_rates({1.0, 0.4, 0.4}, kRegular);
    CHECK(g.leverage == 0.0);
    CHECK(g.debt == g.assets);
}

TEST_CASE("growth rates demand L > 0") {
    CHECK_THROWS_AS(growth_rates({1.0, 0.0, 0.4}, kRegular), std::domain_error);
}

TEST_CASE("domain errors: T >= 1 is singular, invalid states rejected") {
    CHECK_THROWS_AS(roa(1.0, 0.5, kRegular), std::domain_error);
    CHECK_THROWS_AS(derivatives({1.0, 0.5, 1.0}, kRegular), std::domain_error);
    CHECK_THROWS_AS(derivatives({1.0, 1.2, 0.5}, kRegular), std::domain_error);
    CHECK_THROWS_AS(derivatives({0.0, 0.5, 0.5}, kRegular), std::domain_error);
    CHECK_THROWS_AS(validate(Params{0.0, 0.06, 0.04, 0.05}), std::domain_error);
    CHECK_THROWS_AS(validate(Params{0.05, 0.06, 0.04, 0.0}), std::domain_error);
}

TEST_CASE("negative g is permitted and L0 is reported as-is, even outside [0,1]") {
    const Params p{0.05, -0.08, 0.04, 0.05};
    CHECK_NOTHROW(validate(p));
    CHECK(derive(p).L0 == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(derive(kRegular).L0 == doctest::Approx(11.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("derive rejects r + a == 0") {
    CHECK_THROWS_AS(derive(Params{0.05, 0.02, -0.05, 0.05}), std::domain_error);
}

TEST_CASE("discrete Euler step matches the hand-evaluated dimensional update") {
    // dimensional inputs: g = 0.10, r = 0.01, a = 0.05, k = 0.05, dt = 0.1
    const double g = 0.10, r = 0.01, a = 0.05, k = 0.05, dt = 0.1;
    const double L = 0.25, T = 0.35;
    const Params nd{a / k, g / k, r / k, k};
    const auto [L2, T2] = discrete_euler_step(L, T, nd, dt);

    const double bracket = (g - r * L + a * (1.0 - L)) / (1.0 - T) + k * (1.0 - L) * T;
    const double L2_expected = L + (T - L) * bracket * dt;
    const double T2_expected = T + k * T * (T - L) * (1.0 - T) * dt;
    CHECK(L2 == doctest::Approx(L2_expected).epsilon(1e-12));
    CHECK(T2 == doctest::Approx(T2_expected).epsilon(1e-12));
    CHECK(L2 == doctest::Approx(0.25220817307692308).epsilon(1e-12));
    CHECK(T2 == doctest::Approx(0.35011375).epsilon(1e-12));
}

TEST_CASE("discrete Euler step freezes the state at k = 0 and on the diagonal") {
    const Params frozen{1.0, 2.0, 0.2, 0.0};
    const auto [L1, T1] = discrete_euler_step(0.25, 0.35, frozen, 0.1);
    CHECK(L1 == 0.25);
    CHECK(T1 == 0.35);

    const Params nd{1.0, 2.0, 0.2, 0.05};
    const auto [L2, T2] = discrete_euler_step(0.3, 0.3, nd, 0.1);
    CHECK(L2 == 0.3);
    CHECK(T2 == 0.3);
}
