#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "delpmc/elliptic.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/numerics.hpp"

using namespace delpmc;
using namespace delpmc::elliptic;

namespace {
constexpr double kPi = std::numbers::pi;

double quad_F(double s, double m) {
    return integrate(
        [m](double th) { return 1.0 / std::sqrt(1.0 - m * std::sin(th) * std::sin(th)); },
        0.0, s);
}
double quad_E(double s, double m) {
    return integrate(
        [m](double th) { return std::sqrt(1.0 - m * std::sin(th) * std::sin(th)); },
        0.0, s);
}
} // namespace

TEST_CASE("complete integrals") {
    const auto [K0, E0] = complete_integrals(0.0);
    CHECK(K0 == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(E0 == doctest::Approx(kPi / 2).epsilon(1e-15));

    const auto [K5, E5] = complete_integrals(0.5);
    CHECK(std::abs(K5 - quad_F(kPi / 2, 0.5)) <= 1e-12);
    CHECK(std::abs(E5 - quad_E(kPi / 2, 0.5)) <= 1e-12);

    // K grows, E decreases toward 1 as m -> 1
    double prevK = 0.0, prevE = 10.0;
    for (double m = 0.0; m < 0.9995; m += 0.111) {
        const auto [K, E] = complete_integrals(m);
        CHECK(K > prevK);
        CHECK(E < prevE);
        CHECK(std::abs(K - quad_F(kPi / 2, m)) <= 1e-11);
        prevK = K;
        prevE = E;
    }
    CHECK(complete_integrals(0.999).E > 1.0);

    CHECK_THROWS_AS(complete_integrals(1.0), DomainError);
    CHECK_THROWS_AS(complete_integrals(-0.1), DomainError);
}

TEST_CASE("incomplete integrals") {
    CHECK(incomplete_F({1.3, 0.0}) == doctest::Approx(1.3).epsilon(1e-15));
    CHECK(incomplete_E({1.3, 0.0}) == doctest::Approx(1.3).epsilon(1e-15));
    for (double m : {0.2, 0.6, 0.9}) {
        const auto ce = complete_integrals(m);
        CHECK(std::abs(incomplete_F({kPi / 2, m}) - ce.K) <= 1e-14);
        CHECK(std::abs(incomplete_E({kPi / 2, m}) - ce.E) <= 1e-14);
    }
    CHECK(std::abs(incomplete_F({1.0, 0.75}) - quad_F(1.0, 0.75)) <= 1e-12);
    CHECK(std::abs(incomplete_E({2.0, 0.3}) - quad_E(2.0, 0.3)) <= 1e-12);

    // quarter-period extension: F(s + pi) = F(s) + 2K
    const auto ce = complete_integrals(0.4);
    for (double s : {-2.0, 0.3, 1.1, 4.0})
        CHECK(std::abs(incomplete_F({s + kPi, 0.4}) - incomplete_F({s, 0.4}) -
                       2.0 * ce.K) <= 1e-13);
}

TEST_CASE("amplitude inverts F") {
    CHECK(amplitude({0.9, 0.0}) == doctest::Approx(0.9).epsilon(1e-15));
    const auto ce = complete_integrals(0.6);
    CHECK(std::abs(amplitude({ce.K, 0.6}) - kPi / 2) <= 1e-14);
    CHECK(amplitude({0.0, 0.6}) == 0.0);

    // residual of the inversion, against a bisection oracle
    const double am = amplitude({0.7, 0.4});
    CHECK(std::abs(incomplete_F({am, 0.4}) - 0.7) <= 1e-13);
    const double oracle =
        brent([&](double phi) { return quad_F(phi, 0.4) - 0.7; }, 0.0, kPi / 2);
    CHECK(std::abs(am - oracle) <= 1e-11);

    // strictly increasing in s
    double prev = -100.0;
    for (double s = -3.0; s <= 3.0; s += 0.37) {
        const double a = amplitude({s, 0.8});
        CHECK(a > prev);
        prev = a;
    }

    // am(s + 2K) = am(s) + pi
    for (double s : {-1.0, 0.4, 2.7})
        CHECK(std::abs(amplitude({s + 2.0 * ce.K, 0.6}) - amplitude({s, 0.6}) - kPi) <=
              1e-12);
}

TEST_CASE("delta amplitude") {
    const auto d0 = dn({1.7, 0.0});
    CHECK(d0.dn == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d0.ddn_ds == doctest::Approx(0.0));

    for (double m : {0.3, 0.8}) {
        const auto ce = complete_integrals(m);
        const auto dk = dn({ce.K, m});
        CHECK(std::abs(dk.dn - std::sqrt(1.0 - m)) <= 1e-14);
        CHECK(std::abs(dk.ddn_ds) <= 1e-14);
        // range and periodicity
        for (double s = -4.0; s <= 4.0; s += 0.21) {
            const auto d = dn({s, m});
            CHECK(d.dn >= std::sqrt(1.0 - m) - 1e-14);
            CHECK(d.dn <= 1.0 + 1e-14);
            CHECK(std::abs(dn({s + 2.0 * ce.K, m}).dn - d.dn) <= 1e-12);
        }
    }
    for (double m : {0.1, 0.5, 0.9}) {
        const auto ce = complete_integrals(m);
        const double I = integrate(
            [m](double s) { const double d = dn({s, m}).dn; return d * d; }, 0.0, ce.K);
        CHECK(std::abs(I - ce.E) <= 1e-10);
        const double I2 = integrate(
            [m](double s) { const double d = dn({s, m}).dn; return 1.0 / (d * d); },
            0.0, ce.K);
        CHECK(std::abs(I2 - ce.E / (1.0 - m)) <= 1e-10);
    }
}

TEST_CASE("dn parameter derivative") {
    CHECK(std::abs(dn_dm({0.0, 0.37})) <= 1e-15); // dn(0|m) = 1 for all m

    const double h = 1e-5;
    const double fd = (dn({1.3, 0.5 + h}).dn - dn({1.3, 0.5 - h}).dn) / (2.0 * h);
    CHECK(std::abs(dn_dm({1.3, 0.5}) - fd) <= 1e-6);

    // consistency with the amplitude derivative route:
    // d/dm dn = -sin^2(am)/(2 dn) + (d/ds dn / dn) * d/dm am
    for (double s : {0.6, 1.3, 2.2})
        for (double m : {0.25, 0.5, 0.85}) {
            const auto d = dn({s, m});
            const double am = amplitude({s, m});
            const double via_am = -std::sin(am) * std::sin(am) / (2.0 * d.dn) +
                                  d.ddn_ds / d.dn * amplitude_dm({s, m});
            CHECK(std::abs(dn_dm({s, m}) - via_am) <= 1e-9);
        }

    CHECK_THROWS_AS(dn_dm({1.0, 0.0}), DomainError);
}

TEST_CASE("second-kind identity along the amplitude") {
    for (double m : {0.2, 0.7})
        for (double s : {0.5, 1.4, 3.1}) {
            const double lhs = incomplete_E({amplitude({s, m}), m});
            const double rhs = integrate(
                [m](double u) { const double d = dn({u, m}).dn; return d * d; }, 0.0, s);
            CHECK(std::abs(lhs - rhs) <= 1e-10);
        }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(EllipticPoint(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(EllipticPoint(0.0, -0.2), DomainError);
    CHECK_NOTHROW(EllipticPoint(5.0, 0.0));
}
