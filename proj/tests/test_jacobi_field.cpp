#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "delpmc/degeneracy.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/grid.hpp"
#include "delpmc/jacobi_field.hpp"

using namespace delpmc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("fundamental pair normalizations") {
    for (double a : {-0.7, -0.2, 0.9}) {
        const auto p = make_param(a);
        CHECK(fundamental_pair(p, 0, 0.0).w == doctest::Approx(-1.0).epsilon(1e-13));
        CHECK(fundamental_pair(p, 1, 0.0).w == doctest::Approx(1.0).epsilon(1e-13));
        // v's are odd
        for (double t : {0.4, 1.3})
            for (int j : {0, 1})
                CHECK(fundamental_pair(p, j, -t).v ==
                      doctest::Approx(-fundamental_pair(p, j, t).v).epsilon(1e-11));
    }
    const auto cyl = make_param(-0.5);
    for (double t : {0.0, 0.7, 2.9}) {
        CHECK(fundamental_pair(cyl, 0, t).w ==
              doctest::Approx(-std::cos(t)).epsilon(1e-15));
        CHECK(fundamental_pair(cyl, 0, t).v ==
              doctest::Approx(-std::sin(t)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(w0_closed(cyl, 1.0), DomainError);
}

TEST_CASE("hill ode integration") {
    const auto p = make_param(-0.4);
    // j = 1 from (1, 0) reproduces z'/x
    const auto sol = hill_ode(p, 1, 5.0 * p.tau, 1.0, 0.0);
    for (double t = 0.0; t <= 5.0 * p.tau; t += 0.31)
        CHECK(std::abs(sol.precise_value(t) - fundamental_pair(p, 1, t).w) <= 1e-9);

    // Wronskian of the principal pair is constant
    const auto w = hill_ode(p, 2, 4.0 * p.tau, 1.0, 0.0);
    const auto v = hill_ode(p, 2, 4.0 * p.tau, 0.0, 1.0);
    for (double t = 0.1; t <= 4.0 * p.tau; t += 0.47) {
        const double wr = w.value(t) * v.derivative(t) - w.derivative(t) * v.value(t);
        CHECK(std::abs(wr - 1.0) <= 1e-10);
    }

    // j^2 >= 2(1+2 gamma): no zeros anywhere
    const int jbig = 3; // a=-0.4: 2(1+2g) = 1.08, j^2 = 9
    const auto big = hill_ode(p, jbig, 6.0 * p.tau, -1.0, 0.0);
    for (double t = 0.0; t <= 6.0 * p.tau; t += 0.11)
        CHECK(big.value(t) < 0.0); // stays one-signed (starts at -1)

    CHECK_THROWS_AS(hill_ode(p, -1, 1.0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(big.value(100.0), DomainError); // beyond cached range
}

TEST_CASE("closed-form solutions wrap the same data") {
    const auto p = make_param(0.6);
    const auto wf = closed_form_solution(p, 0, SolutionKind::Even, 10.0);
    CHECK(wf.source() == SolutionSource::ClosedForm);
    CHECK(wf.value(1.3) == doctest::Approx(w0_closed(p, 1.3)).epsilon(1e-14));
    // derivative consistency by finite differences
    const double h = 1e-6;
    CHECK(std::abs(wf.derivative(1.3) -
                   (wf.value(1.3 + h) - wf.value(1.3 - h)) / (2 * h)) <= 1e-7);
}

TEST_CASE("jacobi operator on grids") {
    const auto cyl = make_param(-0.5);
    GridSpec spec{kPi / 2, 128, 16};
    const auto w0grid = GridFunction::sample(
        spec, [](double t, double) { return -std::cos(t); }, true, true);
    CHECK(jacobi_apply(cyl, w0grid).sup_norm() <= 1e-6);

    const auto p03 = make_param(0.3);
    GridSpec spec2{0.5 * p03.tau, 128, 16};
    const auto ker = GridFunction::sample(
        spec2,
        [&](double t, double th) {
            return fundamental_pair(p03, 1, t).w * std::cos(th);
        },
        true, true);
    CHECK(jacobi_apply(p03, ker).sup_norm() <= 1e-6);

    GridFunction zero(spec2, true, true);
    CHECK(jacobi_apply(p03, zero).sup_norm() == 0.0);

    CHECK_THROWS_AS(jacobi_apply(p03, GridFunction({1.0, 6, 16}, true, true)),
                    DomainError);
}

TEST_CASE("monodromy classification") {
    const auto cyl = make_param(-0.5);
    const auto mc = monodromy(cyl, 0);
    CHECK(mc.trace == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(mc.classification == FloquetClass::Parabolic);
    CHECK(std::abs(mc.det - 1.0) <= 1e-9);

    for (double a : {-0.3, 0.8}) {
        const auto p = make_param(a);
        const auto m1 = monodromy(p, 1);
        CHECK(std::abs(std::abs(m1.trace) - 2.0) <= 1e-6);
        CHECK(m1.classification == FloquetClass::Parabolic);
        CHECK(std::abs(m1.det - 1.0) <= 1e-9);
        CHECK_FALSE(m1.exponent.has_value());
    }

    // hyperbolic for a mode above the positivity threshold (entries are large,
    // the Wronskian drift is relative to their square)
    const auto p = make_param(-0.3);
    const auto m2 = monodromy(p, 2);
    CHECK(m2.classification == FloquetClass::Hyperbolic);
    CHECK(m2.exponent.has_value());
    const double scale = std::max(1.0, m2.trace * m2.trace);
    CHECK(std::abs(m2.det - 1.0) <= 1e-9 * scale);
    CHECK(std::cosh(*m2.exponent * 2.0 * p.tau) ==
          doctest::Approx(std::abs(m2.trace) / 2.0).epsilon(1e-10));

    // elliptic case with exponent in (0, pi / (2 tau))
    const auto pe = make_param(0.8);
    const auto m3 = monodromy(pe, 2);
    CHECK(m3.classification == FloquetClass::Elliptic);
    CHECK(*m3.exponent > 0.0);
    CHECK(*m3.exponent < kPi / (2.0 * pe.tau));
}

TEST_CASE("zero gap bound") {
    const auto p = make_param(0.5);
    const auto b0 = zero_gap_bound(p, 0);
    REQUIRE(b0.has_value());
    CHECK(*b0 == doctest::Approx(kPi / std::sqrt(2.0 * (1.0 + 2.0 * p.gamma)))
                     .epsilon(1e-14));
    CHECK_FALSE(zero_gap_bound(p, 3).has_value()); // 9 >= 2(1+2*0.75) = 5
}

TEST_CASE("mode-mean criterion yields zeros") {
    // j^2 < 4|gamma| guarantees a zero of w_{a,j}
    const auto p = make_param(2.0); // 4 gamma = 24
    for (int j : {2, 3, 4}) {
        const auto scan = scan_zeros(p, j, 8.0 * p.tau);
        CHECK_FALSE(scan.certificate);
        CHECK_FALSE(scan.zeros.empty());
    }
}
