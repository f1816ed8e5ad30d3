#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "delpmc/errors.hpp"
#include "delpmc/melnikov.hpp"
#include "delpmc/numerics.hpp"

using namespace delpmc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("value basics") {
    const auto p = make_param(0.3);
    const double T = 0.5 * p.tau;

    const auto zero = CurvatureField::parse("1 + eps*0");
    const Melnikov M0(p, T, zero);
    CHECK(std::abs(M0.value(0.4, -0.7)) <= 1e-14);

    const auto f = CurvatureField::parse("1 + eps*(x^2+y^2)");
    const Melnikov M(p, T, f);
    CHECK(M.value(0.4, -0.2) == doctest::Approx(M.value(-0.4, -0.2)).epsilon(1e-12));
    CHECK(M.value(0.4, -0.2) == doctest::Approx(M.value(0.4, 0.2)).epsilon(1e-12));

    // value equals the weighted volume functional of the translated patch
    PatchFn patch = [&](double t, double th) {
        return surface_point(p, 0.4, -0.2, t, th, 0.0).position;
    };
    CHECK(std::abs(M.value(0.4, -0.2) - volume_functional(patch, T, f)) <= 1e-10);

    CHECK_THROWS_AS(Melnikov(p, T, CurvatureField::parse("1 + sin(eps)*x")),
                    DomainError);
}

TEST_CASE("gradient") {
    const auto p = make_param(0.3);
    const double T = 0.5 * p.tau;
    const auto f = CurvatureField::parse("1 + eps*(x^2+y^2)");
    const Melnikov M(p, T, f);

    // constant Htilde: theta integral of cos kills the gradient
    const Melnikov Mc(p, T, CurvatureField::parse("1 + eps"));
    const auto gc = Mc.grad(0.7, -1.1);
    CHECK(std::abs(gc[0]) <= 1e-12);
    CHECK(std::abs(gc[1]) <= 1e-12);

    // radial: gradient vanishes at the origin
    const auto g0 = M.grad(0.0, 0.0);
    CHECK(std::abs(g0[0]) <= 1e-12);
    CHECK(std::abs(g0[1]) <= 1e-12);

    const double h = 1e-5;
    const auto g = M.grad(0.3, -0.2);
    CHECK(std::abs(g[0] - (M.value(0.3 + h, -0.2) - M.value(0.3 - h, -0.2)) / (2 * h)) <=
          1e-6 * std::abs(g[0]));
}

TEST_CASE("critical points") {
    const auto p = make_param(0.3);
    const double T = 0.5 * p.tau;
    const std::array<std::array<double, 2>, 1> seeds{{{0.2, 0.2}}};

    const Melnikov M(p, T, CurvatureField::parse("1 + eps*(x^2+y^2)"));
    const auto crits = M.find_critical_points(seeds);
    REQUIRE(crits.size() == 1);
    CHECK(std::abs(crits[0].p) <= 1e-8);
    CHECK(std::abs(crits[0].q) <= 1e-8);
    CHECK(crits[0].nondegenerate);
    CHECK_FALSE(crits[0].gradient_floor);
    CHECK(crits[0].hessian[0][1] == doctest::Approx(crits[0].hessian[1][0]));

    const Melnikov Mt(p, T, CurvatureField::parse("1 + eps*((x-1)^2+y^2)"));
    const auto ct = Mt.find_critical_points(std::array<std::array<double, 2>, 1>{
        {{0.7, 0.2}}});
    REQUIRE(ct.size() == 1);
    CHECK(ct[0].p == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(ct[0].q) <= 1e-8);

    const Melnikov Mc(p, T, CurvatureField::parse("1 + eps"));
    const auto cc = Mc.find_critical_points(seeds);
    REQUIRE(cc.size() == 1);
    CHECK(cc[0].gradient_floor);

    // critical sets are invariant under positive scaling of Htilde
    const Melnikov M2(p, T, CurvatureField::parse("1 + eps*(3*(x^2+y^2))"));
    const auto c2 = M2.find_critical_points(seeds);
    REQUIRE(c2.size() == 1);
    CHECK(std::hypot(c2[0].p - crits[0].p, c2[0].q - crits[0].q) <= 1e-8);
    CHECK(c2[0].value == doctest::Approx(3.0 * crits[0].value).epsilon(1e-10));
}

TEST_CASE("volume functional contracts") {
    const auto p = make_param(-0.5);
    const double T = 1.2;
    PatchFn patch = [&](double t, double th) {
        return surface_point(p, 0.0, 0.0, t, th, 0.0).position;
    };
    const auto f1 = CurvatureField::parse("1 + eps*(x^2+1)");
    const auto f2 = CurvatureField::parse("1 + eps*(2*(x^2+1))");
    CHECK(volume_functional(patch, T, f2) ==
          doctest::Approx(2.0 * volume_functional(patch, T, f1)).epsilon(1e-12));

    PatchFn bad = [&](double t, double th) {
        Vec3 v = patch(t, th);
        v.x += 0.1 * t; // e1-component no longer even in t
        return v;
    };
    CHECK_THROWS_AS(volume_functional(bad, T, f1), ContractError);
}

TEST_CASE("enclosed volume against a Monte-Carlo oracle") {
    // For Htilde = 1 the potential has Q.e3 = 0, so -V equals the Euclidean
    // volume enclosed by the unduloid and the two planes.
    const auto p = make_param(-0.5);
    const double T = 1.0;
    const auto one = CurvatureField::parse("1 + eps");
    PatchFn patch = [&](double t, double th) {
        return surface_point(p, 0.0, 0.0, t, th, 0.0).position;
    };
    const double vol = -volume_functional(patch, T, one);

    const double ztop = roulette(p, T).z;
    double rmax = 0.0;
    for (double t = 0.0; t <= T; t += 0.01)
        rmax = std::max(rmax, roulette(p, t).x);
    std::mt19937 rng(42u);
    std::uniform_real_distribution<double> ux(-rmax, rmax), uz(-ztop, ztop);
    const int N = 200000;
    int inside = 0;
    for (int i = 0; i < N; ++i) {
        const double x = ux(rng), y = ux(rng), z = uz(rng);
        // invert z(t) (monotone for a < 0) and compare radii
        const double t = brent(
            [&](double tt) { return roulette(p, tt).z - std::abs(z); }, 0.0, T, 1e-10);
        if (std::hypot(x, y) <= roulette(p, t).x) ++inside;
    }
    const double mc = 4.0 * rmax * rmax * 2.0 * ztop * inside / N;
    CHECK(std::abs(mc - vol) <= 0.01 * vol);
}

TEST_CASE("first variation identity") {
    const auto p = make_param(0.3);
    const double T = 0.5 * p.tau;
    const auto f = CurvatureField::parse("1 + eps*(x^2+y^2)");

    // translation family: boundary terms vanish, value matches dM/dp
    auto family = [&](double s) -> PatchFn {
        return [&p, s](double t, double th) {
            return surface_point(p, 0.3 + s, -0.2, t, th, 0.0).position;
        };
    };
    const auto fv = first_variation_check(family, T, f);
    CHECK(std::abs(fv.analytic - fv.numeric) <= 1e-6);
    const Melnikov M(p, T, f);
    CHECK(std::abs(fv.analytic - M.grad(0.3, -0.2)[0]) <= 1e-8);

    // normal-graph family with a smooth compactly supported profile
    auto bump = [T](double t) {
        const double u = t / T;
        return (std::abs(u) < 0.8) ? std::pow(std::cos(kPi * u / 1.6), 4) : 0.0;
    };
    auto family2 = [&](double s) -> PatchFn {
        return [&p, s, bump](double t, double th) {
            return surface_point(p, 0.0, 0.0, t, th, s * 0.05 * bump(t)).position;
        };
    };
    const auto fv2 = first_variation_check(family2, T, f);
    CHECK(std::abs(fv2.analytic - fv2.numeric) <= 1e-6);

    // frozen family
    auto family3 = [&](double) -> PatchFn {
        return [&p](double t, double th) {
            return surface_point(p, 0.0, 0.0, t, th, 0.0).position;
        };
    };
    const auto fv3 = first_variation_check(family3, T, f);
    CHECK(std::abs(fv3.analytic) <= 1e-10);
    CHECK(std::abs(fv3.numeric) <= 1e-10);
}

TEST_CASE("integration-by-parts identity for random periodic patches") {
    std::mt19937 rng(17u);
    std::uniform_real_distribution<double> d(-0.9, 0.9);
    auto mk = [&]() {
        const double a1 = d(rng), a2 = d(rng), a3 = d(rng);
        SmoothPatch P;
        P.value = [=](double t, double th) -> Vec3 {
            return {a1 * std::cos(t + 0.2) * std::cos(th), a2 * std::sin(th) + a3 * t,
                    a1 * std::cos(2 * th) * t * t};
        };
        P.dt = [=](double t, double th) -> Vec3 {
            return {-a1 * std::sin(t + 0.2) * std::cos(th), a3,
                    2 * a1 * std::cos(2 * th) * t};
        };
        P.dtheta = [=](double t, double th) -> Vec3 {
            return {-a1 * std::cos(t + 0.2) * std::sin(th), a2 * std::cos(th),
                    -2 * a1 * std::sin(2 * th) * t * t};
        };
        return P;
    };
    for (int rep = 0; rep < 5; ++rep)
        CHECK(wente_residual(mk(), mk(), mk(), 0.9) <= 1e-6);
}
