#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "delpmc/delaunay.hpp"
#include "delpmc/elliptic.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/numerics.hpp"

using namespace delpmc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("make_param branches and guards") {
    const auto cyl = make_param(-0.5);
    CHECK(cyl.branch == Branch::Cylinder);
    CHECK(cyl.gamma == doctest::Approx(-0.25));
    CHECK(cyl.m == 0.0);
    CHECK(cyl.tau == doctest::Approx(kPi).epsilon(1e-15));

    const auto nod = make_param(1.0);
    CHECK(nod.branch == Branch::Nodoid);
    CHECK(nod.gamma == doctest::Approx(2.0));
    CHECK(nod.m == doctest::Approx(0.75));
    CHECK(nod.tau ==
          doctest::Approx(elliptic::complete_integrals(0.75).K / 2.0).epsilon(1e-14));

    const auto und = make_param(-0.9);
    CHECK(und.branch == Branch::Unduloid);
    CHECK(und.m == doctest::Approx(1.0 - std::pow(0.1 / 0.9, 2)).epsilon(1e-14));
    CHECK(und.tau ==
          doctest::Approx(elliptic::complete_integrals(und.m).K / 0.9).epsilon(1e-13));

    CHECK_THROWS_AS(make_param(0.0), DomainError);
    CHECK_THROWS_AS(make_param(-1.0), DomainError);
    CHECK_THROWS_AS(make_param(-1.2), DomainError);
    CHECK_THROWS_AS(make_param(1e-8), DomainError);
    CHECK_THROWS_AS(make_param(-1.0 + 1e-8), DomainError);
}

TEST_CASE("roulette closed form") {
    const auto cyl = make_param(-0.5);
    for (double t : {-3.0, 0.0, 1.7, 9.2}) {
        const auto r = roulette(cyl, t);
        CHECK(r.x == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(r.z == doctest::Approx(0.5 * t).epsilon(1e-15));
        CHECK(r.dz == doctest::Approx(0.5).epsilon(1e-15));
    }
    for (double a : {-0.3, 0.5}) {
        const auto p = make_param(a);
        CHECK(roulette(p, 0.0).x == doctest::Approx(1.0 + a).epsilon(1e-14));
        CHECK(roulette(p, p.tau).x == doctest::Approx(std::abs(a)).epsilon(1e-13));
    }
}

TEST_CASE("ode oracle properties") {
    for (double a : {-0.7, 0.4}) {
        const auto p = make_param(a);
        std::vector<double> grid;
        for (int i = 0; i <= 60; ++i) grid.push_back(3.0 * p.tau * i / 60.0);
        const auto ode = roulette_ode_oracle(a, grid);
        CHECK(ode.front().x == doctest::Approx(1.0 + a));
        CHECK(ode.front().dx == 0.0);
        CHECK(ode.front().z == 0.0);
        for (const auto& e : ode)
            CHECK(std::abs(e.x * e.x - e.dx * e.dx - e.dz * e.dz) <= 1e-9);
        // 2 tau periodicity
        const auto far = roulette_ode_oracle(
            a, std::vector<double>{0.0, 0.9, 0.9 + 2.0 * p.tau});
        CHECK(std::abs(far[1].x - far[2].x) <= 1e-8);
    }
    CHECK_THROWS_AS(roulette_ode_oracle(0.5, std::vector<double>{1.0, 2.0}),
                    DomainError);
}

TEST_CASE("p weight") {
    const auto p = make_param(0.7);
    CHECK(p_weight(p, 0.0) ==
          doctest::Approx(1.0 + 2.0 * p.gamma).epsilon(1e-13));
    CHECK(p_weight(p, 0.5 * p.tau) ==
          doctest::Approx(2.0 * std::abs(p.gamma)).epsilon(1e-12));
    // evenness and tau-periodicity
    for (double t : {0.3, 1.1})
        CHECK(p_weight(p, -t) == doctest::Approx(p_weight(p, t)).epsilon(1e-12));
    CHECK(p_weight(p, 0.4 + p.tau) == doctest::Approx(p_weight(p, 0.4)).epsilon(1e-11));

    // p'' = 2[2(1+2g)p - 3p^2 + 4g^2] by 5-point differences
    const double h = 1e-3;
    for (int i = 0; i < 50; ++i) {
        const double t = 0.03 + i * p.tau / 25.0;
        const double d2 =
            (-p_weight(p, t + 2 * h) + 16 * p_weight(p, t + h) - 30 * p_weight(p, t) +
             16 * p_weight(p, t - h) - p_weight(p, t - 2 * h)) /
            (12 * h * h);
        const double rhs = 2.0 * (2.0 * (1.0 + 2.0 * p.gamma) * p_weight(p, t) -
                                  3.0 * std::pow(p_weight(p, t), 2) +
                                  4.0 * p.gamma * p.gamma);
        CHECK(std::abs(d2 - rhs) <= 1e-6);
    }
}

TEST_CASE("profile a-derivatives") {
    const auto p = make_param(0.4);
    const double h = 1e-6;
    const auto lo = make_param(0.4 - h), hi = make_param(0.4 + h);
    const auto d = roulette_da(p, 1.1);
    CHECK(std::abs(d.dx_da - (roulette(hi, 1.1).x - roulette(lo, 1.1).x) / (2 * h)) <=
          1e-5);
    CHECK(std::abs(d.dz_da - (roulette(hi, 1.1).z - roulette(lo, 1.1).z) / (2 * h)) <=
          1e-5);

    const auto d0 = roulette_da(p, 0.0);
    CHECK(d0.dx_da == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(d0.dz_da) <= 1e-13);

    CHECK_THROWS_AS(roulette_da(make_param(-0.5), 1.0), DomainError);
}

TEST_CASE("surface point and graph validity") {
    const auto p = make_param(-0.3);
    std::mt19937 rng(3u);
    std::uniform_real_distribution<double> td(-4.0, 4.0), thd(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        const auto s = surface_point(p, 0.0, 0.0, td(rng), thd(rng), 0.0);
        CHECK(std::abs(s.normal.norm() - 1.0) <= 1e-12);
    }
    const auto s = surface_point(p, 0.2, -0.1, 1.3, 0.7, 0.0);
    const auto r = roulette(p, 1.3);
    CHECK(s.position.x == doctest::Approx(r.x * std::cos(0.7) + 0.2).epsilon(1e-14));
    CHECK(s.position.y == doctest::Approx(r.x * std::sin(0.7) - 0.1).epsilon(1e-14));
    CHECK(s.position.z == doctest::Approx(r.z).epsilon(1e-14));

    // triple product identity (X+phi N)_t ^ (X+phi N)_th . N by differences
    const double phi = 0.05, hh = 1e-5;
    for (double t : {0.4, 1.9})
        for (double th : {-1.0, 2.1}) {
            auto X = [&](double tt, double hh2) {
                return surface_point(p, 0.0, 0.0, tt, hh2, phi).position;
            };
            const Vec3 Xt = (1.0 / (2 * hh)) * (X(t + hh, th) - X(t - hh, th));
            const Vec3 Xth = (1.0 / (2 * hh)) * (X(t, th + hh) - X(t, th - hh));
            const Vec3 N = surface_point(p, 0.0, 0.0, t, th, 0.0).normal;
            const auto ru = roulette(p, t);
            const double x2 = ru.x * ru.x;
            const double expected =
                x2 * (1.0 - 2.0 * phi +
                      phi * phi / x2 * (x2 - p.gamma * p.gamma / x2));
            CHECK(std::abs(Xt.cross(Xth).dot(N) - expected) <= 1e-8);
        }

    // degenerate graph rejected: at phi = x/ (1 - ...) large enough
    CHECK_THROWS_AS(surface_point(p, 0.0, 0.0, 0.0, 0.0, 0.9), DomainError);
}

TEST_CASE("mean curvature invariances") {
    const auto p = make_param(0.5);
    const double h = default_fd_step(p);
    PatchFn base = [&](double t, double th) {
        return surface_point(p, 0.0, 0.0, t, th, 0.0).position;
    };
    PatchFn moved = [&](double t, double th) {
        return surface_point(p, 1.7, -2.4, t, th, 0.0).position;
    };
    for (double t : {0.2, 1.4})
        for (double th : {0.0, 2.0})
            CHECK(mean_curvature(base, t, th, h) ==
                  doctest::Approx(mean_curvature(moved, t, th, h)).epsilon(1e-12));

    // degenerate metric error
    PatchFn bad = [](double, double) { return Vec3{1.0, 2.0, 3.0}; };
    CHECK_THROWS_AS(mean_curvature(bad, 0.0, 0.0, 1e-4), NumericalError);

    // edge-aware overload agrees with the central one in the interior
    CHECK(mean_curvature(base, 0.7, 0.3, h, 0.0, 2.0) ==
          doctest::Approx(mean_curvature(base, 0.7, 0.3, h)).epsilon(1e-12));
}

TEST_CASE("profile symmetry and integral identities") {
    for (double a : {-0.8, -0.25, 0.6, 2.5}) {
        const auto p = make_param(a);
        for (double t : {0.3, 1.2, 2.9}) {
            const auto rp = roulette(p, t), rm = roulette(p, -t);
            CHECK(std::abs(rp.x - rm.x) <= 1e-10);
            CHECK(std::abs(rp.z + rm.z) <= 1e-10);
        }
        // z equals the quadrature of x^2 - gamma t
        const double t0 = 1.7;
        const double zq = integrate([&](double s) {
            const auto r = roulette(p, s);
            return r.x * r.x;
        }, 0.0, t0) - p.gamma * t0;
        CHECK(std::abs(roulette(p, t0).z - zq) <= 1e-9);
        // int_0^tau x^2 = scale * E(m)
        const double I = integrate([&](double s) {
            const auto r = roulette(p, s);
            return r.x * r.x;
        }, 0.0, p.tau);
        CHECK(std::abs(I - p.scale * elliptic::complete_integrals(p.m).E) <= 1e-9);
    }
}

TEST_CASE("mesh export") {
    const auto cyl = make_param(-0.5);
    const std::string path = "test_cyl_mesh.obj";
    export_mesh(cyl, kPi, 0.0, 0.0, {}, path, 16, 16);
    std::ifstream is(path);
    REQUIRE(is.good());
    std::string line;
    int vcount = 0, fcount = 0;
    while (std::getline(is, line)) {
        if (line.rfind("v ", 0) == 0) {
            ++vcount;
            std::istringstream ss(line.substr(2));
            double x, y, z;
            ss >> x >> y >> z;
            CHECK(std::abs(std::hypot(x, y) - 0.5) <= 1e-12);
        } else if (line.rfind("f ", 0) == 0) {
            ++fcount;
        }
    }
    CHECK(vcount == 17 * 16);
    CHECK(fcount == 2 * 16 * 16);
    std::remove(path.c_str());

    // immersed nodoid exports without error; boundary radius matches x(T)
    const auto nod = make_param(1.0);
    export_mesh(nod, nod.tau, 0.0, 0.0, {}, path, 8, 8);
    {
        std::ifstream is2(path);
        std::string l2;
        double first_radius = -1.0;
        while (std::getline(is2, l2))
            if (l2.rfind("v ", 0) == 0) {
                std::istringstream ss(l2.substr(2));
                double x, y, z;
                ss >> x >> y >> z;
                first_radius = std::hypot(x, y);
                break;
            }
        CHECK(std::abs(first_radius - roulette(nod, nod.tau).x) <= 1e-10);
    }
    std::remove(path.c_str());

    CHECK_THROWS_AS(export_mesh(cyl, 1.0, 0.0, 0.0, {}, path, 4, 16), DomainError);
}
