#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "delpmc/degeneracy.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/jacobi_field.hpp"

using namespace delpmc;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("first mode-0 roots") {
    const auto cyl = make_param(-0.5);
    for (int k = 0; k <= 3; ++k)
        CHECK(find_T0(cyl, k) == doctest::Approx((k + 0.5) * kPi).epsilon(1e-15));

    const auto p = make_param(-0.3);
    const double T = find_T0(p, 0);
    CHECK(T > 0.0);
    CHECK(T < 0.5 * p.tau);
    CHECK(std::abs(w0_closed(p, T)) <= 1e-11);

    // uniqueness: constant sign on the rest of the period interval
    const double first = w0_closed(p, T + 1e-6);
    for (int i = 0; i <= 200; ++i) {
        const double t = T + 1e-6 + (p.tau - T - 2e-6) * i / 200.0;
        CHECK(w0_closed(p, t) * first > 0.0);
    }
    CHECK_THROWS_AS(find_T0(p, -1), DomainError);
}

TEST_CASE("mode-1 set") {
    const auto p = make_param(0.5);
    const auto t1 = T1_set(p, 3.0 * p.tau);
    REQUIRE(t1.size() == 3);
    CHECK(t1[0] == doctest::Approx(0.5 * p.tau));
    CHECK(t1[1] == doctest::Approx(1.5 * p.tau));
    CHECK(t1[2] == doctest::Approx(2.5 * p.tau));
    CHECK(T1_set(make_param(-0.4), 10.0).empty());

    const auto p1 = make_param(1.0);
    for (double T : T1_set(p1, 4.0 * p1.tau))
        CHECK(std::abs(fundamental_pair(p1, 1, T).w) <= 1e-9);
}

TEST_CASE("scans for higher modes") {
    const auto p03 = make_param(0.3); // below the (sqrt(3)-1)/2 threshold
    const auto s2 = scan_zeros(p03, 2, 8.0 * p03.tau);
    CHECK(s2.zeros.empty());
    CHECK(s2.certificate);

    const auto p2 = make_param(2.0);
    const auto z = scan_zeros(p2, 2, 8.0 * p2.tau);
    CHECK_FALSE(z.zeros.empty());
    CHECK_FALSE(z.certificate);
    const auto bound = zero_gap_bound(p2, 2);
    REQUIRE(bound.has_value());
    for (size_t i = 1; i < z.zeros.size(); ++i)
        CHECK(z.zeros[i] - z.zeros[i - 1] >= *bound * (1.0 - 1e-9));

    CHECK_THROWS_AS(scan_zeros(p2, 1, 5.0), DomainError);
}

TEST_CASE("kernel dimensions") {
    const auto p = make_param(0.3);
    const auto generic = kernel_basis(p, 0.77 * p.tau);
    CHECK(generic.dim == 0);

    const auto half = kernel_basis(p, 0.5 * p.tau);
    CHECK(half.dim == 2);
    REQUIRE(half.labels.size() == 2);
    CHECK(half.labels[0].find("w1") != std::string::npos);
    CHECK(half.modes == std::vector<int>{1});

    const auto und = make_param(-0.3);
    const auto k0 = kernel_basis(und, find_T0(und, 0));
    CHECK(k0.dim == 1);
    CHECK(k0.labels == std::vector<std::string>{"w0"});

    CHECK_THROWS_AS(kernel_basis(p, -1.0), DomainError);
}

TEST_CASE("boundary jacobian") {
    const auto cyl = make_param(-0.5);
    CHECK(boundary_jacobian(cyl, kPi / 4) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    const auto p = make_param(0.6);
    for (int k = 0; k <= 2; ++k)
        CHECK(std::abs(boundary_jacobian(p, find_T0(p, k))) <= 1e-10);

    // finite-difference Jacobian of F(a,T) = (x(T), z(T))
    const double a = 0.6, T = 1.2, h = 1e-6;
    const auto pl = make_param(a - h), ph = make_param(a + h);
    const auto r = roulette(p, T);
    const double dxda = (roulette(ph, T).x - roulette(pl, T).x) / (2 * h);
    const double dzda = (roulette(ph, T).z - roulette(pl, T).z) / (2 * h);
    const double jac_fd = r.dz * dxda - r.dx * dzda;
    const double jac = boundary_jacobian(p, T);
    CHECK(std::abs(jac_fd - jac) <= 1e-4 * std::abs(jac));
}

TEST_CASE("degeneracy report invariants") {
    for (double a : {-0.6, 0.3, 1.2}) {
        const auto p = make_param(a);
        const auto rep = degeneracy_report(p, 4.0 * p.tau);
        // mode-0 roots inside their theorem brackets, one per period
        const auto& r0 = rep.roots.at(0);
        for (size_t k = 0; k < r0.size(); ++k) {
            CHECK(r0[k].T > r0[k].bracket_lo);
            CHECK(r0[k].T < r0[k].bracket_hi);
            CHECK(r0[k].k == static_cast<int>(k));
        }
        if (a > 0.0) {
            // mode-0 and mode-1 sets stay separated
            for (const auto& e0 : rep.roots.at(0))
                for (const auto& e1 : rep.roots.at(1))
                    CHECK(std::abs(e0.T - e1.T) > 1e-6 * p.tau);
        } else {
            CHECK(rep.roots.find(1) == rep.roots.end());
        }
        // flattened view is consistent with the per-mode lists
        size_t total = 0;
        for (const auto& [j, v] : rep.roots) total += v.size();
        CHECK(rep.flattened().size() == total);
    }
}
