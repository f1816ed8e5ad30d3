#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "delpmc/degeneracy.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/jacobi_field.hpp"
#include "delpmc/numerics.hpp"
#include "delpmc/pmc_solver.hpp"

using namespace delpmc;

namespace {
constexpr double kPi = std::numbers::pi;

double weighted_inner(const DelaunayParam& param, const GridFunction& u,
                      const GridFunction& v) {
    const GridSpec& s = u.spec();
    const double ht = s.ht(), hth = 2.0 * kPi / s.ntheta;
    double acc = 0.0;
    for (int i = 0; i <= s.nt; ++i) {
        const auto r = roulette(param, s.t(i));
        const double w = (i == 0 || i == s.nt) ? 0.5 : 1.0;
        for (int k = 0; k < s.ntheta; ++k)
            acc += w * ht * hth * r.x * r.x * u.at(i, k) * v.at(i, k);
    }
    return acc;
}
} // namespace

TEST_CASE("inversion recovers smooth preimages") {
    const auto p = make_param(-0.3);
    const double T = 1.0;
    GridSpec spec{T, 256, 32};
    const auto psi = GridFunction::sample(
        spec,
        [T](double t, double th) {
            const double b = std::cos(0.5 * kPi * t / T);
            return b * b * (0.7 + 0.3 * std::cos(2 * th));
        },
        true, true);
    const auto back = jacobi_invert(p, T, jacobi_apply(p, psi));
    double worst = 0.0;
    for (size_t i = 0; i < psi.values().size(); ++i)
        worst = std::max(worst, std::abs(psi.values()[i] - back.values()[i]));
    CHECK(worst <= 1e-7);

    // contract checks
    const auto odd = GridFunction::sample(
        spec, [](double t, double th) { return t * std::cos(th); }, false, false);
    CHECK_THROWS_AS(jacobi_invert(p, T, odd), ContractError);
    CHECK_THROWS_AS(jacobi_invert(p, 2.0, psi), DomainError);
}

TEST_CASE("discrete self-adjointness in the weighted inner product") {
    const auto p = make_param(0.4);
    const double T = 0.9 * p.tau;
    GridSpec spec{T, 128, 16};
    std::mt19937 rng(9u);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int rep = 0; rep < 3; ++rep) {
        const double a1 = d(rng), a2 = d(rng), a3 = d(rng);
        auto mk = [&](double b1, double b2, double b3) {
            return GridFunction::sample(
                spec,
                [=](double t, double th) {
                    const double c = std::cos(0.5 * kPi * t / T);
                    return c * c * (b1 + b2 * std::cos(th) + b3 * std::sin(2 * th));
                },
                true, true);
        };
        const auto u = mk(a1, a2, a3);
        const auto v = mk(a3, a1, a2);
        const double lhs = weighted_inner(p, jacobi_apply(p, u), v);
        const double rhs = weighted_inner(p, u, jacobi_apply(p, v));
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("nondegenerate solve") {
    const auto p = make_param(-0.5);
    const auto field = CurvatureField::parse("1 + eps*cos(z)");

    const auto zero = solve_nondegenerate(p, 1.0, field, 0.0, 0.0, 0.0);
    CHECK(zero.converged);
    CHECK(zero.iterations <= 1);
    CHECK(zero.phi.sup_norm() == 0.0);

    const auto s1 = solve_nondegenerate(p, 1.0, field, 1e-3, 0.0, 0.0);
    CHECK(s1.converged);
    CHECK(s1.residual_inf <= 1e-8);
    CHECK(s1.phi.evenness_defect() <= 1e-10);
    CHECK(s1.phi.boundary_defect() == 0.0);

    const auto s2 = solve_nondegenerate(p, 1.0, field, 5e-4, 0.0, 0.0);
    CHECK(s1.phi.sup_norm() / s2.phi.sup_norm() ==
          doctest::Approx(2.0).epsilon(0.1));

    // non-even field rejected by (H2)
    CHECK_THROWS_AS(
        solve_nondegenerate(p, 1.0, CurvatureField::parse("1 + eps*z"), 1e-3, 0, 0),
        ContractError);
}

TEST_CASE("axisymmetric path") {
    const auto p = make_param(-0.5);
    const auto field = CurvatureField::parse("1 + eps*cos(z)");

    const auto a0 = solve_axisymmetric(p, 1.0, field, 0.0);
    CHECK(a0.phi.sup_norm() == 0.0);

    const auto ax = solve_axisymmetric(p, 1.0, field, 1e-3);
    const auto nd = solve_nondegenerate(p, 1.0, field, 1e-3, 0.0, 0.0);
    double worst = 0.0;
    for (size_t i = 0; i < ax.phi.values().size(); ++i)
        worst = std::max(worst, std::abs(ax.phi.values()[i] - nd.phi.values()[i]));
    CHECK(worst <= 1e-8);

    // works at a mode-1 degeneracy value for a > 0 (the 1D path never sees it)
    const auto pn = make_param(0.5);
    const auto at1 = solve_axisymmetric(pn, 0.5 * pn.tau, field, 1e-3);
    CHECK(at1.converged);

    CHECK_THROWS_AS(
        solve_axisymmetric(p, 1.0, CurvatureField::parse("1 + eps*(x^2+y^2)"), 1e-3),
        ContractError);
}

TEST_CASE("lyapunov-schmidt inner solve") {
    const auto p = make_param(0.3);
    const double T = 0.5 * p.tau;
    const auto field = CurvatureField::parse("1 + eps*(x^2+y^2)");

    const auto z = solve_lyapunov_schmidt(p, T, field, 0.0, 0.3, -0.1);
    CHECK(z.phi.sup_norm() == 0.0);
    CHECK(z.lambda1 == 0.0);
    CHECK(z.lambda2 == 0.0);

    const auto s = solve_lyapunov_schmidt(p, T, field, 1e-3, 0.3, -0.2);
    CHECK(s.converged);
    CHECK(s.residual_inf <= 1e-8);
    // kernel orthogonality of the correction
    const GridSpec spec = s.phi.spec();
    GridFunction wc(spec, false, true), ws(spec, false, true);
    for (int i = 0; i <= spec.nt; ++i)
        for (int k = 0; k < spec.ntheta; ++k) {
            const double w1 = fundamental_pair(p, 1, spec.t(i)).w;
            wc.at(i, k) = w1 * std::cos(spec.theta(k));
            ws.at(i, k) = w1 * std::sin(spec.theta(k));
        }
    CHECK(std::abs(weighted_inner(p, s.phi, wc)) <= 1e-9);
    CHECK(std::abs(weighted_inner(p, s.phi, ws)) <= 1e-9);

    // preconditions
    CHECK_THROWS_AS(solve_lyapunov_schmidt(p, 0.8 * p.tau, field, 1e-3, 0, 0),
                    DomainError); // kernel dim 0 there
    CHECK_THROWS_AS(
        solve_lyapunov_schmidt(make_param(0.9), 0.5 * make_param(0.9).tau, field,
                               1e-3, 0, 0),
        DomainError); // a beyond (sqrt(3)-1)/2
}

TEST_CASE("translation equivariance of the outer solve") {
    const auto p = make_param(0.3);
    const double T = 0.5 * p.tau;
    const double eps = 1e-3;
    const auto base = CurvatureField::parse("1 + eps*(x^2+y^2)");
    const auto moved = CurvatureField::parse("1 + eps*((x-0.4)^2+y^2)");
    const auto s0 = solve_with_translation(p, T, base, eps, 0.0, 0.0);
    const auto s1 = solve_with_translation(p, T, moved, eps, 0.3, 0.1);
    CHECK(std::abs(s1.p - (s0.p + 0.4)) <= 1e-6);
    CHECK(std::abs(s1.q - s0.q) <= 1e-6);
    CHECK(std::hypot(s1.lambda1, s1.lambda2) <= 1e-8);
}

TEST_CASE("obstruction integral") {
    const auto cyl = make_param(-0.5);
    const auto one = CurvatureField::parse("1 + eps");
    const double v = obstruction_integral(cyl, 0, one, 0.0, 0.0);
    CHECK(v == doctest::Approx(-kPi).epsilon(1e-9));

    // sign flips with the sign of Htilde
    const auto minus = CurvatureField::parse("1 - eps");
    CHECK(obstruction_integral(cyl, 0, minus, 0.0, 0.0) ==
          doctest::Approx(kPi).epsilon(1e-9));

    CHECK_THROWS_AS(
        obstruction_integral(cyl, 0, CurvatureField::parse("1 + sin(eps)*x"), 0, 0),
        DomainError);
}

TEST_CASE("inverse norm probe") {
    const double T0 = limit_profile_root();
    CHECK(std::abs(-1.0 + T0 * std::tanh(T0)) <= 1e-12);
    CHECK_THROWS_AS(inverse_norm_probe(std::array<double, 1>{0.1}, 0.9 * T0,
                                       [](double) { return 1.0; }),
                    DomainError);

    // g orthogonal to the limit profile: inconclusive flag
    const double T = 1.05 * T0;
    const double I1 = integrate(
        [](double s) {
            const double c = 1.0 / std::cosh(s);
            return (1.0 - s * std::tanh(s)) * c * c;
        },
        0.0, T);
    const double Is = integrate(
        [](double s) {
            const double c = 1.0 / std::cosh(s);
            return s * (1.0 - s * std::tanh(s)) * c * c;
        },
        0.0, T);
    const double alpha = -I1 / Is;
    const auto probe = inverse_norm_probe(
        std::array<double, 1>{0.1}, T,
        [alpha](double s) { return 1.0 + alpha * s; });
    CHECK(probe[0].inconclusive);

    // fixed a, T sweeping through the first degeneracy value: the norm spikes
    const auto p = make_param(-0.9);
    const double Tk = find_T0(p, 0); // about 1.3187 > T0
    double at_root = 0.0, away = 0.0;
    for (double dT : {-0.15, -0.002, 0.002, 0.15}) {
        const auto e = inverse_norm_probe(std::array<double, 1>{-0.9}, Tk + dT,
                                          [](double) { return 1.0; });
        if (std::abs(dT) < 0.01)
            at_root = std::max(at_root, e[0].norm);
        else
            away = std::max(away, e[0].norm);
    }
    CHECK(at_root > 20.0 * away);
}
