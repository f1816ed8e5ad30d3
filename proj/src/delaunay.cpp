#include "delpmc/delaunay.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>

#include "delpmc/elliptic.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/numerics.hpp"
#include "delpmc/ode.hpp"

namespace delpmc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEdgeGuard = 1e-6;
} // namespace

DelaunayParam make_param(double a) {
    if (!(a > -1.0 + kEdgeGuard) || std::abs(a) < kEdgeGuard)
        throw DomainError(
            "Delaunay parameter must lie in (-1, 0) u (0, inf); values within "
            "1e-6 of {-1, 0} are rejected (m -> 1 there). Got a = " +
            std::to_string(a));

    DelaunayParam p;
    p.a = a;
    p.gamma = a * (1.0 + a);
    if (a == -0.5) {
        p.branch = Branch::Cylinder;
        p.m = 0.0;
        p.scale = 0.5;
        p.tau = kPi;
        return p;
    }
    p.branch = a < 0.0 ? Branch::Unduloid : Branch::Nodoid;
    if (a > -0.5) {
        const double r = a / (1.0 + a);
        p.m = 1.0 - r * r;
        p.scale = 1.0 + a;
    } else {
        const double r = (1.0 + a) / a;
        p.m = 1.0 - r * r;
        p.scale = -a;
    }
    p.tau = elliptic::complete_integrals(p.m).K / p.scale;
    return p;
}

RouletteEval roulette(const DelaunayParam& param, double t) {
    if (param.cylinder())
        return {t, 0.5, 0.0, 0.5 * t, 0.5};

    const double c = param.scale;
    const double m = param.m;
    // On a in (-1, -1/2) the representation is shifted by one half-period.
    const double u = param.second_branch() ? c * (t - param.tau) : c * t;
    const auto d = elliptic::dn({u, m});
    const double x = c * d.dn;
    const double dx = c * c * d.ddn_ds;

    // z = int_0^t x^2 - gamma t; the integral is c * E(am(u)|m) up to the
    // branch-shift constant c * E(m).
    double integral = c * elliptic::incomplete_E({elliptic::amplitude({u, m}), m});
    if (param.second_branch())
        integral += c * elliptic::complete_integrals(m).E;
    const double z = integral - param.gamma * t;
    const double dz = x * x - param.gamma;
    return {t, x, dx, z, dz};
}

std::vector<RouletteEval> roulette_ode_oracle(double a, std::span<const double> t_grid,
                                              double tol) {
    const DelaunayParam param = make_param(a);
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw DomainError("roulette_ode_oracle: grid must start at 0");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw DomainError("roulette_ode_oracle: grid must be ascending");

    const double g = param.gamma;
    auto rhs = [g](double, const std::array<double, 3>& y) {
        return std::array<double, 3>{y[1], (1.0 + 2.0 * g) * y[0] - 2.0 * y[0] * y[0] * y[0],
                                     y[0] * y[0] - g};
    };
    std::vector<RouletteEval> out;
    out.reserve(t_grid.size());
    std::array<double, 3> y = {1.0 + a, 0.0, 0.0};
    double t = 0.0;
    out.push_back({0.0, y[0], y[1], y[2], y[0] * y[0] - g});
    for (size_t i = 1; i < t_grid.size(); ++i) {
        y = dopri5<3>(rhs, t, y, t_grid[i], tol);
        t = t_grid[i];
        out.push_back({t, y[0], y[1], y[2], y[0] * y[0] - g});
    }
    return out;
}

double p_weight(const DelaunayParam& param, double t) {
    const auto r = roulette(param, t);
    const double x2 = r.x * r.x;
    return x2 + param.gamma * param.gamma / x2;
}

RouletteDeriv roulette_da(const DelaunayParam& param, double t) {
    if (param.cylinder())
        throw DomainError("roulette_da: formulas are singular at a = -1/2");
    const auto r = roulette(param, t);
    const double g = param.gamma;
    const double den = g * (1.0 + 2.0 * param.a);
    const double dx_da =
        ((1.0 + 2.0 * g) * r.x + 2.0 * g * r.dx * t + r.dx * r.z - r.x * r.dz) / den;
    const double dz_da =
        (2.0 * g * r.z + 2.0 * g * r.dz * t - g * t + r.x * r.dx + r.z * r.dz) / den;
    return {dx_da, dz_da};
}

double graph_validity(const DelaunayParam& param, double t, double phi) {
    const auto r = roulette(param, t);
    const double x2 = r.x * r.x;
    return 1.0 - 2.0 * phi + phi * phi / x2 * (x2 - param.gamma * param.gamma / x2);
}

SurfaceSample surface_point(const DelaunayParam& param, double p, double q,
                            double t, double theta, double phi) {
    if (phi != 0.0 && graph_validity(param, t, phi) <= 0.0)
        throw DomainError("surface_point: normal graph degenerates at this phi");
    const auto r = roulette(param, t);
    const double ct = std::cos(theta), st = std::sin(theta);
    // N = (1/x)(-z' cos, -z' sin, x'), unit by the speed identity
    const Vec3 normal = {-r.dz * ct / r.x, -r.dz * st / r.x, r.dx / r.x};
    Vec3 pos = {r.x * ct + p, r.x * st + q, r.z};
    pos = pos + phi * normal;
    return {pos, normal, t, theta};
}

namespace {

double curvature_from_derivatives(const Vec3& Xt, const Vec3& Xh, const Vec3& Xtt,
                                  const Vec3& Xth, const Vec3& Xhh) {
    const double E = Xt.dot(Xt), F = Xt.dot(Xh), G = Xh.dot(Xh);
    const double W2 = E * G - F * F;
    if (!(W2 > 0.0))
        throw NumericalError("mean_curvature: degenerate metric at the point");
    const Vec3 n = Xt.cross(Xh);
    const Vec3 N = (1.0 / n.norm()) * n;
    const double L = Xtt.dot(N), M = Xth.dot(N), Nn = Xhh.dot(N);
    return (E * Nn - 2.0 * F * M + G * L) / (2.0 * W2);
}

} // namespace

double mean_curvature(const PatchFn& patch, double t, double theta, double h) {
    // 4th-order central first/second derivatives; cross derivative as the
    // composition of the two first-derivative stencils.
    const double c1[4] = {1.0, -8.0, 8.0, -1.0};       // offsets -2,-1,1,2 over 12h
    const double off[4] = {-2.0, -1.0, 1.0, 2.0};

    auto t_line = [&](double dthe) {
        std::array<Vec3, 5> v;
        v[0] = patch(t - 2 * h, theta + dthe);
        v[1] = patch(t - h, theta + dthe);
        v[2] = patch(t, theta + dthe);
        v[3] = patch(t + h, theta + dthe);
        v[4] = patch(t + 2 * h, theta + dthe);
        return v;
    };
    const auto lt = t_line(0.0);
    const Vec3 X = lt[2];
    const Vec3 Xt = (1.0 / (12.0 * h)) * (lt[0] - 8.0 * lt[1] + 8.0 * lt[3] - lt[4]);
    const Vec3 Xtt = (1.0 / (12.0 * h * h)) *
                     (-1.0 * lt[0] + 16.0 * lt[1] - 30.0 * lt[2] + 16.0 * lt[3] - lt[4]);

    std::array<Vec3, 5> lh;
    lh[0] = patch(t, theta - 2 * h);
    lh[1] = patch(t, theta - h);
    lh[2] = X;
    lh[3] = patch(t, theta + h);
    lh[4] = patch(t, theta + 2 * h);
    const Vec3 Xh = (1.0 / (12.0 * h)) * (lh[0] - 8.0 * lh[1] + 8.0 * lh[3] - lh[4]);
    const Vec3 Xhh = (1.0 / (12.0 * h * h)) *
                     (-1.0 * lh[0] + 16.0 * lh[1] - 30.0 * lh[2] + 16.0 * lh[3] - lh[4]);

    Vec3 Xth = {0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        Vec3 dth = {0, 0, 0};
        for (int j = 0; j < 4; ++j)
            dth = dth + c1[j] * patch(t + off[i] * h, theta + off[j] * h);
        Xth = Xth + c1[i] * dth;
    }
    Xth = (1.0 / (144.0 * h * h)) * Xth;

    return curvature_from_derivatives(Xt, Xh, Xtt, Xth, Xhh);
}

double mean_curvature(const PatchFn& patch, double t, double theta, double h,
                      double t_lo, double t_hi) {
    if (t - 2 * h >= t_lo && t + 2 * h <= t_hi)
        return mean_curvature(patch, t, theta, h);
    if (t_hi - t_lo < 5.0 * h)
        throw DomainError("mean_curvature: strip narrower than the stencil");

    // 6-node t-stencil at integer offsets shifted to stay inside the strip
    const double s_min = std::ceil((t_lo - t) / h - 1e-12);
    const double s_max = std::floor((t_hi - t) / h + 1e-12) - 5.0;
    const double s = std::clamp(-2.0, s_min, s_max);
    std::array<double, 6> toff;
    for (int i = 0; i < 6; ++i) toff[i] = (s + i) * h;
    const auto w1 = fd_weights(0.0, toff, 1);
    const auto w2 = fd_weights(0.0, toff, 2);

    const double ch[4] = {1.0, -8.0, 8.0, -1.0}; // theta: central, over 12h
    const double hoff[4] = {-2.0, -1.0, 1.0, 2.0};

    Vec3 Xt{}, Xtt{}, Xth{};
    for (int i = 0; i < 6; ++i) {
        const Vec3 v = patch(t + toff[i], theta);
        Xt = Xt + w1[i] * v;
        Xtt = Xtt + w2[i] * v;
        Vec3 dth{};
        for (int j = 0; j < 4; ++j)
            dth = dth + ch[j] * patch(t + toff[i], theta + hoff[j] * h);
        Xth = Xth + (w1[i] / (12.0 * h)) * dth;
    }
    const Vec3 X = patch(t, theta);
    std::array<Vec3, 5> lh;
    lh[0] = patch(t, theta - 2 * h);
    lh[1] = patch(t, theta - h);
    lh[2] = X;
    lh[3] = patch(t, theta + h);
    lh[4] = patch(t, theta + 2 * h);
    const Vec3 Xh = (1.0 / (12.0 * h)) * (lh[0] - 8.0 * lh[1] + 8.0 * lh[3] - lh[4]);
    const Vec3 Xhh = (1.0 / (12.0 * h * h)) *
                     (-1.0 * lh[0] + 16.0 * lh[1] - 30.0 * lh[2] + 16.0 * lh[3] - lh[4]);

    return curvature_from_derivatives(Xt, Xh, Xtt, Xth, Xhh);
}

double default_fd_step(const DelaunayParam& param) {
    return 1e-4 * std::max(1.0, param.tau);
}

void export_mesh(const DelaunayParam& param, double T, double p, double q,
                 std::span<const double> phi, const std::string& path,
                 int n_t, int n_theta) {
    if (n_t < 8 || n_theta < 8)
        throw DomainError("export_mesh: grid resolution must be >= 8 per direction");
    if (!phi.empty() && phi.size() != static_cast<size_t>((n_t + 1) * n_theta))
        throw DomainError("export_mesh: phi grid must be (n_t+1) x n_theta");

    std::ofstream os(path);
    if (!os) throw NumericalError("export_mesh: cannot open " + path);
    os.precision(17);

    for (int i = 0; i <= n_t; ++i) {
        const double t = -T + 2.0 * T * i / n_t;
        for (int k = 0; k < n_theta; ++k) {
            const double theta = -kPi + 2.0 * kPi * k / n_theta;
            const double ph = phi.empty() ? 0.0 : phi[i * n_theta + k];
            const auto s = surface_point(param, p, q, t, theta, ph);
            os << "v " << s.position.x << ' ' << s.position.y << ' '
               << s.position.z << '\n';
        }
    }
    auto idx = [n_theta](int i, int k) { return i * n_theta + (k % n_theta) + 1; };
    for (int i = 0; i < n_t; ++i)
        for (int k = 0; k < n_theta; ++k) {
            os << "f " << idx(i, k) << ' ' << idx(i + 1, k) << ' '
               << idx(i + 1, k + 1) << '\n';
            os << "f " << idx(i, k) << ' ' << idx(i + 1, k + 1) << ' '
               << idx(i, k + 1) << '\n';
        }
    if (!os) throw NumericalError("export_mesh: write failed for " + path);
}

} // namespace delpmc
