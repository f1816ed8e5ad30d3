#include "delpmc/pmc_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <optional>
#include <random>

#include "delpmc/degeneracy.hpp"
#include "delpmc/errors.hpp"
#include "delpmc/jacobi_field.hpp"
#include "delpmc/numerics.hpp"

namespace delpmc {

namespace {

constexpr double kPi = std::numbers::pi;

uint64_t key_of(double t) {
    uint64_t k;
    std::memcpy(&k, &t, sizeof(k));
    return k;
}

// composite Simpson weights (3/8 tail when the interval count is odd)
std::vector<double> quad_weights(int n, double h) {
    std::vector<double> w(n + 1, 0.0);
    int m = (n % 2 == 0) ? n : n - 3;
    for (int i = 0; i + 2 <= m; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (n % 2 != 0) {
        w[n - 3] += 3.0 * h / 8.0;
        w[n - 2] += 9.0 * h / 8.0;
        w[n - 1] += 9.0 * h / 8.0;
        w[n] += 3.0 * h / 8.0;
    }
    return w;
}

struct HalfGrid {
    double T = 0.0, h = 0.0;
    int n = 0;
    std::vector<double> t, x, x2, pa, qw;
};

HalfGrid make_half_grid(const DelaunayParam& param, double T, int n) {
    HalfGrid g;
    g.T = T;
    g.n = n;
    g.h = T / n;
    g.t.resize(n + 1);
    g.x.resize(n + 1);
    g.x2.resize(n + 1);
    g.pa.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        g.t[i] = T * i / n;
        const auto r = roulette(param, g.t[i]);
        g.x[i] = r.x;
        g.x2[i] = r.x * r.x;
        g.pa[i] = g.x2[i] + param.gamma * param.gamma / g.x2[i];
    }
    g.qw = quad_weights(n, g.h);
    return g;
}

// w_{a,j} samples at the half-grid nodes
std::vector<double> kernel_samples(const DelaunayParam& param, int j, const HalfGrid& g) {
    std::vector<double> w(g.n + 1);
    if (j == 0) {
        for (int i = 0; i <= g.n; ++i)
            w[i] = param.cylinder() ? -std::cos(g.t[i]) : w0_closed(param, g.t[i]);
    } else if (j == 1) {
        for (int i = 0; i <= g.n; ++i) w[i] = fundamental_pair(param, 1, g.t[i]).w;
    } else {
        auto wj = cached_wj(param, j, g.T * (1.0 + 1e-9));
        for (int i = 0; i <= g.n; ++i) w[i] = wj->value(g.t[i]);
    }
    return w;
}

// Numerov tridiagonal coefficients for y'' = q y + r on the half grid with
// an even (Neumann) row at t = 0 and y(T) = 0. Unknowns y_0..y_{n-1}.
struct NumerovSystem {
    std::vector<double> sub, diag, sup; // tridiagonal bands
    std::vector<double> rhs_w;          // not used; rhs built per call
};

std::vector<double> numerov_rhs(const HalfGrid& g, std::span<const double> r) {
    const double c = g.h * g.h / 12.0;
    std::vector<double> rho(g.n);
    rho[0] = c * (2.0 * r[1] + 10.0 * r[0]);
    for (int i = 1; i < g.n; ++i) rho[i] = c * (r[i + 1] + 10.0 * r[i] + r[i - 1]);
    return rho;
}

void numerov_bands(const HalfGrid& g, int j, std::vector<double>& sub,
                   std::vector<double>& diag, std::vector<double>& sup) {
    const int n = g.n;
    const double c = g.h * g.h / 12.0;
    auto q = [&](int i) { return static_cast<double>(j) * j - 2.0 * g.pa[i]; };
    sub.assign(n, 0.0);
    diag.assign(n, 0.0);
    sup.assign(n, 0.0);
    diag[0] = -(2.0 + 10.0 * c * q(0));
    sup[0] = 2.0 * (1.0 - c * q(1));
    for (int i = 1; i < n; ++i) {
        sub[i] = 1.0 - c * q(i - 1);
        diag[i] = -(2.0 + 10.0 * c * q(i));
        if (i < n - 1) sup[i] = 1.0 - c * q(i + 1);
    }
}

// plain tridiagonal (Thomas) solve; rhs has n entries, returns y_0..y_n
// (y_n = 0 appended)
std::vector<double> numerov_solve(const HalfGrid& g, int j, std::span<const double> r) {
    const int n = g.n;
    std::vector<double> sub, diag, sup;
    numerov_bands(g, j, sub, diag, sup);
    std::vector<double> rho = numerov_rhs(g, r);

    std::vector<double> cp(n), dp(n);
    cp[0] = sup[0] / diag[0];
    dp[0] = rho[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double m = diag[i] - sub[i] * cp[i - 1];
        cp[i] = (i < n - 1 ? sup[i] : 0.0) / m;
        dp[i] = (rho[i] - sub[i] * dp[i - 1]) / m;
    }
    std::vector<double> y(n + 1, 0.0);
    y[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) y[i] = dp[i] - cp[i] * y[i + 1];
    return y;
}

// bordered solve: y'' = q y + (r + mu * s), <x^2 w, y> = d; returns (y, mu)
std::pair<std::vector<double>, double> numerov_solve_bordered(
    const HalfGrid& g, int j, std::span<const double> r, std::span<const double> w,
    double d) {
    const int n = g.n;
    std::vector<double> sub, diag, sup;
    numerov_bands(g, j, sub, diag, sup);
    const auto rho = numerov_rhs(g, r);

    std::vector<double> s(n + 1);
    for (int i = 0; i <= n; ++i) s[i] = 2.0 * g.x2[i] * w[i];
    const auto scol = numerov_rhs(g, s);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd b(n + 1);
    for (int i = 0; i < n; ++i) {
        A(i, i) = diag[i];
        if (i > 0) A(i, i - 1) = sub[i];
        if (i < n - 1) A(i, i + 1) = sup[i];
        A(i, n) = -scol[i];
        b(i) = rho[i];
    }
    for (int i = 0; i < n; ++i) A(n, i) = g.qw[i] * g.x2[i] * w[i];
    A(n, n) = 0.0;
    b(n) = d;
    const Eigen::VectorXd sol = A.partialPivLu().solve(b);

    std::vector<double> y(n + 1, 0.0);
    for (int i = 0; i < n; ++i) y[i] = sol(i);
    return {std::move(y), sol(n)};
}

// normalized kernel component of the mode coefficient gj along w:
// <g, w xi>_w / ||w xi||_w over the full rectangle (even integrands,
// so the half-range quadratures are doubled)
double kernel_component(const HalfGrid& g, std::span<const double> gj,
                        std::span<const double> w, int j) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= g.n; ++i) {
        num += g.qw[i] * g.x2[i] * gj[i] * w[i];
        den += g.qw[i] * g.x2[i] * w[i] * w[i];
    }
    num *= 2.0;
    den *= 2.0;
    const double theta_factor = (j == 0) ? 2.0 * kPi : kPi;
    return theta_factor * num / std::sqrt(theta_factor * den);
}

// Curvature FD step used inside the solvers. Residual tolerances sit at
// 1e-8, so the step must stay near the eps^(1/6) roundoff/truncation
// optimum (~2.5e-3) rather than the smaller default used for plain
// curvature verification; shrinks with tau when the profile oscillates fast.
double solver_fd_step(const DelaunayParam& param) {
    return 2.5e-3 * std::pow(std::min(1.0, param.tau), 1.5);
}

// Raw 4th-order collocation matrix of the mode-j operator
// (phi'' - (j^2 - 2 p_a) phi) / (2 x^2) on the even half grid, Dirichlet at
// t = T. Unknowns/rows at nodes 0..n-1. Used as the Newton model inside the
// solvers: its fixed point zeroes the sampled residual at every collocation
// node, so the Dirichlet-row residual converges at the discretization rate
// instead of being left to the compact scheme's boundary slack.
Eigen::MatrixXd collocation_matrix(const HalfGrid& g, int j) {
    const int n = g.n;
    const double ih2 = 1.0 / (12.0 * g.h * g.h);
    static const double ctr[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
    static const double near6[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    auto add = [&](int row, int col, double v) {
        if (col < n) A(row, col) += v; // phi_n = 0
    };
    for (int i = 0; i < n; ++i) {
        if (i == n - 1) {
            for (int d = 0; d < 6; ++d) add(i, n - d, near6[d] * ih2);
        } else {
            for (int d = 0; d < 5; ++d) {
                int col = i + d - 2;
                if (col < 0) col = -col; // even reflection at t = 0
                add(i, col, ctr[d] * ih2);
            }
        }
        add(i, i, 2.0 * g.pa[i] - static_cast<double>(j) * j);
        const double s = 1.0 / (2.0 * g.x2[i]);
        for (int c = 0; c < n; ++c) A(i, c) *= s;
    }
    return A;
}

// per-mode factorized Newton model; kernel modes get a bordered system with
// the multiplier column -w and the weighted orthogonality row
class ModeNewtonModel {
public:
    ModeNewtonModel(const HalfGrid& g, int jmax, int kernel_mode,
                    std::span<const double> w)
        : g_(g), kernel_mode_(kernel_mode) {
        lu_.reserve(jmax + 1);
        for (int j = 0; j <= jmax; ++j) {
            if (j == kernel_mode_) {
                const int n = g.n;
                Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
                B.topLeftCorner(n, n) = collocation_matrix(g, j);
                for (int i = 0; i < n; ++i) B(i, n) = -w[i];
                for (int i = 0; i < n; ++i) B(n, i) = g.qw[i] * g.x2[i] * w[i];
                lu_.emplace_back(B);
            } else {
                lu_.emplace_back(collocation_matrix(g, j));
            }
        }
    }

    // solves (A delta)_i = rhs_i; returns delta values at nodes 0..n (last 0)
    std::vector<double> solve(int j, std::span<const double> rhs) const {
        const int n = g_.n;
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) b(i) = rhs[i];
        const Eigen::VectorXd y = lu_[j].solve(b);
        std::vector<double> out(n + 1, 0.0);
        for (int i = 0; i < n; ++i) out[i] = y(i);
        return out;
    }

    // bordered solve: (A delta)_i - mu w_i = rhs_i, <x^2 w, delta> = c
    std::pair<std::vector<double>, double> solve_bordered(
        int j, std::span<const double> rhs, double c) const {
        const int n = g_.n;
        Eigen::VectorXd b(n + 1);
        for (int i = 0; i < n; ++i) b(i) = rhs[i];
        b(n) = c;
        const Eigen::VectorXd y = lu_[j].solve(b);
        std::vector<double> out(n + 1, 0.0);
        for (int i = 0; i < n; ++i) out[i] = y(i);
        return {std::move(out), y(n)};
    }

private:
    const HalfGrid& g_;
    int kernel_mode_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

std::optional<int> mode0_degeneracy_index(const DelaunayParam& param, double T) {
    const double w0T = param.cylinder() ? -std::cos(T) : w0_closed(param, T);
    if (std::abs(w0T) > 1e-7) return std::nullopt;
    const int k = static_cast<int>(std::floor(T / param.tau + 0.25));
    for (int kk = std::max(0, k - 1); kk <= k + 1; ++kk)
        if (std::abs(find_T0(param, kk) - T) < 1e-5 * param.tau) return kk;
    return std::nullopt;
}

} // namespace

GridFunction jacobi_invert(const DelaunayParam& param, double T, const GridFunction& g,
                           ModePolicy policy, InvertInfo* info) {
    const GridSpec spec = g.spec();
    if (!(T > 0.0) || std::abs(spec.T - T) > 1e-12 * std::max(1.0, T))
        throw DomainError("jacobi_invert: grid does not match T");
    if (spec.nt % 2 != 0) throw DomainError("jacobi_invert: n_t must be even");
    if (spec.nt < 8 || spec.ntheta < 8)
        throw DomainError("jacobi_invert: grid too coarse");
    if (g.evenness_defect() > 1e-9 * std::max(1.0, g.sup_norm()))
        throw ContractError("jacobi_invert: right-hand side is not even in t");

    const int n = spec.nt / 2;
    const HalfGrid hg = make_half_grid(param, T, n);
    const ThetaTransform tf(spec.ntheta);
    const int jm = tf.jmax();

    // half-grid theta coefficients of g
    std::vector<std::vector<double>> gc(jm + 1, std::vector<double>(n + 1));
    std::vector<std::vector<double>> gs(jm + 1, std::vector<double>(n + 1));
    {
        std::vector<double> c, s;
        for (int i = 0; i <= n; ++i) {
            tf.forward(&g.values()[(n + i) * spec.ntheta], c, s);
            for (int j = 0; j <= jm; ++j) {
                gc[j][i] = c[j];
                gs[j][i] = s[j];
            }
        }
    }

    const KernelBasis kb = kernel_basis(param, T);
    auto is_kernel = [&](int j) {
        return std::find(kb.modes.begin(), kb.modes.end(), j) != kb.modes.end();
    };

    std::vector<std::vector<double>> pc(jm + 1), ps(jm + 1);
    std::vector<double> r(n + 1);
    for (int j = 0; j <= jm; ++j) {
        const bool sine_exists = (j >= 1 && j < jm);
        if (is_kernel(j)) {
            const auto w = kernel_samples(param, j, hg);
            for (int pass = 0; pass < (sine_exists ? 2 : 1); ++pass) {
                const auto& coeff = pass == 0 ? gc[j] : gs[j];
                const double comp = kernel_component(hg, coeff, w, j);
                if (policy == ModePolicy::Strict && std::abs(comp) > 1e-8)
                    throw SolvabilityError(
                        "jacobi_invert: right-hand side violates the solvability "
                        "condition int x_a^2 g v dt dtheta = 0 for kernel element "
                        "v = w_" + std::to_string(j) +
                        (pass == 0 ? " cos" : " sin") + "(j theta)",
                        j, comp);
                if (info) {
                    info->kernel_modes.push_back(j);
                    info->removed_components.push_back(comp);
                    if (std::abs(comp) > 1e-14)
                        info->warnings.push_back(
                            "projected away kernel component " + std::to_string(comp) +
                            " in mode " + std::to_string(j));
                }
                for (int i = 0; i <= n; ++i) r[i] = 2.0 * hg.x2[i] * coeff[i];
                auto [y, mu] = numerov_solve_bordered(hg, j, r, w, 0.0);
                (pass == 0 ? pc[j] : ps[j]) = std::move(y);
            }
            if (!sine_exists) ps[j].assign(n + 1, 0.0);
        } else {
            for (int i = 0; i <= n; ++i) r[i] = 2.0 * hg.x2[i] * gc[j][i];
            pc[j] = numerov_solve(hg, j, r);
            if (sine_exists) {
                for (int i = 0; i <= n; ++i) r[i] = 2.0 * hg.x2[i] * gs[j][i];
                ps[j] = numerov_solve(hg, j, r);
            } else {
                ps[j].assign(n + 1, 0.0);
            }
        }
    }

    GridFunction phi(spec, true, true);
    std::vector<double> c(jm + 1), s(jm + 1), row(spec.ntheta);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= jm; ++j) {
            c[j] = pc[j][i];
            s[j] = ps[j][i];
        }
        tf.inverse(c, s, row.data());
        for (int k = 0; k < spec.ntheta; ++k) {
            phi.at(n + i, k) = row[k];
            phi.at(n - i, k) = row[k];
        }
    }
    return phi;
}

std::vector<double> mode0_invert_samples(const DelaunayParam& param, double T,
                                         std::span<const double> g) {
    const int n = static_cast<int>(g.size()) - 1;
    if (n < 8) throw DomainError("mode0_invert_samples: need at least 9 samples");
    const double h = T / n;

    std::vector<double> w0(n + 1), v0(n + 1), x2(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = h * i;
        const auto r = roulette(param, t);
        x2[i] = r.x * r.x;
        if (param.cylinder()) {
            w0[i] = -std::cos(t);
            v0[i] = -std::sin(t);
        } else {
            w0[i] = w0_closed(param, t);
            v0[i] = r.dx / r.x;
        }
    }
    if (std::abs(w0[n]) < 1e-13)
        throw NumericalError("mode0_invert_samples: w_{a,0}(T) = 0 (degenerate)");
    const double W = param.cylinder() ? 1.0 : 1.0 + 2.0 * param.a;

    std::vector<double> fw(n + 1), fv(n + 1);
    for (int i = 0; i <= n; ++i) {
        fw[i] = x2[i] * g[i] * w0[i];
        fv[i] = x2[i] * g[i] * v0[i];
    }
    const auto A = cumulative_integral(fw, h);
    const auto B = cumulative_integral(fv, h);
    const double corr = (-A[n] * v0[n] + B[n] * w0[n]) / w0[n];

    std::vector<double> phi(n + 1);
    for (int i = 0; i <= n; ++i)
        phi[i] = 2.0 / W * (A[i] * v0[i] - B[i] * w0[i] + corr * w0[i]);
    return phi;
}

NormalGraphPatch::NormalGraphPatch(const DelaunayParam& param, double p, double q,
                                   const GridFunction& phi)
    : param_(param), p_(p), q_(q), spec_(phi.spec()) {
    const ThetaTransform tf(spec_.ntheta);
    const int jm = tf.jmax();
    coef_c_.assign(jm + 1, std::vector<double>(spec_.nt + 1));
    coef_s_.assign(jm + 1, std::vector<double>(spec_.nt + 1));
    std::vector<double> c, s;
    for (int i = 0; i <= spec_.nt; ++i) {
        tf.forward(&phi.values()[i * spec_.ntheta], c, s);
        for (int j = 0; j <= jm; ++j) {
            coef_c_[j][i] = c[j];
            coef_s_[j][i] = s[j];
        }
    }
}

const NormalGraphPatch::TCache& NormalGraphPatch::tcache(double t) const {
    const uint64_t key = key_of(t);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    TCache tc;
    tc.r = roulette(param_, t);
    const int jm = static_cast<int>(coef_c_.size()) - 1;
    tc.c.resize(jm + 1);
    tc.s.resize(jm + 1);
    for (int j = 0; j <= jm; ++j) {
        tc.c[j] = window_interp(coef_c_[j], -spec_.T, spec_.ht(), t);
        tc.s[j] = window_interp(coef_s_[j], -spec_.T, spec_.ht(), t);
    }
    return cache_.emplace(key, std::move(tc)).first->second;
}

double NormalGraphPatch::phi_value(double t, double theta) const {
    const TCache& tc = tcache(t);
    const int jm = static_cast<int>(tc.c.size()) - 1;
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double cj = 1.0, sj = 0.0; // cos/sin of j*theta
    double acc = tc.c[0];
    for (int j = 1; j <= jm; ++j) {
        const double cn = cj * c1 - sj * s1;
        const double sn = sj * c1 + cj * s1;
        cj = cn;
        sj = sn;
        acc += tc.c[j] * cj + tc.s[j] * sj;
    }
    return acc;
}

Vec3 NormalGraphPatch::operator()(double t, double theta) const {
    const TCache& tc = tcache(t);
    const double ph = phi_value(t, theta);
    const double ct = std::cos(theta), st = std::sin(theta);
    const auto& r = tc.r;
    const Vec3 normal{-r.dz * ct / r.x, -r.dz * st / r.x, r.dx / r.x};
    return Vec3{r.x * ct + p_, r.x * st + q_, r.z} + ph * normal;
}

namespace {

// Residual R = M(patch) - H_eps(patch) at the collocation rows 0..n-1 of the
// half grid. The Dirichlet row t = T is not evaluated: phi is pinned there,
// the equation holds by continuity of the interior rows, and the one-sided
// curvature stencils it would need carry an order-of-magnitude larger
// evaluation error than the residual tolerances (measured ~5e-9 on the exact
// surface). The caller guarantees fd_step <= h/2 so every evaluated row uses
// central stencils.
struct ResidualResult {
    std::vector<double> values; // (n+1) x ntheta, t >= 0 rows; last row zero
    double sup = 0.0;
};

double clamp_fd(const SolverOptions& opts, const DelaunayParam& param,
                const HalfGrid& hg) {
    const double fd = opts.fd_step > 0 ? opts.fd_step : solver_fd_step(param);
    return std::min(fd, 0.49 * hg.h);
}

ResidualResult residual_halfgrid(const DelaunayParam& param, const CurvatureField& field,
                                 double eps, double p, double q,
                                 const GridFunction& phi, const HalfGrid& hg,
                                 double fd_step) {
    const GridSpec& spec = phi.spec();
    const int nth = spec.ntheta;
    NormalGraphPatch patch(param, p, q, phi);
    PatchFn pf = [&patch](double t, double th) { return patch(t, th); };

    ResidualResult res;
    res.values.assign(static_cast<size_t>(hg.n + 1) * nth, 0.0);
    for (int i = 0; i < hg.n; ++i) {
        const double t = hg.t[i];
        for (int k = 0; k < nth; ++k) {
            const double th = spec.theta(k);
            const double mc = mean_curvature(pf, t, th, fd_step);
            const Vec3 X = patch(t, th);
            const double r = mc - field.eval(eps, X.x, X.y, X.z);
            res.values[i * nth + k] = r;
            res.sup = std::max(res.sup, std::abs(r));
        }
    }
    return res;
}

bool validity_ok(const DelaunayParam& param, const HalfGrid& hg, const GridFunction& phi) {
    const GridSpec& spec = phi.spec();
    const double g2 = param.gamma * param.gamma;
    for (int i = 0; i <= hg.n; ++i) {
        const double x2 = hg.x2[i];
        for (int k = 0; k < spec.ntheta; ++k) {
            const double ph = phi.at(hg.n + i, k);
            if (1.0 - 2.0 * ph + ph * ph / x2 * (x2 - g2 / x2) <= 0.0) return false;
        }
    }
    return true;
}

void axpy_grid(GridFunction& phi, double alpha, const GridFunction& d) {
    auto& v = phi.values();
    const auto& w = d.values();
    for (size_t i = 0; i < v.size(); ++i) v[i] += alpha * w[i];
}

GridSpec make_spec(double T, const SolverOptions& opts) {
    if (opts.nt % 2 != 0) throw DomainError("solver: nt must be even");
    return {T, opts.nt, opts.ntheta};
}

void check_h2(const CurvatureField& field) {
    if (!field.even_in_z())
        throw ContractError(
            "solver: the curvature family must be even in z ((H2)); the even-in-t "
            "solution ansatz is not consistent otherwise");
}

// one nondegenerate Newton run at fixed eps; phi is the in/out state
struct NewtonOutcome {
    double residual_inf = 0.0;
    int iterations = 0;
    bool converged = false;
};

NewtonOutcome newton_nondegenerate(const DelaunayParam& param, double T,
                                   const CurvatureField& field, double eps, double p,
                                   double q, const SolverOptions& opts,
                                   const HalfGrid& hg, GridFunction& phi) {
    (void)T;
    const double fd = clamp_fd(opts, param, hg);
    const GridSpec spec = phi.spec();
    const ThetaTransform tf(spec.ntheta);
    const int n = hg.n, jm = tf.jmax();
    const ModeNewtonModel model(hg, jm, -1, {});
    NewtonOutcome out;

    std::vector<double> c, s, rhs(n + 1), row(spec.ntheta);
    std::vector<double> cc(jm + 1), ss(jm + 1);
    auto res = residual_halfgrid(param, field, eps, p, q, phi, hg, fd);
    for (int it = 0; it < opts.max_iter; ++it) {
        out.residual_inf = res.sup;
        if (res.sup <= opts.tol) {
            out.converged = true;
            return out;
        }
        // per-mode collocation solve of L delta = R
        std::vector<std::vector<double>> rc(jm + 1, std::vector<double>(n + 1));
        std::vector<std::vector<double>> rs(jm + 1, std::vector<double>(n + 1));
        for (int i = 0; i <= n; ++i) {
            tf.forward(&res.values[i * spec.ntheta], c, s);
            for (int j = 0; j <= jm; ++j) {
                rc[j][i] = c[j];
                rs[j][i] = s[j];
            }
        }
        GridFunction delta(spec, true, true);
        {
            std::vector<std::vector<double>> dc(jm + 1), ds(jm + 1);
            for (int j = 0; j <= jm; ++j) {
                dc[j] = model.solve(j, rc[j]);
                if (j >= 1 && j < jm)
                    ds[j] = model.solve(j, rs[j]);
                else
                    ds[j].assign(n + 1, 0.0);
            }
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= jm; ++j) {
                    cc[j] = dc[j][i];
                    ss[j] = ds[j][i];
                }
                tf.inverse(cc, ss, row.data());
                for (int k = 0; k < spec.ntheta; ++k) {
                    delta.at(n + i, k) = row[k];
                    delta.at(n - i, k) = row[k];
                }
            }
        }

        double step = 1.0;
        bool accepted = false;
        while (step >= std::ldexp(1.0, -20)) {
            GridFunction trial = phi;
            axpy_grid(trial, -step, delta);
            if (validity_ok(param, hg, trial)) {
                auto rt = residual_halfgrid(param, field, eps, p, q, trial, hg, fd);
                if (rt.sup < res.sup) {
                    phi = std::move(trial);
                    res = std::move(rt);
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        ++out.iterations;
        if (!accepted) {
            out.residual_inf = res.sup;
            return out; // stalled
        }
    }
    out.residual_inf = res.sup;
    out.converged = res.sup <= opts.tol;
    return out;
}

} // namespace

PMCSolution solve_nondegenerate(const DelaunayParam& param, double T,
                                const CurvatureField& field, double eps, double p,
                                double q, const SolverOptions& opts) {
    check_h2(field);
    const KernelBasis kb = kernel_basis(param, T);
    if (kb.dim != 0) {
        if (auto k = mode0_degeneracy_index(param, T); k && field.perturbative()) {
            const double obs = obstruction_integral(param, *k, field, p, q);
            throw ObstructionError(
                "solve_nondegenerate: T lies in the mode-0 degeneracy set "
                "(T_{a," + std::to_string(*k) + "}); the obstruction integral " +
                std::to_string(obs) + " is the first-order solvability defect",
                obs);
        }
        throw DomainError(
            "solve_nondegenerate: kernel dimension " + std::to_string(kb.dim) +
            " at this T; use the Lyapunov-Schmidt path");
    }

    const GridSpec spec = make_spec(T, opts);
    const HalfGrid hg = make_half_grid(param, T, spec.nt / 2);
    PMCSolution sol;
    sol.param = param;
    sol.T = T;
    sol.eps_requested = eps;
    sol.p = p;
    sol.q = q;
    sol.phi = opts.warm_phi ? *opts.warm_phi : GridFunction(spec, true, true);

    auto outcome = newton_nondegenerate(param, T, field, eps, p, q, opts, hg, sol.phi);
    sol.iterations = outcome.iterations;
    if (outcome.converged) {
        sol.eps = eps;
        sol.residual_inf = outcome.residual_inf;
        sol.converged = true;
        return sol;
    }

    // eps-continuation: march from 0 reusing phi as warm start
    GridFunction phi(spec, true, true);
    const double de = std::copysign(opts.continuation_step, eps);
    double reached = 0.0;
    double last_res = 0.0;
    int total_it = outcome.iterations;
    for (double e = de; std::abs(e) <= std::abs(eps) + 1e-15; e += de) {
        const double target = (std::abs(e) > std::abs(eps)) ? eps : e;
        auto oc = newton_nondegenerate(param, T, field, target, p, q, opts, hg, phi);
        total_it += oc.iterations;
        if (!oc.converged) break;
        reached = target;
        last_res = oc.residual_inf;
        if (target == eps) break;
    }
    sol.phi = std::move(phi);
    sol.eps = reached;
    sol.residual_inf = last_res;
    sol.iterations = total_it;
    sol.converged = (reached == eps);
    if (reached == 0.0)
        throw NumericalError("solve_nondegenerate: Newton failed even at the first "
                             "continuation step");
    return sol;
}

PMCSolution solve_axisymmetric(const DelaunayParam& param, double T,
                               const CurvatureField& field, double eps,
                               const SolverOptions& opts) {
    check_h2(field);
    {
        std::mt19937 rng(0xA15u);
        std::uniform_real_distribution<double> d(-2.0, 2.0);
        for (int i = 0; i < 32; ++i) {
            const double e = 0.5 * d(rng), z = d(rng);
            const double v1 = field.eval(e, d(rng), d(rng), z);
            const double v2 = field.eval(e, d(rng), d(rng), z);
            if (std::abs(v1 - v2) > 1e-12 * std::max(1.0, std::abs(v1)))
                throw ContractError(
                    "solve_axisymmetric: field must depend on z only");
        }
    }
    if (auto k = mode0_degeneracy_index(param, T)) {
        if (field.perturbative()) {
            const double obs = obstruction_integral(param, *k, field, 0.0, 0.0);
            throw ObstructionError(
                "solve_axisymmetric: T lies in the mode-0 degeneracy set; "
                "obstruction integral " + std::to_string(obs), obs);
        }
        throw DomainError("solve_axisymmetric: T lies in the mode-0 degeneracy set");
    }

    const GridSpec spec = make_spec(T, opts);
    const HalfGrid hg = make_half_grid(param, T, spec.nt / 2);
    const double fd = clamp_fd(opts, param, hg);
    const int n = hg.n;

    GridFunction phi = opts.warm_phi ? *opts.warm_phi : GridFunction(spec, true, true);
    PMCSolution sol;
    sol.param = param;
    sol.T = T;
    sol.eps_requested = eps;

    // row n is needed by the cumulative integrals of the explicit inverse and
    // uses the edge-aware stencil; convergence is measured on the central rows
    auto residual_1d = [&](const GridFunction& ph, std::vector<double>& r) {
        NormalGraphPatch patch(param, 0.0, 0.0, ph);
        PatchFn pf = [&patch](double t, double th) { return patch(t, th); };
        double sup = 0.0;
        r.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double mc = mean_curvature(pf, hg.t[i], 0.0, fd, -hg.T, hg.T);
            const Vec3 X = patch(hg.t[i], 0.0);
            r[i] = mc - field.eval(eps, X.x, X.y, X.z);
            if (i < n) sup = std::max(sup, std::abs(r[i]));
        }
        return sup;
    };

    std::vector<double> r;
    double sup = residual_1d(phi, r);
    for (int it = 0; it < opts.max_iter; ++it) {
        sol.residual_inf = sup;
        if (sup <= opts.tol) {
            sol.converged = true;
            break;
        }
        const auto delta = mode0_invert_samples(param, T, r);
        double step = 1.0;
        bool accepted = false;
        while (step >= std::ldexp(1.0, -20)) {
            GridFunction trial = phi;
            for (int i = 0; i <= n; ++i)
                for (int k = 0; k < spec.ntheta; ++k) {
                    trial.at(n + i, k) -= step * delta[i];
                    if (i > 0) trial.at(n - i, k) -= step * delta[i];
                }
            if (validity_ok(param, hg, trial)) {
                std::vector<double> rt;
                const double st = residual_1d(trial, rt);
                if (st < sup) {
                    phi = std::move(trial);
                    r = std::move(rt);
                    sup = st;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        ++sol.iterations;
        if (!accepted) break;
    }
    sol.residual_inf = sup;
    sol.converged = sup <= opts.tol;
    sol.eps = sol.converged ? eps : 0.0;
    sol.phi = std::move(phi);
    if (!sol.converged)
        throw NumericalError("solve_axisymmetric: Newton failed to reach tolerance");
    return sol;
}

PMCSolution solve_lyapunov_schmidt(const DelaunayParam& param, double T,
                                   const CurvatureField& field, double eps, double p,
                                   double q, const SolverOptions& opts) {
    check_h2(field);
    if (!(param.a > 0.0 && param.a <= 0.5 * (std::sqrt(3.0) - 1.0) + 1e-12))
        throw DomainError(
            "solve_lyapunov_schmidt: requires a in (0, (sqrt(3)-1)/2]");
    if (!field.perturbative())
        throw DomainError("solve_lyapunov_schmidt: requires H = 1 + eps*Htilde ((H3))");
    const KernelBasis kb = kernel_basis(param, T);
    if (kb.dim != 2 || kb.modes != std::vector<int>{1})
        throw DomainError(
            "solve_lyapunov_schmidt: kernel must be exactly span{w1 cos, w1 sin} "
            "(dim 2); got dim " + std::to_string(kb.dim));

    const GridSpec spec = make_spec(T, opts);
    const HalfGrid hg = make_half_grid(param, T, spec.nt / 2);
    const ThetaTransform tf(spec.ntheta);
    const int n = hg.n, jm = tf.jmax();
    const double fd = clamp_fd(opts, param, hg);
    const auto w1 = kernel_samples(param, 1, hg);
    const ModeNewtonModel model(hg, jm, 1, w1);

    GridFunction phi = opts.warm_phi ? *opts.warm_phi : GridFunction(spec, true, true);
    double lam1 = 0.0, lam2 = 0.0;

    // residual of the augmented system M - H - lam1 w1 cos - lam2 w1 sin at
    // the collocation rows (the Dirichlet row is pinned; see residual_halfgrid)
    auto residual = [&](const GridFunction& ph, double l1, double l2,
                        std::vector<double>& vals) {
        NormalGraphPatch patch(param, p, q, ph);
        PatchFn pf = [&patch](double t, double th) { return patch(t, th); };
        vals.assign(static_cast<size_t>(n + 1) * spec.ntheta, 0.0);
        double sup = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < spec.ntheta; ++k) {
                const double th = spec.theta(k);
                const double mc = mean_curvature(pf, hg.t[i], th, fd);
                const Vec3 X = patch(hg.t[i], th);
                double v = mc - field.eval(eps, X.x, X.y, X.z) -
                           l1 * w1[i] * std::cos(th) - l2 * w1[i] * std::sin(th);
                vals[i * spec.ntheta + k] = v;
                sup = std::max(sup, std::abs(v));
            }
        return sup;
    };

    PMCSolution sol;
    sol.param = param;
    sol.T = T;
    sol.eps_requested = eps;
    sol.p = p;
    sol.q = q;

    std::vector<double> rv;
    double sup = residual(phi, lam1, lam2, rv);
    std::vector<double> c, s, r1d(n + 1);
    for (int it = 0; it < opts.max_iter; ++it) {
        sol.residual_inf = sup;
        if (std::getenv("DELPMC_TRACE")) {
            int wi = 0, wk = 0;
            double wv = 0.0;
            for (int i = 0; i <= n; ++i)
                for (int k = 0; k < spec.ntheta; ++k)
                    if (std::abs(rv[i * spec.ntheta + k]) > wv) {
                        wv = std::abs(rv[i * spec.ntheta + k]);
                        wi = i;
                        wk = k;
                    }
            std::fprintf(stderr,
                         "[ls] it=%d sup=%.6e at (i=%d/%d, k=%d) lam=(%.3e,%.3e)\n",
                         it, sup, wi, n, wk, lam1, lam2);
        }
        if (sup <= opts.tol) {
            sol.converged = true;
            break;
        }
        // theta coefficients of -R per half row
        std::vector<std::vector<double>> rc(jm + 1, std::vector<double>(n + 1));
        std::vector<std::vector<double>> rs(jm + 1, std::vector<double>(n + 1));
        for (int i = 0; i <= n; ++i) {
            tf.forward(&rv[i * spec.ntheta], c, s);
            for (int j = 0; j <= jm; ++j) {
                rc[j][i] = -c[j];
                rs[j][i] = -s[j];
            }
        }
        // current kernel constraints of phi (cos/sin mode-1 coefficients)
        double c1 = 0.0, c2 = 0.0;
        {
            std::vector<double> pc1(n + 1), ps1(n + 1);
            for (int i = 0; i <= n; ++i) {
                tf.forward(&phi.values()[(n + i) * spec.ntheta], c, s);
                pc1[i] = c[1];
                ps1[i] = s[1];
            }
            for (int i = 0; i <= n; ++i) {
                c1 += hg.qw[i] * hg.x2[i] * pc1[i] * w1[i];
                c2 += hg.qw[i] * hg.x2[i] * ps1[i] * w1[i];
            }
        }

        GridFunction delta(spec, true, true);
        double dl1 = 0.0, dl2 = 0.0;
        {
            std::vector<std::vector<double>> dc(jm + 1), ds(jm + 1);
            for (int j = 0; j <= jm; ++j) {
                const bool sine_exists = (j >= 1 && j < jm);
                if (j == 1) {
                    auto [yc, m1] = model.solve_bordered(1, rc[1], -c1);
                    dc[1] = std::move(yc);
                    dl1 = m1;
                    auto [ys, m2] = model.solve_bordered(1, rs[1], -c2);
                    ds[1] = std::move(ys);
                    dl2 = m2;
                } else {
                    dc[j] = model.solve(j, rc[j]);
                    if (sine_exists)
                        ds[j] = model.solve(j, rs[j]);
                    else
                        ds[j].assign(n + 1, 0.0);
                }
            }
            std::vector<double> row(spec.ntheta), cc(jm + 1), ss(jm + 1);
            for (int i = 0; i <= n; ++i) {
                for (int j = 0; j <= jm; ++j) {
                    cc[j] = dc[j][i];
                    ss[j] = ds[j][i];
                }
                tf.inverse(cc, ss, row.data());
                for (int k = 0; k < spec.ntheta; ++k) {
                    delta.at(n + i, k) = row[k];
                    delta.at(n - i, k) = row[k];
                }
            }
        }

        double step = 1.0;
        bool accepted = false;
        while (step >= std::ldexp(1.0, -20)) {
            GridFunction trial = phi;
            axpy_grid(trial, step, delta);
            const double t1 = lam1 + step * dl1, t2 = lam2 + step * dl2;
            if (validity_ok(param, hg, trial)) {
                std::vector<double> rt;
                const double st = residual(trial, t1, t2, rt);
                if (st < sup) {
                    phi = std::move(trial);
                    lam1 = t1;
                    lam2 = t2;
                    rv = std::move(rt);
                    sup = st;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        ++sol.iterations;
        if (!accepted) break;
    }
    sol.residual_inf = sup;
    sol.converged = sup <= opts.tol;
    sol.lambda1 = lam1;
    sol.lambda2 = lam2;
    sol.eps = sol.converged ? eps : 0.0;
    sol.phi = std::move(phi);
    if (!sol.converged)
        throw NumericalError("solve_lyapunov_schmidt: inner Newton failed");
    return sol;
}

PMCSolution solve_with_translation(const DelaunayParam& param, double T,
                                   const CurvatureField& field, double eps, double p0,
                                   double q0, const SolverOptions& opts) {
    double p = p0, q = q0;
    SolverOptions inner = opts;
    GridFunction warm;
    const double lam_tol = opts.tol;
    PMCSolution sol;
    for (int outer = 0; outer < 12; ++outer) {
        sol = solve_lyapunov_schmidt(param, T, field, eps, p, q, inner);
        warm = sol.phi;
        inner.warm_phi = &warm;
        if (std::hypot(sol.lambda1, sol.lambda2) <= lam_tol) {
            sol.p = p;
            sol.q = q;
            return sol;
        }
        // forward-difference Jacobian of (lam1, lam2) wrt (p, q)
        const double d = 1e-3 * std::max(1.0, std::hypot(p, q));
        const auto sp = solve_lyapunov_schmidt(param, T, field, eps, p + d, q, inner);
        const auto sq = solve_lyapunov_schmidt(param, T, field, eps, p, q + d, inner);
        const double j11 = (sp.lambda1 - sol.lambda1) / d;
        const double j21 = (sp.lambda2 - sol.lambda2) / d;
        const double j12 = (sq.lambda1 - sol.lambda1) / d;
        const double j22 = (sq.lambda2 - sol.lambda2) / d;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-30)
            throw NumericalError("solve_with_translation: singular multiplier Jacobian");
        double dp = -(j22 * sol.lambda1 - j12 * sol.lambda2) / det;
        double dq = -(-j21 * sol.lambda1 + j11 * sol.lambda2) / det;
        const double len = std::hypot(dp, dq);
        const double clip = 0.5 * param.tau;
        if (len > clip) {
            dp *= clip / len;
            dq *= clip / len;
        }
        p += dp;
        q += dq;
    }
    throw NumericalError(
        "solve_with_translation: outer Newton did not drive the multipliers to "
        "zero (last |lambda| = " +
        std::to_string(std::hypot(sol.lambda1, sol.lambda2)) + ")");
}

double multiplier_normalization(const DelaunayParam& param, double T) {
    const double I = integrate(
        [&](double t) {
            const auto r = roulette(param, t);
            const double w1 = r.dz / r.x;
            return r.x * r.x * w1 * w1;
        },
        0.0, T, 1e-13);
    return 2.0 * kPi * I; // even integrand: int_{-T}^{T} = 2 int_0^T
}

double obstruction_integral(const DelaunayParam& param, int k,
                            const CurvatureField& field, double p0, double q0) {
    if (!field.perturbative())
        throw DomainError("obstruction_integral: requires a perturbative field");
    const double Tk = find_T0(param, k);
    const int nth = 64;
    const auto& hr = gauss_rule(nth);

    auto value_at = [&](int nt) {
        const auto& tr = gauss_rule(nt);
        double acc = 0.0;
        for (int i = 0; i < nt; ++i) {
            const double t = Tk * tr.x[i];
            const auto r = roulette(param, t);
            const double w0 = param.cylinder() ? -std::cos(t) : w0_closed(param, t);
            double row = 0.0;
            for (int kk = 0; kk < nth; ++kk) {
                const double th = kPi * hr.x[kk];
                row += kPi * hr.w[kk] *
                       field.htilde(r.x * std::cos(th) + p0, r.x * std::sin(th) + q0,
                                    r.z);
            }
            acc += Tk * tr.w[i] * r.x * r.x * w0 * row;
        }
        return acc;
    };
    double prev = value_at(64 * (k + 1));
    for (int nt = 128 * (k + 1); nt <= 1024; nt *= 2) {
        const double cur = value_at(nt);
        if (std::abs(cur - prev) < 1e-10 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

double limit_profile_root() {
    return brent([](double t) { return -1.0 + t * std::tanh(t); }, 0.5, 3.0, 1e-15,
                 1e-13);
}

std::vector<NormProbeEntry> inverse_norm_probe(std::span<const double> a_list, double T,
                                               const std::function<double(double)>& g) {
    const double T0 = limit_profile_root();
    if (!(T > T0))
        throw DomainError(
            "inverse_norm_probe: requires T > T0 (the positive root of -1 + t tanh t, "
            "T0 = " + std::to_string(T0) + ")");
    // orthogonality against the limit profile
    const double I = integrate(
        [&](double s) {
            const double sech = 1.0 / std::cosh(s);
            return g(s) * (1.0 - s * std::tanh(s)) * sech * sech;
        },
        0.0, T, 1e-12);
    double gmax = 0.0;
    for (int i = 0; i <= 64; ++i) gmax = std::max(gmax, std::abs(g(T * i / 64.0)));
    const bool inconclusive = std::abs(I) <= 1e-10 * std::max(1.0, gmax) * T;

    const int n = 512;
    std::vector<double> gv(n + 1);
    for (int i = 0; i <= n; ++i) gv[i] = g(T * i / n);

    std::vector<NormProbeEntry> out;
    for (double a : a_list) {
        const auto param = make_param(a);
        const auto phi = mode0_invert_samples(param, T, gv);
        double nrm = 0.0;
        for (double v : phi) nrm = std::max(nrm, std::abs(v));
        out.push_back({a, nrm, inconclusive});
    }
    return out;
}

} // namespace delpmc
