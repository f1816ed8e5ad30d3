#include "delpmc/melnikov.hpp"

#include <cmath>
#include <numbers>

#include "delpmc/errors.hpp"
#include "delpmc/numerics.hpp"

namespace delpmc {

namespace {
constexpr double kPi = std::numbers::pi;
}

Melnikov::Melnikov(const DelaunayParam& param, double T, const CurvatureField& field)
    : param_(param), T_(T), field_(field) {
    if (!(T > 0.0)) throw DomainError("Melnikov: T must be positive");
    if (!field_.perturbative())
        throw DomainError("Melnikov: requires a perturbative field (Htilde defined)");

    // theta rule is fixed; refine t nodes until the value converges
    const auto& thr = gauss_rule(ntheta_);
    th_.resize(ntheta_);
    thw_.resize(ntheta_);
    for (int k = 0; k < ntheta_; ++k) {
        th_[k] = kPi * thr.x[k];
        thw_[k] = kPi * thr.w[k];
    }
    build_nodes(64);
    double prev = value_with_nodes(0.0, 0.0);
    for (int nt = 128; nt <= 1024; nt *= 2) {
        build_nodes(nt);
        const double cur = value_with_nodes(0.0, 0.0);
        if (std::abs(cur - prev) < 1e-10 * std::max(1.0, std::abs(cur))) break;
        prev = cur;
    }
}

void Melnikov::build_nodes(int nt) {
    nt_ = nt;
    const auto& rule = gauss_rule(nt);
    tnodes_.clear();
    tnodes_.reserve(nt);
    for (int i = 0; i < nt; ++i) {
        TNode n;
        n.t = T_ * rule.x[i];
        n.wt = T_ * rule.w[i];
        const auto r = roulette(param_, n.t);
        n.x = r.x;
        n.dx = r.dx;
        n.dz = r.dz;
        n.w1 = r.dz / r.x;
        tnodes_.push_back(n);
    }
}

double Melnikov::value_with_nodes(double p, double q) const {
    // integrand: Q(X + p e1 + q e2) . (X_t ^ X_th),
    // X_t ^ X_th = (-x z' cos, -x z' sin, x x'); Q.e3 = 0
    double acc = 0.0;
    for (const auto& n : tnodes_) {
        const auto rz = roulette(param_, n.t).z;
        double row = 0.0;
        for (int k = 0; k < ntheta_; ++k) {
            const double ct = std::cos(th_[k]), st = std::sin(th_[k]);
            const Vec3 pos{n.x * ct + p, n.x * st + q, rz};
            const Vec3 Q = field_.eval_Q(pos.x, pos.y, pos.z);
            row += thw_[k] * (Q.x * (-n.x * n.dz * ct) + Q.y * (-n.x * n.dz * st));
        }
        acc += n.wt * row;
    }
    return acc;
}

double Melnikov::value(double p, double q) const { return value_with_nodes(p, q); }

std::array<double, 2> Melnikov::grad(double p, double q) const {
    double gp = 0.0, gq = 0.0;
    for (const auto& n : tnodes_) {
        const auto rz = roulette(param_, n.t).z;
        double rp = 0.0, rq = 0.0;
        for (int k = 0; k < ntheta_; ++k) {
            const double ct = std::cos(th_[k]), st = std::sin(th_[k]);
            const double ht =
                field_.htilde(n.x * ct + p, n.x * st + q, rz);
            rp += thw_[k] * ht * ct;
            rq += thw_[k] * ht * st;
        }
        const double f = n.x * n.x * n.w1;
        gp -= n.wt * f * rp;
        gq -= n.wt * f * rq;
    }
    return {gp, gq};
}

MelnikovEval Melnikov::eval(double p, double q) const {
    MelnikovEval e;
    e.p = p;
    e.q = q;
    e.value = value(p, q);
    e.grad = grad(p, q);
    const double h = 1e-4;
    const auto gpp = grad(p + h, q), gpm = grad(p - h, q);
    const auto gqp = grad(p, q + h), gqm = grad(p, q - h);
    const double hpp = (gpp[0] - gpm[0]) / (2 * h);
    const double hpq = 0.5 * ((gpp[1] - gpm[1]) / (2 * h) + (gqp[0] - gqm[0]) / (2 * h));
    const double hqq = (gqp[1] - gqm[1]) / (2 * h);
    e.hessian = {{{hpp, hpq}, {hpq, hqq}}};
    const double det = hpp * hqq - hpq * hpq;
    const double scale = std::max(1e-30, std::abs(e.value));
    e.nondegenerate = std::abs(det) > 1e-8 * scale;
    return e;
}

std::vector<MelnikovEval> Melnikov::find_critical_points(
    std::span<const std::array<double, 2>> seeds, int max_iter) const {
    std::vector<MelnikovEval> out;
    const double clip = 0.5 * param_.tau;
    for (const auto& seed : seeds) {
        double p = seed[0], q = seed[1];
        const double scale = std::max(1e-30, std::abs(value(p, q)));
        const double gtol = 1e-10 * std::max(1.0, scale);
        auto g = grad(p, q);

        if (std::hypot(g[0], g[1]) < 1e-11 * std::max(1.0, scale)) {
            auto e = eval(p, q);
            e.gradient_floor = true;
            out.push_back(e);
            continue;
        }

        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            if (std::hypot(g[0], g[1]) <= gtol) {
                converged = true;
                break;
            }
            auto e = eval(p, q); // refresh Hessian at the current iterate
            const auto& H = e.hessian;
            const double det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
            double dp, dq;
            if (std::abs(det) < 1e-14 * (1.0 + std::abs(H[0][0]) + std::abs(H[1][1]))) {
                // singular Hessian: gradient descent fallback
                dp = -g[0];
                dq = -g[1];
            } else {
                dp = -(H[1][1] * g[0] - H[0][1] * g[1]) / det;
                dq = -(-H[1][0] * g[0] + H[0][0] * g[1]) / det;
            }
            const double len = std::hypot(dp, dq);
            if (len > clip) {
                dp *= clip / len;
                dq *= clip / len;
            }
            p += dp;
            q += dq;
            g = grad(p, q);
        }
        if (!converged && std::hypot(g[0], g[1]) > gtol) continue;

        bool dup = false;
        for (const auto& e : out)
            if (std::hypot(e.p - p, e.q - q) < 1e-6) dup = true;
        if (dup) continue;
        out.push_back(eval(p, q));
    }
    std::sort(out.begin(), out.end(), [](const MelnikovEval& l, const MelnikovEval& r) {
        return l.p != r.p ? l.p < r.p : l.q < r.q;
    });
    return out;
}

double volume_functional(const PatchFn& patch, double T, const CurvatureField& field,
                         double fd_step, int nt, int ntheta) {
    // sampled symmetry contract of the class S_T
    for (double t : {0.3 * T, 0.71 * T, 0.97 * T})
        for (double th : {-1.1, 0.4, 2.2}) {
            const Vec3 a = patch(t, th), b = patch(-t, th);
            const double scale = 1.0 + a.norm();
            if (std::abs(a.x - b.x) > 1e-9 * scale ||
                std::abs(a.y - b.y) > 1e-9 * scale ||
                std::abs(a.z + b.z) > 1e-9 * scale)
                throw ContractError(
                    "volume_functional: patch violates the S_T symmetry "
                    "(e1, e2 even in t; e3 odd)");
        }

    const auto& tr = gauss_rule(nt);
    const auto& hr = gauss_rule(ntheta);
    const double h = fd_step;
    auto d_t = [&](double t, double th) {
        return (1.0 / (12.0 * h)) *
               (patch(t - 2 * h, th) - 8.0 * patch(t - h, th) + 8.0 * patch(t + h, th) -
                patch(t + 2 * h, th));
    };
    auto d_th = [&](double t, double th) {
        return (1.0 / (12.0 * h)) *
               (patch(t, th - 2 * h) - 8.0 * patch(t, th - h) + 8.0 * patch(t, th + h) -
                patch(t, th + 2 * h));
    };
    double acc = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double t = T * tr.x[i];
        double row = 0.0;
        for (int k = 0; k < ntheta; ++k) {
            const double th = kPi * hr.x[k];
            const Vec3 X = patch(t, th);
            const Vec3 Q = field.eval_Q(X.x, X.y, X.z);
            row += kPi * hr.w[k] * Q.dot(d_t(t, th).cross(d_th(t, th)));
        }
        acc += T * tr.w[i] * row;
    }
    return acc;
}

FirstVariation first_variation_check(const std::function<PatchFn(double)>& family,
                                     double T, const CurvatureField& field, double ds) {
    const PatchFn X = family(0.0);
    const PatchFn Xp = family(ds), Xm = family(-ds);
    auto Xdot = [&](double t, double th) {
        return (1.0 / (2.0 * ds)) * (Xp(t, th) - Xm(t, th));
    };
    const double h = 1e-4;
    auto d_t = [&](double t, double th) {
        return (1.0 / (12.0 * h)) *
               (X(t - 2 * h, th) - 8.0 * X(t - h, th) + 8.0 * X(t + h, th) -
                X(t + 2 * h, th));
    };
    auto d_th = [&](double t, double th) {
        return (1.0 / (12.0 * h)) *
               (X(t, th - 2 * h) - 8.0 * X(t, th - h) + 8.0 * X(t, th + h) -
                X(t, th + 2 * h));
    };

    const int nt = 128, nth = 64;
    const auto& tr = gauss_rule(nt);
    const auto& hr = gauss_rule(nth);
    double interior = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double t = T * tr.x[i];
        double row = 0.0;
        for (int k = 0; k < nth; ++k) {
            const double th = kPi * hr.x[k];
            const Vec3 x = X(t, th);
            row += kPi * hr.w[k] * field.htilde(x.x, x.y, x.z) *
                   Xdot(t, th).dot(d_t(t, th).cross(d_th(t, th)));
        }
        interior += T * tr.w[i] * row;
    }
    double boundary = 0.0;
    for (int k = 0; k < nth; ++k) {
        const double th = kPi * hr.x[k];
        auto line = [&](double t) {
            const Vec3 x = X(t, th);
            const Vec3 Q = field.eval_Q(x.x, x.y, x.z);
            return Q.dot(d_th(t, th).cross(Xdot(t, th)));
        };
        boundary += kPi * hr.w[k] * (line(T) - line(-T));
    }

    FirstVariation fv;
    fv.analytic = interior - boundary;
    const double vp = volume_functional(Xp, T, field);
    const double vm = volume_functional(Xm, T, field);
    fv.numeric = (vp - vm) / (2.0 * ds);
    return fv;
}

double wente_residual(const SmoothPatch& X, const SmoothPatch& Y,
                      const SmoothPatch& Z, double T) {
    const int nt = 128, nth = 128;
    const auto& tr = gauss_rule(nt);
    const auto& hr = gauss_rule(nth);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double t = T * tr.x[i];
        double rl = 0.0, rr = 0.0;
        for (int k = 0; k < nth; ++k) {
            const double th = kPi * hr.x[k];
            const Vec3 Xt = X.dt(t, th), Xh = X.dtheta(t, th);
            const Vec3 Yt = Y.dt(t, th), Yh = Y.dtheta(t, th);
            const Vec3 Zt = Z.dt(t, th), Zh = Z.dtheta(t, th);
            rl += kPi * hr.w[k] * Y.value(t, th).dot(Xt.cross(Zh) + Zt.cross(Xh));
            rr += kPi * hr.w[k] * Z.value(t, th).dot(Yt.cross(Xh) + Xt.cross(Yh));
        }
        lhs += T * tr.w[i] * rl;
        rhs += T * tr.w[i] * rr;
    }
    double line = 0.0;
    for (int k = 0; k < nth; ++k) {
        const double th = kPi * hr.x[k];
        auto term = [&](double t) {
            return Z.value(t, th).dot(X.dtheta(t, th).cross(Y.value(t, th)));
        };
        line += kPi * hr.w[k] * (term(T) - term(-T));
    }
    return std::abs(lhs - (rhs - line));
}

} // namespace delpmc
