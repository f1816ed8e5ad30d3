#include "delpmc/jacobi_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "delpmc/errors.hpp"
#include "delpmc/ode.hpp"

namespace delpmc {

namespace {

double sqr(double x) { return x * x; }

// value and t-derivative of w0_closed / v0 / w1 / v1
struct PairEval {
    double w, dw, v, dv;
};

PairEval eval_pair(const DelaunayParam& param, int j, double t) {
    if (param.cylinder()) {
        if (j == 0) return {-std::cos(t), std::sin(t), -std::sin(t), -std::cos(t)};
        // x = 1/2, z = t/2: w1 = z'/x = 1, v1 = (x x' + z z')/x = t/2
        return {1.0, 0.0, 0.5 * t, 0.5};
    }
    const auto r = roulette(param, t);
    const double g = param.gamma;
    const double x = r.x, dx = r.dx, z = r.z, dz = r.dz;
    const double ddx = (1.0 + 2.0 * g) * x - 2.0 * x * x * x;
    if (j == 0) {
        const double inv = 1.0 / (1.0 + 2.0 * param.a);
        const double w = inv * (1.0 + 2.0 * g - 2.0 * x * x + dx / x * (2.0 * z - t));
        const double dw = inv * (-4.0 * x * dx + (ddx * x - dx * dx) / (x * x) * (2.0 * z - t) +
                                 dx / x * (2.0 * dz - 1.0));
        const double v = dx / x;
        const double dv = (ddx * x - dx * dx) / (x * x);
        return {w, dw, v, dv};
    }
    if (j == 1) {
        const double w = dz / x;
        const double dw = dx * (1.0 + g / (x * x));
        const double ddz = 2.0 * x * dx;
        const double v = (x * dx + z * dz) / x;
        const double dv = ddx + (dz * dz + z * ddz) / x - z * dz * dx / (x * x);
        return {w, dw, v, dv};
    }
    throw DomainError("fundamental_pair: closed forms exist only for j in {0, 1}");
}

} // namespace

FundamentalPair fundamental_pair(const DelaunayParam& param, int j, double t) {
    const auto e = eval_pair(param, j, t);
    return {e.w, e.v};
}

double w0_closed(const DelaunayParam& param, double t) {
    if (param.cylinder())
        throw DomainError("w0_closed: formula is singular at a = -1/2");
    return eval_pair(param, 0, t).w;
}

int FundamentalSolution::locate(double t) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    int i = static_cast<int>(it - t_.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(t_.size()) - 2);
}

double FundamentalSolution::value(double t) const {
    const double sign = (t < 0.0 && kind_ == SolutionKind::Odd) ? -1.0 : 1.0;
    const double ta = std::abs(t);
    if (fn_) return sign * fn_(ta);
    if (ta > t_max_ * (1.0 + 1e-12))
        throw DomainError("FundamentalSolution: evaluation beyond cached range");
    const int i = locate(ta);
    const double h = t_[i + 1] - t_[i];
    const double s = (ta - t_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    // cubic Hermite with stored derivatives
    return sign * ((2 * s3 - 3 * s2 + 1) * u_[i] + (s3 - 2 * s2 + s) * h * du_[i] +
                   (-2 * s3 + 3 * s2) * u_[i + 1] + (s3 - s2) * h * du_[i + 1]);
}

double FundamentalSolution::derivative(double t) const {
    const double sign = (t < 0.0 && kind_ == SolutionKind::Even) ? -1.0 : 1.0;
    const double ta = std::abs(t);
    if (dfn_) return sign * dfn_(ta);
    if (ta > t_max_ * (1.0 + 1e-12))
        throw DomainError("FundamentalSolution: evaluation beyond cached range");
    const int i = locate(ta);
    const double h = t_[i + 1] - t_[i];
    const double s = (ta - t_[i]) / h;
    const double s2 = s * s;
    return sign * ((6 * s2 - 6 * s) * u_[i] / h + (3 * s2 - 4 * s + 1) * du_[i] +
                   (-6 * s2 + 6 * s) * u_[i + 1] / h + (3 * s2 - 2 * s) * du_[i + 1]);
}

double FundamentalSolution::precise_value(double t) const {
    const double sign = (t < 0.0 && kind_ == SolutionKind::Odd) ? -1.0 : 1.0;
    const double ta = std::abs(t);
    if (fn_) return sign * fn_(ta);
    if (ta > t_max_ * (1.0 + 1e-12))
        throw DomainError("FundamentalSolution: evaluation beyond cached range");
    const int i = locate(ta);
    if (ta == t_[i]) return sign * u_[i];
    const DelaunayParam param = param_;
    const int j = j_;
    auto rhs = [&param, j](double s, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], (j * j - 2.0 * p_weight(param, s)) * y[0]};
    };
    const auto y = dopri5<2>(rhs, t_[i], {u_[i], du_[i]}, ta, std::min(tol_, 1e-13));
    return sign * y[0];
}

FundamentalSolution hill_ode(const DelaunayParam& param, int j, double t_end,
                             double u0, double du0, double tol) {
    if (j < 0) throw DomainError("hill_ode: mode must be nonnegative");
    if (!(t_end > 0.0)) throw DomainError("hill_ode: t_end must be positive");
    FundamentalSolution sol;
    sol.j_ = j;
    sol.kind_ = (du0 == 0.0) ? SolutionKind::Even : SolutionKind::Odd;
    sol.source_ = SolutionSource::OdeIntegrated;
    sol.param_ = param;
    sol.tol_ = tol;
    sol.t_max_ = t_end;

    auto rhs = [&param, j](double s, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], (j * j - 2.0 * p_weight(param, s)) * y[0]};
    };
    OdeTrajectory<2> traj;
    const double max_step = std::min(param.tau, 1.0) / 16.0;
    dopri5<2>(rhs, 0.0, {u0, du0}, t_end, tol, max_step, &traj);
    sol.t_ = std::move(traj.t);
    sol.u_.reserve(sol.t_.size());
    sol.du_.reserve(sol.t_.size());
    for (const auto& y : traj.y) sol.u_.push_back(y[0]);
    for (size_t i = 0; i < traj.dy.size(); ++i) sol.du_.push_back(traj.y[i][1]);
    return sol;
}

FundamentalSolution closed_form_solution(const DelaunayParam& param, int j,
                                         SolutionKind kind, double t_max) {
    if (j != 0 && j != 1)
        throw DomainError("closed_form_solution: only modes 0 and 1");
    FundamentalSolution sol;
    sol.j_ = j;
    sol.kind_ = kind;
    sol.source_ = SolutionSource::ClosedForm;
    sol.t_max_ = t_max;
    sol.param_ = param;
    if (kind == SolutionKind::Even) {
        sol.fn_ = [param, j](double t) { return eval_pair(param, j, t).w; };
        sol.dfn_ = [param, j](double t) { return eval_pair(param, j, t).dw; };
    } else {
        sol.fn_ = [param, j](double t) { return eval_pair(param, j, t).v; };
        sol.dfn_ = [param, j](double t) { return eval_pair(param, j, t).dv; };
    }
    return sol;
}

std::shared_ptr<const FundamentalSolution> cached_wj(const DelaunayParam& param,
                                                     int j, double t_end) {
    static std::map<std::pair<double, int>, std::shared_ptr<const FundamentalSolution>> cache;
    static std::mutex mtx;
    const auto key = std::make_pair(param.a, j);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end() && it->second->t_max() >= t_end) return it->second;
    }
    std::shared_ptr<const FundamentalSolution> built;
    if (j <= 1) {
        built = std::make_shared<FundamentalSolution>(
            closed_form_solution(param, j, SolutionKind::Even,
                                 std::numeric_limits<double>::infinity()));
    } else {
        const double sign0 = (j % 2 == 0) ? -1.0 : 1.0; // (-1)^{j+1}
        built = std::make_shared<FundamentalSolution>(
            hill_ode(param, j, t_end, sign0, 0.0));
    }
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[key];
    if (!slot || slot->t_max() < t_end) slot = built; // last writer wins
    return slot;
}

MonodromyReport monodromy(const DelaunayParam& param, int j) {
    if (j < 0) throw DomainError("monodromy: mode must be nonnegative");
    const double period = 2.0 * param.tau;
    auto rhs = [&param, j](double s, const std::array<double, 4>& y) {
        const double q = j * j - 2.0 * p_weight(param, s);
        return std::array<double, 4>{y[1], q * y[0], y[3], q * y[2]};
    };
    const auto y = dopri5<4>(rhs, 0.0, {1.0, 0.0, 0.0, 1.0}, period, 1e-12,
                             std::min(param.tau, 1.0) / 16.0);
    MonodromyReport rep;
    rep.j = j;
    rep.matrix = {{{y[0], y[2]}, {y[1], y[3]}}};
    rep.trace = y[0] + y[3];
    rep.det = y[0] * y[3] - y[1] * y[2];
    constexpr double kParabolicTol = 1e-7;
    if (std::abs(std::abs(rep.trace) - 2.0) < kParabolicTol) {
        rep.classification = FloquetClass::Parabolic;
    } else if (std::abs(rep.trace) > 2.0) {
        rep.classification = FloquetClass::Hyperbolic;
        rep.exponent = std::acosh(0.5 * std::abs(rep.trace)) / period;
    } else {
        rep.classification = FloquetClass::Elliptic;
        rep.exponent = std::acos(0.5 * rep.trace) / period;
    }
    return rep;
}

std::optional<double> zero_gap_bound(const DelaunayParam& param, int j) {
    // max of 2 p_a - j^2 sits at t = 0 where p_a = 1 + 2 gamma
    const double top = 2.0 * (1.0 + 2.0 * param.gamma) - j * j;
    if (top <= 0.0) return std::nullopt;
    return std::numbers::pi / std::sqrt(top);
}

GridFunction jacobi_apply(const DelaunayParam& param, const GridFunction& phi) {
    const GridSpec& spec = phi.spec();
    if (spec.nt < 8 || spec.ntheta < 8)
        throw DomainError("jacobi_apply: grid too coarse (need >= 8 per direction)");

    const int nt = spec.nt, nth = spec.ntheta;
    const double h = spec.ht();
    GridFunction out(spec, false, phi.even_t());

    // theta second derivative: spectral per t-row
    ThetaTransform tf(nth);
    std::vector<double> c, s;
    std::vector<double> dthth(static_cast<size_t>(nt + 1) * nth);
    for (int i = 0; i <= nt; ++i) {
        tf.forward(&phi.values()[i * nth], c, s);
        for (int j = 0; j <= tf.jmax(); ++j) {
            c[j] *= -static_cast<double>(j) * j;
            s[j] *= -static_cast<double>(j) * j;
        }
        tf.inverse(c, s, &dthth[i * nth]);
    }

    // t second derivative: 4th-order 5/6-point stencils
    static const double ctr[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};       // /12h^2
    static const double fwd[6] = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
    static const double near[6] = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};
    const double ih2 = 1.0 / (12.0 * h * h);
    for (int i = 0; i <= nt; ++i) {
        const auto r = roulette(param, spec.t(i));
        const double x2 = r.x * r.x;
        const double pa = x2 + sqr(param.gamma) / x2;
        for (int k = 0; k < nth; ++k) {
            double dtt = 0.0;
            if (i >= 2 && i <= nt - 2) {
                for (int d = -2; d <= 2; ++d) dtt += ctr[d + 2] * phi.at(i + d, k);
            } else if (i == 0) {
                for (int d = 0; d < 6; ++d) dtt += fwd[d] * phi.at(d, k);
            } else if (i == 1) {
                for (int d = 0; d < 6; ++d) dtt += near[d] * phi.at(d, k);
            } else if (i == nt - 1) {
                for (int d = 0; d < 6; ++d) dtt += near[d] * phi.at(nt - d, k);
            } else { // i == nt
                for (int d = 0; d < 6; ++d) dtt += fwd[d] * phi.at(nt - d, k);
            }
            dtt *= ih2;
            out.at(i, k) =
                (dtt + dthth[i * nth + k] + 2.0 * pa * phi.at(i, k)) / (2.0 * x2);
        }
    }
    return out;
}

} // namespace delpmc
