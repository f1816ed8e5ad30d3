#include "delpmc/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "delpmc/errors.hpp"
#include "delpmc/jacobi_field.hpp"
#include "delpmc/numerics.hpp"

namespace delpmc {

double find_T0(const DelaunayParam& param, int k) {
    if (k < 0) throw DomainError("find_T0: index must be nonnegative");
    if (param.cylinder()) return (k + 0.5) * std::numbers::pi;

    const double lo = k * param.tau;
    const double hi = (k + 0.5) * param.tau;
    auto f = [&](double t) { return w0_closed(param, t); };
    // w0(k tau) = (-1)^{k+1}, w0((k+1/2) tau) has the opposite sign
    const double eps = 1e-12 * param.tau;
    if (f(lo + eps) * f(hi - eps) >= 0.0)
        throw NumericalError(
            "find_T0: no sign change over the theorem bracket; inconsistent "
            "fundamental solution");
    const double root = brent(f, lo + eps, hi - eps, 1e-15, 1e-12);
    if (std::abs(f(root)) > 1e-11)
        throw NumericalError("find_T0: Brent residual above 1e-11");
    return root;
}

std::vector<double> T1_set(const DelaunayParam& param, double T_max) {
    std::vector<double> out;
    if (param.a < 0.0) return out;
    for (int k = 0;; ++k) {
        const double T = (k + 0.5) * param.tau;
        if (T > T_max) break;
        out.push_back(T);
    }
    return out;
}

ZeroScan scan_zeros(const DelaunayParam& param, int j, double T_max) {
    if (j < 2) throw DomainError("scan_zeros: use find_T0 / T1_set for j < 2");
    ZeroScan result;
    result.window = T_max;
    if (static_cast<double>(j) * j >= 2.0 * (1.0 + 2.0 * param.gamma)) {
        result.certificate = true;
        return result;
    }
    auto wj = cached_wj(param, j, T_max * (1.0 + 1e-9));

    // sample finely enough that no pair of zeros fits between samples
    double step = param.tau / 64.0;
    if (auto gap = zero_gap_bound(param, j)) step = std::min(step, *gap / 8.0);
    const int n = static_cast<int>(std::ceil(T_max / step));
    double prev_t = 0.0, prev_v = wj->value(0.0);
    for (int i = 1; i <= n; ++i) {
        const double t = std::min(T_max, i * step);
        const double v = wj->value(t);
        if (prev_v == 0.0) {
            result.zeros.push_back(prev_t);
        } else if (v * prev_v < 0.0) {
            const double root = brent(
                [&](double s) { return wj->precise_value(s); }, prev_t, t, 1e-14, 1e-11);
            result.zeros.push_back(root);
        }
        prev_t = t;
        prev_v = v;
    }
    return result;
}

namespace {

double wj_at(const DelaunayParam& param, int j, double T) {
    if (j == 0)
        return param.cylinder() ? -std::cos(T) : w0_closed(param, T);
    if (j == 1) return fundamental_pair(param, 1, T).w;
    return cached_wj(param, j, T * (1.0 + 1e-9))->precise_value(T);
}

double wj_scale(const DelaunayParam& param, int j, double T) {
    auto wj = cached_wj(param, j, T * (1.0 + 1e-9));
    double m = 0.0;
    const int n = 64;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(wj->value(T * i / n)));
    return m;
}

} // namespace

KernelBasis kernel_basis(const DelaunayParam& param, double T, double tol) {
    if (!(T > 0.0)) throw DomainError("kernel_basis: T must be positive");
    KernelBasis out;
    // J_a = max{j : j^2 < 2(1+2 gamma_a)}, strict inequality
    const double bound = 2.0 * (1.0 + 2.0 * param.gamma);
    const int jtop = static_cast<int>(std::ceil(std::sqrt(bound))) - 1;
    for (int j = 0; j <= jtop; ++j) {
        const double tj = tol > 0.0 ? tol : 1e-8 * wj_scale(param, j, T);
        if (std::abs(wj_at(param, j, T)) <= tj) {
            if (j == 0) {
                out.dim += 1;
                out.labels.push_back("w0");
                out.modes.push_back(0);
            } else {
                out.dim += 2;
                out.labels.push_back("w" + std::to_string(j) + " cos(" +
                                     std::to_string(j) + " theta)");
                out.labels.push_back("w" + std::to_string(j) + " sin(" +
                                     std::to_string(j) + " theta)");
                out.modes.push_back(j);
            }
        }
    }
    return out;
}

double boundary_jacobian(const DelaunayParam& param, double T) {
    const double w0 = param.cylinder() ? -std::cos(T) : w0_closed(param, T);
    return -w0 / roulette(param, T).x;
}

std::vector<RootEntry> DegeneracyReport::flattened() const {
    std::vector<RootEntry> out;
    for (const auto& [j, v] : roots) out.insert(out.end(), v.begin(), v.end());
    std::sort(out.begin(), out.end(), [](const RootEntry& l, const RootEntry& r) {
        return l.j != r.j ? l.j < r.j : l.T < r.T;
    });
    return out;
}

DegeneracyReport degeneracy_report(const DelaunayParam& param, double T_max) {
    if (!(T_max > 0.0)) throw DomainError("degeneracy_report: T_max must be positive");
    DegeneracyReport rep;
    rep.a = param.a;
    rep.window = T_max;

    for (int k = 0;; ++k) {
        if (k * param.tau >= T_max) break;
        const double T = find_T0(param, k);
        if (T > T_max) break;
        RootEntry e;
        e.j = 0;
        e.k = k;
        e.T = T;
        e.bracket_lo = k * param.tau;
        e.bracket_hi = (k + 0.5) * param.tau;
        e.residual = std::abs(wj_at(param, 0, T));
        rep.roots[0].push_back(e);
    }
    for (double T : T1_set(param, T_max)) {
        RootEntry e;
        e.j = 1;
        e.T = T;
        e.bracket_lo = e.bracket_hi = T; // exact by the half-period law
        e.residual = std::abs(wj_at(param, 1, T));
        rep.roots[1].push_back(e);
    }

    const double two_gamma_bound = 2.0 * (1.0 + 2.0 * param.gamma);
    int j = 2;
    rep.j_certificates = (4.0 >= two_gamma_bound);
    for (; static_cast<double>(j) * j < two_gamma_bound; ++j) {
        auto scan = scan_zeros(param, j, T_max);
        rep.j_max_scanned = j;
        for (double T : scan.zeros) {
            RootEntry e;
            e.j = j;
            e.T = T;
            e.bracket_lo = e.bracket_hi = T;
            e.residual = std::abs(wj_at(param, j, T));
            rep.roots[j].push_back(e);
        }
    }
    return rep;
}

} // namespace delpmc
