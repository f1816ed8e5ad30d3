#include "delpmc/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "delpmc/errors.hpp"

namespace delpmc::elliptic {

namespace {

constexpr double kPi = std::numbers::pi;

void check_m(double m) {
    if (!(m >= 0.0 && m < 1.0))
        throw DomainError("elliptic: parameter m must lie in [0, 1), got " +
                          std::to_string(m));
}

// Carlson symmetric integrals, duplication algorithm. The small ERRTOL keeps
// the truncation error (~ERRTOL^6) below roundoff.
double carlson_rf(double x, double y, double z) {
    constexpr double ERRTOL = 0.001;
    double xt = x, yt = y, zt = z;
    double mu = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
    for (int it = 0; it < 300; ++it) {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        mu = (xt + yt + zt) / 3.0;
        dx = (mu - xt) / mu;
        dy = (mu - yt) / mu;
        dz = (mu - zt) / mu;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < ERRTOL) break;
    }
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) /
           std::sqrt(mu);
}

double carlson_rd(double x, double y, double z) {
    constexpr double ERRTOL = 0.001;
    double xt = x, yt = y, zt = z;
    double sum = 0.0, fac = 1.0;
    double mu = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
    for (int it = 0; it < 300; ++it) {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zt + lam));
        fac *= 0.25;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        mu = (xt + yt + 3.0 * zt) / 5.0;
        dx = (mu - xt) / mu;
        dy = (mu - yt) / mu;
        dz = (mu - zt) / mu;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < ERRTOL) break;
    }
    const double ea = dx * dy;
    const double eb = dz * dz;
    const double ec = ea - eb;
    const double ed = ea - 6.0 * eb;
    const double ee = ed + ec + ec;
    return 3.0 * sum +
           fac *
               (1.0 +
                ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 9.0 / 52.0 * dz * ee) +
                dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea))) /
               (mu * std::sqrt(mu));
}

// F and E on the principal range |phi| <= pi/2 via Carlson forms.
double F_principal(double phi, double m) {
    if (phi == 0.0) return 0.0;
    const double s = std::sin(phi), c = std::cos(phi);
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0);
}

double E_principal(double phi, double m) {
    if (phi == 0.0) return 0.0;
    const double s = std::sin(phi), c = std::cos(phi);
    const double s2 = s * s;
    return s * carlson_rf(c * c, 1.0 - m * s2, 1.0) -
           m / 3.0 * s2 * s * carlson_rd(c * c, 1.0 - m * s2, 1.0);
}

} // namespace

EllipticPoint::EllipticPoint(double s_, double m_) : s(s_), m(m_) { check_m(m); }

CompleteIntegrals complete_integrals(double m) {
    check_m(m);
    double an = 1.0, bn = std::sqrt(1.0 - m);
    double cn = std::sqrt(m);
    double csum = 0.5 * cn * cn, pow2 = 0.5; // sum of 2^{n-1} c_n^2, n >= 0
    for (int it = 0; it < 60; ++it) {
        const double diff = an - bn;
        if (std::abs(diff) <= 2e-16 * an) break; // at the ulp floor
        cn = 0.5 * diff;
        const double a1 = 0.5 * (an + bn);
        bn = std::sqrt(an * bn);
        an = a1;
        pow2 *= 2.0;
        csum += pow2 * cn * cn;
    }
    const double K = kPi / (2.0 * an);
    return {K, K * (1.0 - csum)};
}

double incomplete_F(EllipticPoint pt) {
    // reduce the amplitude to [-pi/2, pi/2]; F is odd and quarter-periodic
    const double n = std::nearbyint(pt.s / kPi);
    const double r = pt.s - n * kPi;
    double val = F_principal(r, pt.m);
    if (n != 0.0) val += 2.0 * n * complete_integrals(pt.m).K;
    return val;
}

double incomplete_E(EllipticPoint pt) {
    const double n = std::nearbyint(pt.s / kPi);
    const double r = pt.s - n * kPi;
    double val = E_principal(r, pt.m);
    if (n != 0.0) val += 2.0 * n * complete_integrals(pt.m).E;
    return val;
}

double amplitude(EllipticPoint pt) {
    const double m = pt.m;
    if (m == 0.0) return pt.s;
    const double K = complete_integrals(m).K;
    // am(s + 2K) = am(s) + pi; reduce to s' in [-K, K]
    const double n = std::nearbyint(pt.s / (2.0 * K));
    const double sp = pt.s - 2.0 * n * K;

    // safeguarded Newton for F(phi|m) = sp on [-pi/2, pi/2];
    // dF/dphi = (1 - m sin^2 phi)^{-1/2}
    double lo = -0.5 * kPi, hi = 0.5 * kPi;
    double phi = sp * (0.5 * kPi) / K;
    phi = std::clamp(phi, lo, hi);
    for (int it = 0; it < 60; ++it) {
        const double g = F_principal(phi, m) - sp;
        if (g > 0.0) hi = phi; else lo = phi;
        const double sn = std::sin(phi);
        const double step = g * std::sqrt(1.0 - m * sn * sn);
        double next = phi - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - phi) < 1e-16 * std::max(1.0, std::abs(phi)) &&
            std::abs(g) < 1e-15 * std::max(1.0, std::abs(sp))) {
            phi = next;
            break;
        }
        phi = next;
    }
    return phi + n * kPi;
}

DnEval dn(EllipticPoint pt) {
    const double am = amplitude(pt);
    const double sn = std::sin(am), cn = std::cos(am);
    const double d = std::sqrt(1.0 - pt.m * sn * sn);
    return {d, -pt.m * sn * cn};
}

double amplitude_dm(EllipticPoint pt) {
    if (pt.m <= 0.0)
        throw DomainError("amplitude_dm: requires m in (0, 1)");
    const auto [dnv, dns] = dn(pt);
    const double m = pt.m;
    const double I2 = incomplete_E({amplitude(pt), m}); // int_0^s dn^2
    return dnv / (2.0 * m) *
           (pt.s - dns / ((1.0 - m) * dnv) - I2 / (1.0 - m));
}

double dn_dm(EllipticPoint pt) {
    if (pt.m <= 0.0)
        throw DomainError("dn_dm: requires m in (0, 1)");
    const auto [dnv, dns] = dn(pt);
    const double m = pt.m;
    const double I2 = incomplete_E({amplitude(pt), m});
    return (dnv - 1.0 / dnv) / (2.0 * m) +
           dns / (2.0 * m) * (pt.s - dns / ((1.0 - m) * dnv) - I2 / (1.0 - m));
}

} // namespace delpmc::elliptic
