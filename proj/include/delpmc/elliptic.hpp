#pragma once

namespace delpmc::elliptic {

/// Argument pair (s, m) of the Jacobi elliptic functions. m is the
/// *parameter* (the square of the modulus), restricted to [0, 1).
struct EllipticPoint {
    double s;
    double m;
    EllipticPoint(double s, double m);
};

struct CompleteIntegrals {
    double K;
    double E;
};

/// Complete elliptic integrals K(m), E(m) by the arithmetic-geometric mean
/// iteration. m in [0, 1).
CompleteIntegrals complete_integrals(double m);

/// Incomplete elliptic integral of the first kind F(s|m), extended to all
/// real s by the quarter-period law F(s + pi|m) = F(s|m) + 2K(m).
double incomplete_F(EllipticPoint pt);

/// Incomplete elliptic integral of the second kind E(s|m), with
/// E(s + pi|m) = E(s|m) + 2E(m).
double incomplete_E(EllipticPoint pt);

/// Jacobi amplitude am(s|m): the inverse of F with respect to s.
double amplitude(EllipticPoint pt);

struct DnEval {
    double dn;
    double ddn_ds;
};

/// Delta amplitude dn(s|m) = sqrt(1 - m sin^2 am(s|m)) and its s-derivative
/// -m sin(am) cos(am).
DnEval dn(EllipticPoint pt);

/// Parameter derivative d/dm dn(s|m) in closed form. Requires m in (0, 1).
double dn_dm(EllipticPoint pt);

/// Parameter derivative d/dm am(s|m) in closed form. Requires m in (0, 1).
double amplitude_dm(EllipticPoint pt);

} // namespace delpmc::elliptic
