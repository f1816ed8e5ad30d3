#pragma once

#include <functional>
#include <span>
#include <vector>

namespace delpmc {

/// Brent root finder on a sign-changing bracket [a, b].
/// Iterates until the bracket shrinks below xtol and |f| <= ftol (or machine
/// stagnation). Throws NumericalError if f(a) and f(b) do not straddle zero.
double brent(const std::function<double(double)>& f, double a, double b,
             double xtol = 1e-15, double ftol = 0.0, int max_iter = 200);

/// Fixed 16-point Gauss-Legendre rule on [a, b].
double gauss16(const std::function<double(double)>& f, double a, double b);

/// Composite 16-point Gauss-Legendre, halving subintervals until two
/// successive refinements differ by less than tol (mixed abs/rel).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-13, int max_level = 14);

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
/// Cached per n; n >= 1.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};
const QuadRule& gauss_rule(int n);

/// Integral of uniformly sampled data (spacing h) by composite Simpson,
/// with a 3/8 block when the interval count is odd. 4th order. n >= 4 points.
double integrate_samples(std::span<const double> f, double h);

/// Cumulative integral of uniformly sampled data: out[i] = integral from
/// t0 to t0 + i*h, by piecewise Lagrange cubics (4th order).
std::vector<double> cumulative_integral(std::span<const double> f, double h);

/// Polynomial interpolation of uniformly sampled data through a sliding
/// 9-point window centered at the node nearest to t (clamped at the ends).
/// Evaluation a little outside [t0, t0+(n-1)h] extrapolates the edge window.
double window_interp(std::span<const double> f, double t0, double h, double t);

/// Finite-difference weights (Fornberg) for the m-th derivative at point z
/// on the arbitrary nodes x.
std::vector<double> fd_weights(double z, std::span<const double> x, int m);

} // namespace delpmc
