#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "delpmc/delaunay.hpp"
#include "delpmc/grid.hpp"

namespace delpmc {

struct FundamentalPair {
    double w;
    double v;
};

/// Closed-form even/odd fundamental pair of the mode-j Hill equation,
/// j in {0, 1}:
///   j = 0: w from the a-derivatives of the profile (or -cos t on the
///          cylinder), v = x'/x (or -sin t);
///   j = 1: w = z'/x, v = (x x' + z z')/x.
FundamentalPair fundamental_pair(const DelaunayParam& param, int j, double t);

/// Explicit formula for the even mode-0 solution,
///   (1+2a)^{-1} [1 + 2 gamma - 2 x^2 + (x'/x)(2z - t)].
/// Invalid at a = -1/2.
double w0_closed(const DelaunayParam& param, double t);

enum class SolutionKind { Even, Odd };
enum class SolutionSource { ClosedForm, OdeIntegrated };

/// A solution of u'' = (j^2 - 2 p_a) u on [0, t_max], extended to negative t
/// by its parity. ODE-integrated solutions cache dense nodes and evaluate by
/// cubic Hermite interpolation; precise_value re-integrates locally from the
/// nearest node (used by root polishing).
class FundamentalSolution {
public:
    int mode() const { return j_; }
    SolutionKind kind() const { return kind_; }
    SolutionSource source() const { return source_; }
    double t_max() const { return t_max_; }

    double value(double t) const;
    double derivative(double t) const;
    double precise_value(double t) const;

    const std::vector<double>& nodes() const { return t_; }
    double node_value(int i) const { return u_[i]; }
    double node_derivative(int i) const { return du_[i]; }

private:
    friend FundamentalSolution hill_ode(const DelaunayParam&, int, double,
                                        double, double, double);
    friend FundamentalSolution closed_form_solution(const DelaunayParam&, int,
                                                    SolutionKind, double);

    int j_ = 0;
    SolutionKind kind_ = SolutionKind::Even;
    SolutionSource source_ = SolutionSource::OdeIntegrated;
    double t_max_ = 0.0;
    // ODE-integrated representation
    std::vector<double> t_, u_, du_;
    DelaunayParam param_{};
    double tol_ = 1e-12;
    // closed-form representation
    std::function<double(double)> fn_, dfn_;

    int locate(double t) const;
};

/// Integrates the mode-j Hill equation u'' = (j^2 - 2 p_a) u from
/// (u, u')(0) = (u0, du0) up to t_end with local tolerance tol.
FundamentalSolution hill_ode(const DelaunayParam& param, int j, double t_end,
                             double u0, double du0, double tol = 1e-12);

/// Wraps the closed forms of fundamental_pair / w0_closed into a
/// FundamentalSolution (j in {0, 1}).
FundamentalSolution closed_form_solution(const DelaunayParam& param, int j,
                                         SolutionKind kind, double t_max);

/// Even solution w_{a,j} with data ((-1)^{j+1}, 0), cached per (a, j);
/// closed form for j <= 1, ODE-integrated otherwise. The cache is rebuilt
/// when a longer range is requested.
std::shared_ptr<const FundamentalSolution> cached_wj(const DelaunayParam& param,
                                                     int j, double t_end);

enum class FloquetClass { Hyperbolic, Parabolic, Elliptic };

struct MonodromyReport {
    int j;
    std::array<std::array<double, 2>, 2> matrix; // transfer over one period 2 tau
    double trace;
    double det;
    FloquetClass classification;
    std::optional<double> exponent; // mu (hyperbolic) or sigma (elliptic)
};

/// Transfer matrix of the principal fundamental pair over [0, 2 tau_a] and
/// its trace classification. Parabolic window |trace -+ 2| < 1e-7.
MonodromyReport monodromy(const DelaunayParam& param, int j);

/// Minimal distance between consecutive zeros of any solution of the mode-j
/// equation: pi * (max (2 p_a - j^2)_+)^{-1/2}; nullopt when 2 p_a - j^2 <= 0
/// everywhere (no solution can vanish twice).
std::optional<double> zero_gap_bound(const DelaunayParam& param, int j);

/// Discrete Jacobi operator (Delta phi + 2 p_a phi) / (2 x_a^2): spectral
/// differentiation in theta, 4th-order finite differences in t.
GridFunction jacobi_apply(const DelaunayParam& param, const GridFunction& phi);

} // namespace delpmc
