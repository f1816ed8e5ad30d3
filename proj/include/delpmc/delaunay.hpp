#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace delpmc {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double c) const { return {c * x, c * y, c * z}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double c, const Vec3& v) { return v * c; }

enum class Branch { Unduloid, Cylinder, Nodoid };

/// Delaunay parameter a in (-1, 0) u (0, inf) with the derived quantities of
/// the elliptic representation of the generating roulette. a = -1/2 is the
/// cylinder; a in (-1, 0) unduloids; a > 0 nodoids.
struct DelaunayParam {
    double a;
    double gamma;  // a(1+a)
    double m;      // elliptic parameter of the dn representation
    double tau;    // half-period of the profile
    double scale;  // dn-representation scale: (1+a) or |a|
    Branch branch;

    bool second_branch() const { return a < -0.5; } // a in (-1, -1/2)
    bool cylinder() const { return branch == Branch::Cylinder; }
};

/// Builds the parameter pack. Rejects a outside (-1, 0) u (0, inf) and the
/// near-singular fringes |a| < 1e-6, a < -1 + 1e-6 where m -> 1.
DelaunayParam make_param(double a);

/// Profile-curve state at parameter t: radius x, height z and derivatives.
struct RouletteEval {
    double t;
    double x;
    double dx;
    double z;
    double dz;
};

/// Closed-form roulette via the dn representation (branch shift handled
/// internally); z from the incomplete second integral.
RouletteEval roulette(const DelaunayParam& param, double t);

/// Independent oracle: adaptive integration of the profile ODE system
///   x'' = (1+2 gamma)x - 2x^3,  z' = x^2 - gamma
/// from (x, x', z)(0) = (1+a, 0, 0), local tolerance tol.
/// The grid must be ascending and start at 0.
std::vector<RouletteEval> roulette_ode_oracle(double a, std::span<const double> t_grid,
                                              double tol = 1e-12);

/// Weight p_a(t) = x_a^2 + gamma^2 / x_a^2 of the Jacobi operator.
double p_weight(const DelaunayParam& param, double t);

struct RouletteDeriv {
    double dx_da;
    double dz_da;
};

/// Closed-form a-derivatives of the profile. Invalid at a = -1/2 (the
/// formulas divide by gamma(1+2a)); the caller uses the cylinder case there.
RouletteDeriv roulette_da(const DelaunayParam& param, double t);

struct SurfaceSample {
    Vec3 position;
    Vec3 normal; // unit normal of the underlying Delaunay surface
    double t;
    double theta;
};

/// Point of the normal graph X_a + p e1 + q e2 + phi N_a, with the unit
/// normal of the underlying surface. Rejects phi that degenerates the graph.
SurfaceSample surface_point(const DelaunayParam& param, double p, double q,
                            double t, double theta, double phi);

/// Value of the graph-validity expression
///   1 - 2 phi + (phi^2/x^2)(x^2 - gamma^2/x^2);
/// the normal graph is immersed where this is positive.
double graph_validity(const DelaunayParam& param, double t, double phi);

using PatchFn = std::function<Vec3(double, double)>;

/// Mean curvature of a parametric patch at (t, theta) from the first and
/// second fundamental forms, all derivatives by 4th-order central
/// differences with step h.
double mean_curvature(const PatchFn& patch, double t, double theta, double h);

/// Same, for patches defined only on the strip t in [t_lo, t_hi]: the
/// t-stencils shift to one-sided 6-point forms near the edges so no sample
/// falls outside the strip (central extrapolation of gridded data would
/// amplify roundoff catastrophically there).
double mean_curvature(const PatchFn& patch, double t, double theta, double h,
                      double t_lo, double t_hi);

/// Default finite-difference step for curvature evaluations on surfaces
/// derived from this parameter: 1e-4 * max(1, tau).
double default_fd_step(const DelaunayParam& param);

/// Writes a triangulated OBJ mesh of the (possibly perturbed) surface over
/// [-T, T] x [-pi, pi]. phi, when provided, is sampled at the mesh nodes
/// (row-major (n_t+1) x n_theta, theta seam welded). Grid resolution >= 8.
void export_mesh(const DelaunayParam& param, double T, double p, double q,
                 std::span<const double> phi, const std::string& path,
                 int n_t = 64, int n_theta = 64);

} // namespace delpmc
