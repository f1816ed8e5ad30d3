#pragma once

#include <array>
#include <span>
#include <vector>

#include "delpmc/curvature_field.hpp"
#include "delpmc/delaunay.hpp"

namespace delpmc {

struct MelnikovEval {
    double p = 0.0, q = 0.0;
    double value = 0.0;
    std::array<double, 2> grad{0.0, 0.0};
    std::array<std::array<double, 2>, 2> hessian{{{0.0, 0.0}, {0.0, 0.0}}};
    bool nondegenerate = false;
    /// gradient below the detection floor already at the seed: the critical
    /// set is a continuum (constant Htilde), not an isolated point
    bool gradient_floor = false;
};

/// The translation functional
///   M(p, q) = int Q(X_a + p e1 + q e2) . dt X_a ^ dth X_a dt dtheta
/// over [-T, T] x [-pi, pi], with its analytic gradient
///   dM/dp = -int x_a^2 Htilde(X_a + p e1 + q e2) w_{a,1} cos(theta),
/// for a perturbative curvature family. Quadrature nodes are fixed at
/// construction by doubling the t-count until successive levels agree to
/// 1e-10 relative, so evaluations are deterministic and FD-differentiable.
class Melnikov {
public:
    Melnikov(const DelaunayParam& param, double T, const CurvatureField& field);

    double value(double p, double q) const;
    std::array<double, 2> grad(double p, double q) const;
    MelnikovEval eval(double p, double q) const;

    /// Newton search from each seed (analytic gradient, symmetrized FD
    /// Hessian, step clipped at tau/2); converged points deduplicated
    /// within 1e-6. Seeds that fail to converge are dropped.
    std::vector<MelnikovEval> find_critical_points(
        std::span<const std::array<double, 2>> seeds, int max_iter = 40) const;

    int t_nodes() const { return nt_; }
    const DelaunayParam& param() const { return param_; }
    double T() const { return T_; }

private:
    DelaunayParam param_;
    double T_;
    CurvatureField field_;
    int nt_ = 64;
    int ntheta_ = 64;

    struct TNode {
        double t, wt; // node and weight
        double x, dx, dz, w1;
    };
    std::vector<TNode> tnodes_;
    std::vector<double> th_, thw_;

    void build_nodes(int nt);
    double value_with_nodes(double p, double q) const;
};

/// Weighted volume functional V_{T,Q}(X) = int Q(X) . X_t ^ X_theta over
/// [-T, T] x [-pi, pi], tangents by 4th-order finite differences.
/// The patch must satisfy the symmetry contract (X.e1, X.e2 even in t,
/// X.e3 odd); violations detected by sampling raise ContractError.
double volume_functional(const PatchFn& patch, double T, const CurvatureField& field,
                         double fd_step = 1e-4, int nt = 128, int ntheta = 64);

struct FirstVariation {
    double analytic;
    double numeric;
};

/// Both sides of the first-variation identity for a one-parameter family
/// s -> patch: analytic = interior term + boundary line integrals evaluated
/// at s = 0; numeric = central FD of volume_functional along the family.
FirstVariation first_variation_check(
    const std::function<PatchFn(double)>& family, double T,
    const CurvatureField& field, double ds = 1e-5);

/// Parametric patch with analytic tangents, for identity checks.
struct SmoothPatch {
    std::function<Vec3(double, double)> value;
    std::function<Vec3(double, double)> dt;
    std::function<Vec3(double, double)> dtheta;
};

/// Residual |LHS - RHS| of the integration-by-parts identity
///   int Y.[X_t ^ Z_th + Z_t ^ X_th] =
///   int Z.[Y_t ^ X_th + X_t ^ Y_th] - oint [Z . X_th ^ Y]_{t=-T}^{t=T}
/// for 2 pi -periodic patches, by fixed high-order quadrature.
double wente_residual(const SmoothPatch& X, const SmoothPatch& Y,
                      const SmoothPatch& Z, double T);

} // namespace delpmc
