#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "delpmc/curvature_field.hpp"
#include "delpmc/delaunay.hpp"
#include "delpmc/grid.hpp"

namespace delpmc {

/// What jacobi_invert does with a right-hand side that has a component along
/// the kernel: Strict raises SolvabilityError, Project removes it (with a
/// warning) and returns the unique solution orthogonal to the kernel.
enum class ModePolicy { Strict, Project };

struct InvertInfo {
    std::vector<int> kernel_modes;
    std::vector<double> removed_components;
    std::vector<std::string> warnings;
};

/// Solves L_a phi = g on the grid of g (even in t, Dirichlet at +-T):
/// discrete Fourier in theta, per-mode 4th-order compact (Numerov)
/// tridiagonal two-point solves of phi'' + (2 p_a - j^2) phi = 2 x_a^2 g_j
/// with a Neumann row at t = 0. Kernel modes (from kernel_basis) are solved
/// in bordered form constrained to the x_a^2-weighted complement.
GridFunction jacobi_invert(const DelaunayParam& param, double T, const GridFunction& g,
                           ModePolicy policy = ModePolicy::Strict,
                           InvertInfo* info = nullptr);

/// Explicit variation-of-parameters inverse of the 1D (mode-0) problem on the
/// uniform half grid over [0, T]: g holds n+1 samples, returns phi samples
/// with phi'(0) = 0, phi(T) = 0.
std::vector<double> mode0_invert_samples(const DelaunayParam& param, double T,
                                         std::span<const double> g);

/// Smooth off-grid extension of a normal graph X_a + p e1 + q e2 + phi N_a:
/// trigonometric interpolation of phi in theta, 9-point window polynomial
/// interpolation of the Fourier coefficients in t. This is the sampler the
/// solver's residual and the independent curvature recomputation share.
class NormalGraphPatch {
public:
    NormalGraphPatch(const DelaunayParam& param, double p, double q,
                     const GridFunction& phi);

    Vec3 operator()(double t, double theta) const;
    double phi_value(double t, double theta) const;
    const DelaunayParam& param() const { return param_; }

private:
    struct TCache {
        RouletteEval r;
        std::vector<double> c, s;
    };
    const TCache& tcache(double t) const;

    DelaunayParam param_;
    double p_, q_;
    GridSpec spec_;
    std::vector<std::vector<double>> coef_c_, coef_s_; // [mode][t-node]
    mutable std::unordered_map<uint64_t, TCache> cache_;
};

struct SolverOptions {
    int nt = 256;    // t intervals over [-T, T] (even)
    int ntheta = 64; // theta points
    double tol = 1e-8;
    int max_iter = 25;
    double fd_step = 0.0;            // 0 -> default_fd_step(param)
    double continuation_step = 1e-3; // eps marching step when plain Newton fails
    const GridFunction* warm_phi = nullptr;
};

struct PMCSolution {
    DelaunayParam param;
    double T = 0.0;
    double eps = 0.0;           // reached value (== requested on success)
    double eps_requested = 0.0;
    double p = 0.0, q = 0.0;
    GridFunction phi;
    double lambda1 = 0.0, lambda2 = 0.0;
    double residual_inf = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Newton iteration phi <- phi - L_a^{-1}[M(U + phi N) - H_eps(U + phi N)]
/// at a nondegenerate half-length (kernel dim 0). At T in the mode-0
/// degeneracy set with a perturbative field the solve is refused with the
/// obstruction integral as diagnostic (ObstructionError). Falls back to
/// eps-continuation when plain Newton diverges.
PMCSolution solve_nondegenerate(const DelaunayParam& param, double T,
                                const CurvatureField& field, double eps,
                                double p, double q, const SolverOptions& opts = {});

/// Mode-0 (rotationally symmetric) path for fields depending on z only;
/// valid for any T outside the mode-0 degeneracy set. The linear stage is
/// the explicit variation-of-parameters inverse.
PMCSolution solve_axisymmetric(const DelaunayParam& param, double T,
                               const CurvatureField& field, double eps,
                               const SolverOptions& opts = {});

/// Lyapunov-Schmidt inner solve at T in the mode-1 degeneracy set
/// (a in (0, (sqrt(3)-1)/2], kernel = span{w1 cos, w1 sin}): finds
/// (phi, lambda1, lambda2) with
///   M - H_eps = lambda1 w1 cos(theta) + lambda2 w1 sin(theta)
/// and phi in the x_a^2-weighted complement of the kernel.
PMCSolution solve_lyapunov_schmidt(const DelaunayParam& param, double T,
                                   const CurvatureField& field, double eps,
                                   double p, double q,
                                   const SolverOptions& opts = {});

/// Outer Newton on (p, q) driving the Lyapunov-Schmidt multipliers to zero,
/// seeded at a nondegenerate critical point of the Melnikov function.
PMCSolution solve_with_translation(const DelaunayParam& param, double T,
                                   const CurvatureField& field, double eps,
                                   double p0, double q0,
                                   const SolverOptions& opts = {});

/// The normalization C0 = pi * int_{-T}^{T} x_a^2 |w_{a,1}|^2 dt relating
/// the multipliers to the Melnikov gradient: eps^{-1} C0 lambda -> grad M.
double multiplier_normalization(const DelaunayParam& param, double T);

/// Obstruction integral over [-T_{a,k}, T_{a,k}] x [-pi, pi]:
///   int x_a^2 w_{a,0} Htilde(X_a + p0 e1 + q0 e2) dt dtheta.
/// Nonvanishing at a mode-0 degeneracy value rules out solution paths.
double obstruction_integral(const DelaunayParam& param, int k,
                            const CurvatureField& field, double p0, double q0);

/// Positive root T0 of the limit profile -1 + t tanh(t) (Brent).
double limit_profile_root();

struct NormProbeEntry {
    double a;
    double norm;
    bool inconclusive; // g nearly orthogonal to the limit profile
};

/// Applies the explicit mode-0 inverse to g on [-T, T] for each a and
/// reports ||phi||_inf; requires T above the limit-profile root T0.
/// Diagnoses the inverse-norm blow-up as a -> 0.
std::vector<NormProbeEntry> inverse_norm_probe(std::span<const double> a_list, double T,
                                               const std::function<double(double)>& g);

} // namespace delpmc
