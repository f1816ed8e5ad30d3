#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delpmc/delaunay.hpp"

namespace delpmc {

/// Unique zero T_{a,k} of w_{a,0} inside (k tau_a, (k+1/2) tau_a), by Brent
/// on the closed form, residual |w| <= 1e-11. The cylinder returns
/// (k+1/2) pi exactly.
double find_T0(const DelaunayParam& param, int k);

/// Mode-1 degeneracy values up to T_max: {(k+1/2) tau_a} for a > 0, empty
/// for a < 0.
std::vector<double> T1_set(const DelaunayParam& param, double T_max);

struct ZeroScan {
    std::vector<double> zeros;
    /// true when j^2 >= 2(1+2 gamma_a): no zeros can exist anywhere, the
    /// empty result is a certificate rather than "none found in window".
    bool certificate = false;
    double window = 0.0;
};

/// All zeros of w_{a,j} (j >= 2) on (0, T_max]: sign-change scan refined by
/// Brent on locally re-integrated values.
ZeroScan scan_zeros(const DelaunayParam& param, int j, double T_max);

struct KernelBasis {
    int dim = 0;
    std::vector<std::string> labels;
    std::vector<int> modes; // contributing Fourier modes (j=0 once, j>=1 twice)
};

/// Kernel dimension and basis labels of the Jacobi operator at half-length T:
/// +1 if |w_{a,0}(T)| <= tol, +2 for each 1 <= j <= J_a with
/// |w_{a,j}(T)| <= tol, where J_a = max{j : j^2 < 2(1+2 gamma_a)}.
/// tol < 0 selects the default 1e-8 * max|w_{a,j}| over [0, T].
KernelBasis kernel_basis(const DelaunayParam& param, double T, double tol = -1.0);

/// Jacobian of the boundary-circle map F(a, T) = (x_a(T), z_a(T)):
/// -w_{a,0}(T) / x_a(T). Vanishes exactly on the mode-0 degeneracy set.
double boundary_jacobian(const DelaunayParam& param, double T);

struct RootEntry {
    int j = 0;
    int k = -1; // period index for j = 0; -1 otherwise
    double T = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double residual = 0.0;
};

struct DegeneracyReport {
    double a = 0.0;
    double window = 0.0;
    std::map<int, std::vector<RootEntry>> roots; // mode -> ascending roots
    bool j_certificates = false; // modes j >= 2 certified empty
    int j_max_scanned = 0;

    std::vector<RootEntry> flattened() const;
};

/// Full degeneracy structure on (0, T_max]: mode 0 by bracketed roots, mode 1
/// by the half-period law, modes 2..J_a by scanning.
DegeneracyReport degeneracy_report(const DelaunayParam& param, double T_max);

} // namespace delpmc
