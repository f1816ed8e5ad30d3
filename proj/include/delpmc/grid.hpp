#pragma once

#include <functional>
#include <vector>

namespace delpmc {

/// Uniform grid over [-T, T] x [-pi, pi]: t_i = -T + 2T i/n_t (i = 0..n_t),
/// theta_k = -pi + 2 pi k / n_theta (k = 0..n_theta-1, seam welded).
struct GridSpec {
    double T;
    int nt;
    int ntheta;

    double t(int i) const;
    double theta(int k) const;
    double ht() const { return 2.0 * T / nt; }
    bool operator==(const GridSpec&) const = default;
};

/// Scalar field sampled on a GridSpec, row-major (n_t+1) x n_theta.
/// Flags record the symmetry contract the values are supposed to satisfy.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridSpec spec, bool dirichlet = false, bool even_t = false);

    static GridFunction sample(GridSpec spec,
                               const std::function<double(double, double)>& f,
                               bool dirichlet = false, bool even_t = false);

    const GridSpec& spec() const { return spec_; }
    bool dirichlet() const { return dirichlet_; }
    bool even_t() const { return even_t_; }

    double& at(int i, int k) { return v_[i * spec_.ntheta + k]; }
    double at(int i, int k) const { return v_[i * spec_.ntheta + k]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double sup_norm() const;
    /// max |v(-t,theta) - v(t,theta)| over the grid
    double evenness_defect() const;
    /// max |v(+-T, theta)|
    double boundary_defect() const;

private:
    GridSpec spec_{0.0, 0, 0};
    std::vector<double> v_;
    bool dirichlet_ = false;
    bool even_t_ = false;
};

/// Real trigonometric transform along theta on the uniform periodic grid.
/// Coefficients: cosine c[j], j = 0..n/2; sine s[j], j = 1..n/2-1, such that
///   row_k = sum_j c[j] cos(j theta_k) + sum_j s[j] sin(j theta_k).
class ThetaTransform {
public:
    explicit ThetaTransform(int n);

    int n() const { return n_; }
    int jmax() const { return n_ / 2; }

    void forward(const double* row, std::vector<double>& c, std::vector<double>& s) const;
    void inverse(const std::vector<double>& c, const std::vector<double>& s,
                 double* row) const;

private:
    int n_;
    std::vector<double> cos_, sin_; // tables [j * n + k]
};

} // namespace delpmc
