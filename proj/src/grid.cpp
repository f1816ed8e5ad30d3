#include "delpmc/grid.hpp"

#include <cmath>
#include <numbers>

#include "delpmc/errors.hpp"

namespace delpmc {

namespace {
constexpr double kPi = std::numbers::pi;
}

double GridSpec::t(int i) const { return -T + 2.0 * T * i / nt; }
double GridSpec::theta(int k) const { return -kPi + 2.0 * kPi * k / ntheta; }

GridFunction::GridFunction(GridSpec spec, bool dirichlet, bool even_t)
    : spec_(spec), v_(static_cast<size_t>(spec.nt + 1) * spec.ntheta, 0.0),
      dirichlet_(dirichlet), even_t_(even_t) {
    if (spec.nt < 2 || spec.ntheta < 2 || !(spec.T > 0.0))
        throw DomainError("GridFunction: invalid grid spec");
}

GridFunction GridFunction::sample(GridSpec spec,
                                  const std::function<double(double, double)>& f,
                                  bool dirichlet, bool even_t) {
    GridFunction g(spec, dirichlet, even_t);
    for (int i = 0; i <= spec.nt; ++i)
        for (int k = 0; k < spec.ntheta; ++k)
            g.at(i, k) = f(spec.t(i), spec.theta(k));
    return g;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

double GridFunction::evenness_defect() const {
    double d = 0.0;
    for (int i = 0; i <= spec_.nt; ++i)
        for (int k = 0; k < spec_.ntheta; ++k)
            d = std::max(d, std::abs(at(i, k) - at(spec_.nt - i, k)));
    return d;
}

double GridFunction::boundary_defect() const {
    double d = 0.0;
    for (int k = 0; k < spec_.ntheta; ++k)
        d = std::max({d, std::abs(at(0, k)), std::abs(at(spec_.nt, k))});
    return d;
}

ThetaTransform::ThetaTransform(int n) : n_(n) {
    if (n < 4 || n % 2 != 0)
        throw DomainError("ThetaTransform: n_theta must be even and >= 4");
    const int jm = n / 2;
    cos_.resize(static_cast<size_t>(jm + 1) * n);
    sin_.resize(static_cast<size_t>(jm + 1) * n);
    for (int j = 0; j <= jm; ++j)
        for (int k = 0; k < n; ++k) {
            const double th = -kPi + 2.0 * kPi * k / n;
            cos_[j * n + k] = std::cos(j * th);
            sin_[j * n + k] = std::sin(j * th);
        }
}

void ThetaTransform::forward(const double* row, std::vector<double>& c,
                             std::vector<double>& s) const {
    const int jm = n_ / 2;
    c.assign(jm + 1, 0.0);
    s.assign(jm + 1, 0.0);
    for (int j = 0; j <= jm; ++j) {
        double cc = 0.0, ss = 0.0;
        const double* ct = &cos_[j * n_];
        const double* st = &sin_[j * n_];
        for (int k = 0; k < n_; ++k) {
            cc += row[k] * ct[k];
            ss += row[k] * st[k];
        }
        const double w = (j == 0 || j == jm) ? 1.0 / n_ : 2.0 / n_;
        c[j] = w * cc;
        s[j] = (j == 0 || j == jm) ? 0.0 : w * ss;
    }
}

void ThetaTransform::inverse(const std::vector<double>& c, const std::vector<double>& s,
                             double* row) const {
    const int jm = n_ / 2;
    for (int k = 0; k < n_; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= jm; ++j)
            acc += c[j] * cos_[j * n_ + k] + s[j] * sin_[j * n_ + k];
        row[k] = acc;
    }
}

} // namespace delpmc
