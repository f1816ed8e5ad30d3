#include "delpmc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "delpmc/errors.hpp"

namespace delpmc {

double brent(const std::function<double(double)>& f, double a, double b,
             double xtol, double ftol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw NumericalError("brent: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = b - a; e = d; }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if ((std::abs(xm) <= tol1 && std::abs(fb) <= ftol) || fb == 0.0)
            return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic / secant
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

namespace {

// 16-point Gauss-Legendre abscissas/weights on [-1, 1] (positive half).
constexpr double kGL16X[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGL16W[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

} // namespace

double gauss16(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i)
        s += kGL16W[i] * (f(mid + hl * kGL16X[i]) + f(mid - hl * kGL16X[i]));
    return s * hl;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_level) {
    double prev = gauss16(f, a, b);
    int n = 2;
    for (int level = 0; level < max_level; ++level, n *= 2) {
        double cur = 0.0;
        const double h = (b - a) / n;
        for (int i = 0; i < n; ++i) cur += gauss16(f, a + i * h, a + (i + 1) * h);
        if (std::abs(cur - prev) < tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

const QuadRule& gauss_rule(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    QuadRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    // Newton iteration on Legendre P_n, cosine initial guesses.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1; p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    auto [pos, ok] = cache.emplace(n, std::move(rule));
    return pos->second;
}

double integrate_samples(std::span<const double> f, double h) {
    const int n = static_cast<int>(f.size()) - 1; // intervals
    if (n < 3) throw DomainError("integrate_samples: need at least 4 samples");
    double s = 0.0;
    int m = n;
    if (n % 2 != 0) m = n - 3; // leave a 3/8 block at the end
    for (int i = 0; i + 2 <= m; i += 2)
        s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    if (n % 2 != 0)
        s += 3.0 * h / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
    return s;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h) {
    const int n = static_cast<int>(f.size()) - 1;
    if (n < 3) throw DomainError("cumulative_integral: need at least 4 samples");
    std::vector<double> out(f.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double inc;
        if (i == 0) {
            inc = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        } else if (i == n - 1) {
            inc = h / 24.0 * (9.0 * f[n] + 19.0 * f[n - 1] - 5.0 * f[n - 2] + f[n - 3]);
        } else {
            inc = h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
        }
        out[i + 1] = out[i] + inc;
    }
    return out;
}

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    if (n <= m) throw DomainError("fd_weights: need more than m nodes");
    std::vector<std::vector<double>> C(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    C[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C[i][k] = c1 * (k * C[i - 1][k - 1] - c5 * C[i - 1][k]) / c2;
                C[i][0] = -c1 * c5 * C[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                C[j][k] = (c4 * C[j][k] - k * C[j][k - 1]) / c3;
            C[j][0] = c4 * C[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = C[i][m];
    return out;
}

double window_interp(std::span<const double> f, double t0, double h, double t) {
    const int n = static_cast<int>(f.size());
    constexpr int W = 9;
    if (n < W) throw DomainError("window_interp: need at least 9 samples");
    // barycentric weights for 9 equispaced nodes: (-1)^k C(8,k)
    static const double bw[W] = {1, -8, 28, -56, 70, -56, 28, -8, 1};

    int c = static_cast<int>(std::lround((t - t0) / h));
    int lo = std::clamp(c - W / 2, 0, n - W);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < W; ++k) {
        const double tk = t0 + (lo + k) * h;
        const double d = t - tk;
        if (std::abs(d) < 1e-14 * std::max(1.0, std::abs(t))) return f[lo + k];
        const double q = bw[k] / d;
        num += q * f[lo + k];
        den += q;
    }
    return num / den;
}

} // namespace delpmc
