#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "delpmc/errors.hpp"

namespace delpmc {

/// Dense trajectory of an adaptive integration: states and derivatives at
/// every accepted step, ascending in t.
template <int N>
struct OdeTrajectory {
    std::vector<double> t;
    std::vector<std::array<double, N>> y;
    std::vector<std::array<double, N>> dy;
};

/// Dormand-Prince 5(4) with PI step control. f(t, y) -> dy/dt.
/// Integrates from t0 to t1 (t1 > t0), local tolerance tol (abs+rel),
/// optional max step. Records every accepted node when trajectory != nullptr.
/// Throws IntegrationError on step-size underflow.
template <int N, class F>
std::array<double, N> dopri5(F&& f, double t0, std::array<double, N> y0, double t1,
                             double tol, double max_step = 0.0,
                             OdeTrajectory<N>* trajectory = nullptr) {
    using State = std::array<double, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (t1 <= t0) throw DomainError("dopri5: t1 must exceed t0");
    const double span = t1 - t0;
    double h = std::min(span, max_step > 0 ? max_step : span / 16.0);
    h = std::min(h, 0.1 * span + 1e-30);

    double t = t0;
    State y = y0;
    State k1 = f(t, y);
    if (trajectory) {
        trajectory->t.push_back(t);
        trajectory->y.push_back(y);
        trajectory->dy.push_back(k1);
    }

    const double hmin_floor = 1e-14 * std::max(1.0, std::abs(t1));
    double err_prev = 1.0;
    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        State yt, k2, k3, k4, k5, k6, k7;
        for (int i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = f(t + c2 * h, yt);
        for (int i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * h, yt);
        for (int i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * h, yt);
        for (int i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * h, yt);
        for (int i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                a64 * k4[i] + a65 * k5[i]);
        k6 = f(t + h, yt);
        State y5;
        for (int i = 0; i < N; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                b6 * k6[i]);
        k7 = f(t + h, y5);

        double err = 0.0;
        for (int i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(ei) / sc);
        }

        if (err <= 1.0) {
            t += h;
            y = y5;
            k1 = k7; // FSAL
            if (trajectory) {
                trajectory->t.push_back(t);
                trajectory->y.push_back(y);
                trajectory->dy.push_back(k1);
            }
            // PI controller
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                         std::pow(err_prev, 0.4 / 5.0);
            err_prev = std::max(err, 1e-10);
            h *= std::clamp(fac, 0.2, 5.0);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
        if (max_step > 0) h = std::min(h, max_step);
        if (h < hmin_floor)
            throw IntegrationError("dopri5: step size underflow at t=" + std::to_string(t));
    }
    return y;
}

} // namespace delpmc
