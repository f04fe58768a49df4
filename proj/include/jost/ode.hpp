#pragma once

#include "jost/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

namespace jost::ode {

using Vector = Eigen::VectorXcd;

struct Settings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_steps = 200000;
    double initial_step = 1e-2;
    double max_step = 1.0;
    /// Any |y_i| above this aborts the integration with DivergenceError.
    double overflow_guard = 1e100;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
};

/// Dormand-Prince 5(4) with PI step-size control (Hairer & Wanner's DOPRI5 constants).
/// Integrates dy/ds = f(s, y) from s0 to s1 > s0; `f(s, y, dy)` writes into dy.
template <class Rhs>
Vector integrate_dopri5(Rhs&& f, double s0, double s1, Vector y, const Settings& cfg, Stats* stats = nullptr) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2, fac_max = 10.0;

    if (!(s1 > s0)) throw InvalidArgument("integration interval must have positive length");
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) throw InvalidArgument("tolerances must be positive");

    const auto n = y.size();
    Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    Stats local;
    Stats& st = stats ? *stats : local;

    double s = s0;
    double h = std::min({cfg.initial_step, cfg.max_step, s1 - s0});
    double fac_old = 1e-4;
    bool reject = false;

    f(s, y, k1);
    ++st.evaluations;

    for (std::size_t step = 0;; ++step) {
        if (step >= cfg.max_steps) throw IntegrationError("maximum number of integration steps exceeded");
        const double remaining = s1 - s;
        const bool last = h >= remaining * (1.0 - 1e-12);
        if (last) h = remaining;
        if (!last && h < 1e-14 * std::max(1.0, std::abs(s)))
            throw IntegrationError("integration step size underflow at s = " + std::to_string(s));

        ytmp = y + h * a21 * k1;
        f(s + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        f(s + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(s + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(s + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(s + h, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        f(s + h, ynew, k7);
        st.evaluations += 6;

        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double q = std::abs(err[i]) / sk;
            sum += q * q;
        }
        const double e = std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(n, 1)));
        if (!std::isfinite(e)) throw DivergenceError("non-finite values during integration");

        const double fac11 = std::pow(e, expo1);
        double fac = fac11 / std::pow(fac_old, beta);
        fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
        double h_new = h / fac;

        if (e <= 1.0) {
            fac_old = std::max(e, 1e-4);
            ++st.accepted;
            s = last ? s1 : s + h;
            y.swap(ynew);
            k1.swap(k7);
            if (y.cwiseAbs().maxCoeff() > cfg.overflow_guard)
                throw DivergenceError("solution exceeded the overflow guard (outside the convergence domain)");
            if (last) return y;
            h_new = std::min(h_new, cfg.max_step);
            if (reject) h_new = std::min(h_new, h);
            reject = false;
        } else {
            h_new = h / std::min(1.0 / fac_min, fac11 / safe);
            reject = true;
            ++st.rejected;
        }
        h = h_new;
    }
}

}  // namespace jost::ode
