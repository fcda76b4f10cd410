#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace dhj {

/// Outcome of an adaptive integration driven by integrate_dopri5.
enum class RkTermination { ReachedEnd, ObserverStop, StepUnderflow };

struct Rk45Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.5;
    double initial_step = 0.0; // <= 0 means auto
};

/// One accepted step of the embedded Dormand-Prince 5(4) pair together with a
/// cubic Hermite dense output on [t0, t1].
template <std::size_t N>
struct RkStep {
    double t0 = 0.0, t1 = 0.0;
    std::array<double, N> y0{}, y1{}, f0{}, f1{};

    std::array<double, N> eval(double t) const {
        const double h = t1 - t0;
        const double s = (t - t0) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
        }
        return out;
    }
};

/// Adaptive Dormand-Prince 5(4) with FSAL. Rhs: (t, y) -> dy/dt.
/// Observer is called once per accepted step with the RkStep and returns
/// false to stop early.
template <std::size_t N, typename Rhs, typename Observer>
RkTermination integrate_dopri5(Rhs&& rhs, double t0, std::array<double, N> y0, double t_end,
                               const Rk45Options& opt, Observer&& observer) {
    using State = std::array<double, N>;

    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b_hat, error coefficients of the embedded 4th order solution
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    double t = t0;
    State y = y0;
    State f = rhs(t, y);

    double h = opt.initial_step > 0 ? opt.initial_step
                                    : std::min(opt.max_step, 1e-3 * std::max(1.0, t_end - t0));
    h = std::min(h, t_end - t0);

    auto scaled_err_norm = [&](const State& err, const State& ya, const State& yb) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            const double q = err[i] / sc;
            acc += q * q;
        }
        return std::sqrt(acc / N);
    };

    while (t < t_end) {
        if (t + h >= t_end) h = t_end - t;
        if (h < 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
            return RkTermination::StepUnderflow;
        }

        State k1 = f, k2, k3, k4, k5, k6, k7, y_new, err;
        State tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(t + c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(t + h, y_new);
        for (std::size_t i = 0; i < N; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

        const double err_norm = scaled_err_norm(err, y, y_new);
        if (!std::isfinite(err_norm)) {
            // trial stages overflowed (steep blow-up); shrink hard
            h *= 0.2;
            continue;
        }
        if (err_norm > 1.0) {
            // reject; keep the step-size controller's bounds
            double factor = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
            h *= std::clamp(factor, 0.2, 1.0);
            continue;
        }

        RkStep<N> step;
        step.t0 = t;
        step.t1 = t + h;
        step.y0 = y;
        step.y1 = y_new;
        step.f0 = f;
        step.f1 = k7;

        t += h;
        y = y_new;
        f = k7; // FSAL

        if (!observer(step)) return RkTermination::ObserverStop;

        double factor = err_norm > 0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        h = std::min(h, opt.max_step);
    }
    return RkTermination::ReachedEnd;
}

} // namespace dhj
