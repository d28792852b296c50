#include "scqc/ode.hpp"

#include <cmath>
#include <limits>

namespace scqc {

namespace {

double error_norm(const Mat2& err, const Mat2& y0, const Mat2& y1, const Rk45Options& opt) {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
            const double e = std::abs(err(i, j)) / scale;
            // NaN from a blown-up stage must force a rejection.
            if (!std::isfinite(e) || !std::isfinite(std::abs(y1(i, j))))
                return std::numeric_limits<double>::infinity();
            worst = std::max(worst, e);
        }
    return worst;
}

}  // namespace

Mat2 dormand_prince(const std::function<Mat2(double, const Mat2&)>& f, double t0, double t1,
                    Mat2 y, const Rk45Options& opt, Rk45Stats* stats) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const double span = t1 - t0;
    if (span == 0.0) return y;
    if (!(span > 0.0)) throw ValidationError("dormand_prince: t1 < t0");

    // Spans at rounding level (coincident panel edges) get one uncontrolled step.
    const bool tiny = span < 1e-12 * std::max(1.0, std::abs(t0));
    double h = tiny ? span : opt.initial_step > 0.0 ? opt.initial_step : span / 64.0;
    double t = t0;
    Mat2 k1 = f(t, y);
    long steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) {
            std::ostringstream os;
            os << "integrator exceeded " << opt.max_steps << " steps at t = " << t;
            throw NumericalError(os.str());
        }
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        const Mat2 k2 = f(t + h / 5.0, y + h * (a21 * k1));
        const Mat2 k3 = f(t + 3.0 * h / 10.0, y + h * (a31 * k1 + a32 * k2));
        const Mat2 k4 = f(t + 4.0 * h / 5.0, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Mat2 k5 =
            f(t + 8.0 * h / 9.0, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Mat2 k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Mat2 ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Mat2 k7 = f(t + h, ynew);
        const Mat2 err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        // Non-finite stages count as an infinite error: the step shrinks until
        // it either recovers or underflows at the offending time.
        const double en = error_norm(err, y, ynew, opt);
        if (en <= 1.0 || (tiny && std::isfinite(en))) {
            t = last ? t1 : t + h;
            y = ynew;
            k1 = k7;
            if (stats) ++stats->accepted;
        } else if (stats) {
            ++stats->rejected;
        }
        const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        h *= en <= 1.0 ? factor : std::min(factor, 1.0);
        if (t < t1 && h < 1e-14 * std::max(std::abs(t), span)) {
            std::ostringstream os;
            os.precision(17);
            os << "step size underflow at t = " << t;
            throw NumericalError(os.str());
        }
    }
    return y;
}

Mat2 cf4_step(const std::function<Mat2(double)>& hamiltonian, double t, double h, const Mat2& u) {
    static const double r3 = std::sqrt(3.0);
    const double c1 = 0.5 - r3 / 6.0;
    const double c2 = 0.5 + r3 / 6.0;
    const double heavy = 0.25 + r3 / 6.0;
    const double light = 0.25 - r3 / 6.0;
    const Mat2 h1 = hamiltonian(t + c1 * h);
    const Mat2 h2 = hamiltonian(t + c2 * h);
    const Mat2 first = expm_hermitian(h * (heavy * h1 + light * h2));
    const Mat2 second = expm_hermitian(h * (light * h1 + heavy * h2));
    return second * (first * u);
}

Mat2 cf4_propagate(const std::function<Mat2(double)>& hamiltonian, double t0, double t1,
                   const Mat2& u0, int steps) {
    if (steps < 1) throw ValidationError("cf4_propagate: steps must be positive");
    Mat2 u = u0;
    const double h = (t1 - t0) / steps;
    for (int k = 0; k < steps; ++k) u = cf4_step(hamiltonian, t0 + k * h, h, u);
    return u;
}

}  // namespace scqc
