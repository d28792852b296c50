#include "scqc/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scqc/errors.hpp"

namespace scqc {

namespace {

struct Interval {
    double a;
    double b;
    int depth;
};

bool tail_converged(const std::vector<double>& c, double tol) {
    const std::size_t n = c.size();
    const std::size_t k = std::min<std::size_t>(3, n);
    for (std::size_t i = n - k; i < n; ++i)
        if (!(std::abs(c[i]) <= tol)) return false;  // NaN never converges
    return true;
}

}  // namespace

double clenshaw(std::span<const double> coef, double x) {
    double b1 = 0.0;
    double b2 = 0.0;
    const double x2 = 2.0 * x;
    for (std::size_t k = coef.size(); k-- > 1;) {
        const double b0 = coef[k] + x2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return coef.empty() ? 0.0 : coef[0] + x * b1 - b2;
}

std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, double a,
                                           double b, int n) {
    std::vector<double> vals(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int j = 0; j < n; ++j) {
        const double x = std::cos(std::numbers::pi * (j + 0.5) / n);
        vals[j] = f(mid + half * x);
    }
    std::vector<double> c(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += vals[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
        c[k] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    return c;
}

PiecewiseChebyshev::PiecewiseChebyshev(std::vector<Panel> panels) : panels_(std::move(panels)) {}

PiecewiseChebyshev PiecewiseChebyshev::fit(const std::function<double(double)>& f, double a,
                                           double b, std::span<const double> breaks,
                                           const ChebFitOptions& opt) {
    if (!(b > a)) throw ValidationError("chebyshev fit: empty interval");

    std::vector<double> edges{a};
    std::vector<double> sorted(breaks.begin(), breaks.end());
    std::sort(sorted.begin(), sorted.end());
    const double min_gap = 1e-14 * (b - a);
    for (double x : sorted)
        if (x > edges.back() + min_gap && x < b - min_gap) edges.push_back(x);
    edges.push_back(b);

    // Global scale from a coarse sweep so near-zero stretches do not over-refine.
    double scale = 0.0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const int m = 16;
        for (int j = 0; j < m; ++j) {
            const double x = std::cos(std::numbers::pi * (j + 0.5) / m);
            const double v = f(0.5 * (edges[s] + edges[s + 1]) + 0.5 * (edges[s + 1] - edges[s]) * x);
            if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
        }
    }
    const double tol = std::max(opt.rel_tol * std::max(scale, 1e-300), opt.abs_floor);
    const double min_width = opt.min_width_frac * (b - a);

    std::vector<Panel> out;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        std::vector<Interval> stack{{edges[s], edges[s + 1], 0}};
        std::vector<Panel> seg;
        while (!stack.empty()) {
            Interval iv = stack.back();
            stack.pop_back();
            auto c = chebyshev_coefficients(f, iv.a, iv.b, opt.degree);
            // Narrow peaks the coarse sweep missed are judged against their own size,
            // otherwise round-off in f keeps them splitting forever.
            double local = 0.0;
            for (double v : c) local += std::abs(v);
            const bool ok = tail_converged(c, std::max(tol, opt.rel_tol * local));
            if (!ok && static_cast<int>(out.size() + seg.size() + stack.size()) >= opt.max_panels)
                throw NumericalError("chebyshev fit: panel budget exhausted near t = " +
                                     std::to_string(0.5 * (iv.a + iv.b)));
            if (ok || (iv.b - iv.a) < 2.0 * min_width) {
                for (double v : c)
                    if (!std::isfinite(v))
                        throw NumericalError("chebyshev fit: non-finite samples near t = " +
                                             std::to_string(0.5 * (iv.a + iv.b)));
                seg.push_back({iv.a, iv.b, std::move(c)});
                continue;
            }
            const double m = 0.5 * (iv.a + iv.b);
            // Push right first so the left half is processed next.
            stack.push_back({m, iv.b, iv.depth + 1});
            stack.push_back({iv.a, m, iv.depth + 1});
        }
        std::sort(seg.begin(), seg.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
        for (auto& p : seg) out.push_back(std::move(p));
    }
    return PiecewiseChebyshev(std::move(out));
}

std::size_t PiecewiseChebyshev::locate(double t) const {
    // First panel whose right edge is beyond t; the last panel catches t >= upper.
    auto it = std::upper_bound(panels_.begin(), panels_.end(), t,
                               [](double v, const Panel& p) { return v < p.b; });
    if (it == panels_.end()) return panels_.size() - 1;
    return static_cast<std::size_t>(it - panels_.begin());
}

double PiecewiseChebyshev::eval_panel(std::size_t i, double t) const {
    const Panel& p = panels_[i];
    const double x = std::clamp((2.0 * t - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
    return clenshaw(p.coef, x);
}

double PiecewiseChebyshev::operator()(double t) const { return eval_panel(locate(t), t); }

double PiecewiseChebyshev::left_limit(double t) const {
    auto it = std::lower_bound(panels_.begin(), panels_.end(), t,
                               [](const Panel& p, double v) { return p.b < v; });
    const std::size_t i = it == panels_.end() ? panels_.size() - 1
                                              : static_cast<std::size_t>(it - panels_.begin());
    return eval_panel(i, t);
}

double PiecewiseChebyshev::derivative(double t) const {
    const Panel& p = panels_[locate(t)];
    const std::size_t n = p.coef.size();
    if (n < 2) return 0.0;
    // Derivative coefficients via the standard backward recurrence.
    std::vector<double> d(n, 0.0);
    for (std::size_t k = n - 1; k-- > 0;) {
        d[k] = (k + 2 < n ? d[k + 2] : 0.0) + 2.0 * static_cast<double>(k + 1) * p.coef[k + 1];
    }
    d[0] *= 0.5;
    const double x = std::clamp((2.0 * t - p.a - p.b) / (p.b - p.a), -1.0, 1.0);
    return clenshaw(d, x) * 2.0 / (p.b - p.a);
}

PiecewiseChebyshev PiecewiseChebyshev::integral(double c0) const {
    std::vector<Panel> out;
    out.reserve(panels_.size());
    double running = c0;
    for (const Panel& p : panels_) {
        const std::size_t n = p.coef.size();
        const double half = 0.5 * (p.b - p.a);
        auto a = [&](std::size_t k) { return k < n ? p.coef[k] : 0.0; };
        std::vector<double> A(n + 1, 0.0);
        A[1] = (a(0) - 0.5 * a(2)) * half;
        for (std::size_t k = 2; k <= n; ++k)
            A[k] = (a(k - 1) - a(k + 1)) / (2.0 * static_cast<double>(k)) * half;
        // Fix the constant so the antiderivative equals `running` at x = -1.
        double at_left = 0.0;
        for (std::size_t k = 1; k <= n; ++k) at_left += (k % 2 == 0 ? 1.0 : -1.0) * A[k];
        A[0] = running - at_left;
        double at_right = 0.0;
        for (std::size_t k = 0; k <= n; ++k) at_right += A[k];
        running = at_right;
        out.push_back({p.a, p.b, std::move(A)});
    }
    return PiecewiseChebyshev(std::move(out));
}

std::vector<double> PiecewiseChebyshev::knots() const {
    std::vector<double> k;
    k.reserve(panels_.size() + 1);
    for (const Panel& p : panels_) k.push_back(p.a);
    if (!panels_.empty()) k.push_back(panels_.back().b);
    return k;
}

PiecewiseChebyshev inverse_function(const PiecewiseChebyshev& forward,
                                    std::span<const double> breaks, const ChebFitOptions& opt) {
    const std::vector<double> knots = forward.knots();
    std::vector<double> knot_values;
    knot_values.reserve(knots.size());
    for (double k : knots) knot_values.push_back(forward(k));

    auto invert = [&](double y) {
        auto it = std::upper_bound(knot_values.begin(), knot_values.end(), y);
        std::size_t i = it == knot_values.begin() ? 0 : static_cast<std::size_t>(it - knot_values.begin()) - 1;
        i = std::min(i, knots.size() - 2);
        double lo = knots[i];
        double hi = knots[i + 1];
        const double dy = knot_values[i + 1] - knot_values[i];
        double x = dy > 0.0 ? lo + (hi - lo) * std::clamp((y - knot_values[i]) / dy, 0.0, 1.0)
                            : 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            const double f = forward(x) - y;
            if (f == 0.0) return x;
            if (f > 0.0)
                hi = x;
            else
                lo = x;
            const double d = forward.derivative(x);
            double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)) || hi - lo <= 0.0) return next;
            x = next;
        }
        return x;
    };
    return PiecewiseChebyshev::fit(invert, knot_values.front(), knot_values.back(), breaks, opt);
}

}  // namespace scqc
