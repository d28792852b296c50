#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature for scalar or vector-valued
// integrands. Intervals are split at caller-supplied breakpoints first.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "scqc/errors.hpp"

namespace scqc {

namespace detail {

inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
template <class V>
double magnitude(const V& v) {
    return v.norm();
}

template <class V>
V zero_like(const V& v) {
    if constexpr (std::is_arithmetic_v<V>) {
        return 0.0;
    } else {
        return V::Zero(v.rows(), v.cols());
    }
}

template <class F, class V>
void gk15(const F& f, double a, double b, V& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const V fc = f(c);
    V k = fc * kKronrodW[7];
    V g = fc * kGaussW[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kKronrodX[j];
        const V f1 = f(c - dx);
        const V f2 = f(c + dx);
        const V s = f1 + f2;
        k = k + s * kKronrodW[j];
        if (j % 2 == 1) g = g + s * kGaussW[j / 2];
    }
    result = k * h;
    err = magnitude(V((k - g) * h));
}

}  // namespace detail

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-13;
    int max_intervals = 20000;
};

/// Integral of f over [a, b]; `breaks` mark interior points where f is not smooth.
template <class F>
auto integrate(const F& f, double a, double b, std::span<const double> breaks = {},
               const QuadratureOptions& opt = {}) {
    using V = std::decay_t<decltype(f(a))>;
    struct Piece {
        double a, b;
        V val;
        double err;
    };
    std::vector<double> edges{a};
    std::vector<double> sorted(breaks.begin(), breaks.end());
    std::sort(sorted.begin(), sorted.end());
    for (double x : sorted)
        if (x > edges.back() && x < b) edges.push_back(x);
    edges.push_back(b);

    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Piece p{edges[i], edges[i + 1], {}, 0.0};
        detail::gk15(f, p.a, p.b, p.val, p.err);
        pieces.push_back(p);
    }
    auto total = [&]() {
        V s = detail::zero_like(pieces.front().val);
        double e = 0.0;
        for (const auto& p : pieces) {
            s = s + p.val;
            e += p.err;
        }
        return std::pair<V, double>{s, e};
    };
    while (true) {
        auto [s, e] = total();
        const double target = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(s));
        if (e <= target) return s;
        if (static_cast<int>(pieces.size()) >= opt.max_intervals) return s;
        auto worst = std::max_element(pieces.begin(), pieces.end(),
                                      [](const Piece& x, const Piece& y) { return x.err < y.err; });
        const double m = 0.5 * (worst->a + worst->b);
        if (!(m > worst->a && m < worst->b)) return s;  // interval exhausted at double precision
        Piece left{worst->a, m, {}, 0.0};
        Piece right{m, worst->b, {}, 0.0};
        detail::gk15(f, left.a, left.b, left.val, left.err);
        detail::gk15(f, right.a, right.b, right.val, right.err);
        *worst = left;
        pieces.push_back(right);
    }
}

}  // namespace scqc
