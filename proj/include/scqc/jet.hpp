#pragma once

// Truncated Taylor arithmetic. A Jet<N> stores the normalized Taylor
// coefficients c[k] = f^(k)(x0) / k! of a function around a point, so that
// evaluating an expression on Jet inputs yields exact derivatives up to
// order N (forward-mode automatic differentiation).

#include <array>
#include <cmath>
#include <cstddef>

namespace scqc {

template <std::size_t N>
struct Jet {
    std::array<double, N + 1> c{};

    Jet() = default;
    Jet(double v) { c[0] = v; }  // NOLINT: implicit on purpose, constants mix freely

    /// Independent variable x0 + (x - x0).
    static Jet variable(double x0) {
        Jet j(x0);
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }

    /// k-th derivative, k <= N.
    double derivative(std::size_t k) const {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
        return c[k] * f;
    }

    Jet operator-() const {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k) r.c[k] = -c[k];
        return r;
    }
    Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k <= N; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (std::size_t k = 0; k <= N; ++k) c[k] -= o.c[k];
        return *this;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }
    Jet& operator/=(const Jet& o) { return *this = *this / o; }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
            r.c[k] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet q;
        for (std::size_t k = 0; k <= N; ++k) {
            double s = a.c[k];
            for (std::size_t j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
            q.c[k] = s / b.c[0];
        }
        return q;
    }
};

namespace detail {

// Simultaneous sine/cosine recurrence: k s_k = sum j x_j c_{k-j}, k c_k = -sum j x_j s_{k-j}.
template <std::size_t N>
void sincos(const Jet<N>& x, Jet<N>& s, Jet<N>& co) {
    s.c[0] = std::sin(x.c[0]);
    co.c[0] = std::cos(x.c[0]);
    for (std::size_t k = 1; k <= N; ++k) {
        double ss = 0.0;
        double cc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            const double jx = static_cast<double>(j) * x.c[j];
            ss += jx * co.c[k - j];
            cc -= jx * s.c[k - j];
        }
        s.c[k] = ss / static_cast<double>(k);
        co.c[k] = cc / static_cast<double>(k);
    }
}

}  // namespace detail

template <std::size_t N>
Jet<N> sin(const Jet<N>& x) {
    Jet<N> s, c;
    detail::sincos(x, s, c);
    return s;
}

template <std::size_t N>
Jet<N> cos(const Jet<N>& x) {
    Jet<N> s, c;
    detail::sincos(x, s, c);
    return c;
}

template <std::size_t N>
Jet<N> sqrt(const Jet<N>& a) {
    Jet<N> r;
    r.c[0] = std::sqrt(a.c[0]);
    for (std::size_t k = 1; k <= N; ++k) {
        double s = a.c[k];
        for (std::size_t j = 1; j < k; ++j) s -= r.c[j] * r.c[k - j];
        r.c[k] = s / (2.0 * r.c[0]);
    }
    return r;
}

template <std::size_t N>
Jet<N> exp(const Jet<N>& x) {
    Jet<N> r;
    r.c[0] = std::exp(x.c[0]);
    for (std::size_t k = 1; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * x.c[j] * r.c[k - j];
        r.c[k] = s / static_cast<double>(k);
    }
    return r;
}

template <std::size_t N>
Jet<N> log(const Jet<N>& a) {
    Jet<N> r;
    r.c[0] = std::log(a.c[0]);
    for (std::size_t k = 1; k <= N; ++k) {
        double s = a.c[k];
        for (std::size_t j = 1; j < k; ++j)
            s -= static_cast<double>(j) / static_cast<double>(k) * r.c[j] * a.c[k - j];
        r.c[k] = s / a.c[0];
    }
    return r;
}

/// x^p. Integer exponents use repeated multiplication so negative bases work.
template <std::size_t N>
Jet<N> pow(const Jet<N>& x, double p) {
    const double ip = std::round(p);
    if (ip == p && std::abs(ip) <= 64.0) {
        auto n = static_cast<long>(std::abs(ip));
        Jet<N> base = x;
        Jet<N> acc(1.0);
        while (n > 0) {
            if (n & 1) acc = acc * base;
            base = base * base;
            n >>= 1;
        }
        return ip < 0 ? Jet<N>(1.0) / acc : acc;
    }
    return exp(log(x) * Jet<N>(p));
}

using Jet3 = Jet<3>;

}  // namespace scqc
