#include <cmath>
#include <numbers>

#include "scqc/errors.hpp"
#include "scqc/families/families.hpp"

namespace scqc {

namespace {

constexpr double kPi = std::numbers::pi;

// sum_k (-x^2/4)^k / (k! (k+nu)!), times (x/2)^nu, nu in {0, 1}.
double series(double x, int nu) {
    const long double y = -0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L;
    long double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= y / (static_cast<long double>(k) * (k + nu));
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum) && k > x) break;
    }
    return static_cast<double>(nu == 1 ? sum * 0.5L * x : sum);
}

// Hankel asymptotic expansion, summed until the terms stop shrinking.
double asymptotic(double x, int nu) {
    const double mu = 4.0 * nu * nu;
    double p = 0.0, q = 0.0;
    double a = 1.0;  // a_k / x^k
    double last = 1e300;
    for (int k = 0; k < 200; ++k) {
        if (std::abs(a) >= last) break;
        last = std::abs(a);
        // term k contributes (-1)^{k/2} a to P (k even) or (-1)^{(k-1)/2} a to Q (k odd)
        if (k % 2 == 0)
            p += ((k / 2) % 2 == 0 ? a : -a);
        else
            q += (((k - 1) / 2) % 2 == 0 ? a : -a);
        if (std::abs(a) < 1e-17 * std::abs(p)) break;
        const double m = 2.0 * k + 1.0;
        a *= (mu - m * m) / ((k + 1.0) * 8.0 * x);
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
    x = std::abs(x);
    return x < 20.0 ? series(x, 0) : asymptotic(x, 0);
}

double bessel_j1(double x) {
    const double s = x < 0 ? -1.0 : 1.0;
    x = std::abs(x);
    return s * (x < 20.0 ? series(x, 1) : asymptotic(x, 1));
}

std::vector<double> bessel_zeros(int n) {
    if (n < 1) throw ValidationError("bessel_zeros: need n >= 1");
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) {
        const double beta = (k - 0.25) * kPi;
        const double b8 = 8.0 * beta;
        double x = beta + 1.0 / b8 - 124.0 / (3.0 * b8 * b8 * b8);
        for (int it = 0; it < 50; ++it) {
            const double dx = bessel_j0(x) / bessel_j1(x);  // J0' = -J1
            x += dx;
            if (std::abs(dx) < 1e-15 * x) break;
        }
        out.push_back(x);
    }
    return out;
}

double BesselParams::theta(double t) const { return x * std::cos(2.0 * kPi * t / duration); }

BesselParams bessel_params(int index, double duration, QRule rule) {
    if (index < 2)
        throw ValidationError("bessel: root index " + std::to_string(index) +
                              " has no lower neighbour; need i >= 2");
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw ValidationError("bessel: duration must be positive and finite");
    const auto z = bessel_zeros(index + 1);
    BesselParams p;
    p.index = index;
    p.duration = duration;
    p.rule = rule;
    p.x = z[index - 1];
    p.q = (z[index] - z[index - 2]) / (2.0 * p.x);
    if (rule == QRule::ExactClosure) {
        auto g = [&](double q) { return bessel_j0((1.0 - q) * p.x) - bessel_j0((1.0 + q) * p.x); };
        double lo = p.q - 0.02, hi = p.q + 0.02;
        if (g(lo) * g(hi) > 0.0)
            throw NumericalError("bessel: no exact-closure q bracketed near the central-difference value");
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
        }
        p.q = 0.5 * (lo + hi);
    }
    return p;
}

Vec3 bessel_closure(const BesselParams& p) {
    return {0.0, 0.5 * p.duration * (bessel_j0((1.0 - p.q) * p.x) - bessel_j0((1.0 + p.q) * p.x)),
            p.duration * bessel_j0(p.x)};
}

Family bessel_family(int index, double duration, QRule rule) {
    const BesselParams p = bessel_params(index, duration, rule);
    const std::string th =
        "(" + exact_number(p.x) + "*cos(" + exact_number(2.0 * kPi / duration) + "*t))";
    const std::string q = exact_number(p.q);
    VelocityExprPiece piece{0.0, duration,
                            {"cos(" + q + "*" + th + ")*sin(" + th + ")",
                             "sin(" + q + "*" + th + ")*sin(" + th + ")", "cos(" + th + ")"}};
    const nlohmann::json spec = tangent_spec({piece});
    Family f{.name = "bessel", .curve = curve_from_spec(spec), .spec = spec, .params = nlohmann::json::object()};
    f.params = {{"index", p.index},
                {"x_i", p.x},
                {"q", p.q},
                {"q_rule", rule == QRule::CentralDifference ? "central_difference" : "exact_closure"},
                {"duration", duration},
                {"closure_residual", [&] {
                     const Vec3 c = bessel_closure(p);
                     return std::vector<double>{c.x(), c.y(), c.z()};
                 }()}};
    f.spec["family"] = "bessel";
    f.spec["params"] = f.params;
    return f;
}

}  // namespace scqc
