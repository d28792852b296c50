#include <algorithm>
#include <cmath>
#include <sstream>

#include "scqc/errors.hpp"
#include "scqc/sim/sim.hpp"

namespace scqc {

namespace {

// [0, T] split at the field discontinuities.
std::vector<double> segment_edges(const ControlFields& fields) {
    std::vector<double> e{0.0};
    for (double x : fields.discontinuities()) e.push_back(x);
    e.push_back(fields.duration());
    return e;
}

Mat2 advance(const ControlFields& fields, const NoiseSample& noise, double t0, double t1,
             const Mat2& u, const Rk45Options& rk) {
    auto rhs = [&](double t, const Mat2& y) -> Mat2 {
        const Side side = t >= t1 ? Side::Left : Side::Right;
        return cplx(0.0, -1.0) * (fields.hamiltonian(t, noise, side) * y);
    };
    return dormand_prince(rhs, t0, t1, u, rk);
}

void check_unitary(const Mat2& u, const char* what) {
    if (!(unitarity_defect(u) <= 1e-6)) {
        std::ostringstream os;
        os << what << " is not unitary (defect " << unitarity_defect(u) << ")";
        throw ValidationError(os.str());
    }
}

}  // namespace

Propagator propagate(const ControlFields& fields, const NoiseSample& noise,
                     const PropagateOptions& opt) {
    if (!std::isfinite(noise.epsilon) || !std::isfinite(noise.delta_z))
        throw ValidationError("propagate: noise must be finite");
    const auto edges = segment_edges(fields);
    Mat2 u = Mat2::Identity();
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        u = advance(fields, noise, edges[k], edges[k + 1], u, opt.rk);
    if (opt.polish) u = polar_unitary(u);
    return {u, fields.duration()};
}

Propagator propagate_oracle(const ControlFields& fields, const NoiseSample& noise, int substeps) {
    std::vector<double> edges{0.0};
    for (double x : fields.knots()) edges.push_back(x);
    edges.push_back(fields.duration());
    Mat2 u = Mat2::Identity();
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double a = edges[k];
        const double b = edges[k + 1];
        // Gauss nodes are interior, so the panel's own side is always used.
        u = cf4_propagate([&](double t) { return fields.hamiltonian(t, noise); }, a, b, u,
                          substeps);
    }
    return {u, fields.duration()};
}

double fidelity(const Mat2& achieved, const Mat2& target) {
    check_unitary(achieved, "achieved gate");
    check_unitary(target, "target gate");
    const Mat2 m = target.adjoint() * achieved;
    const double f = ((m * m.adjoint()).trace().real() + std::norm(m.trace())) / 6.0;
    return std::clamp(f, 0.0, 1.0);
}

double infidelity(const Mat2& achieved, const Mat2& target) {
    check_unitary(achieved, "achieved gate");
    check_unitary(target, "target gate");
    const Mat2 m = target.adjoint() * achieved;
    const double v =
        (2.0 * (std::norm(m(0, 1)) + std::norm(m(1, 0))) + std::norm(m(0, 0) - m(1, 1))) / 6.0;
    return std::clamp(v, 0.0, 1.0);
}

double infidelity_of_deviation(const Mat2& v) {
    return (2.0 * (std::norm(v(0, 1)) + std::norm(v(1, 0))) + std::norm(v(0, 0) - v(1, 1))) / 6.0;
}

GateReport gate_report(const ControlFields& fields, const Mat2& target, const NoiseSample& noise,
                       const PropagateOptions& opt) {
    GateReport r;
    r.achieved = propagate(fields, noise, opt);
    r.target = target;
    r.noise = noise;
    r.infidelity = infidelity(r.achieved.matrix, target);
    r.fidelity = 1.0 - r.infidelity;
    return r;
}

nlohmann::json to_json(const GateReport& r) {
    auto mat = [](const Mat2& m) {
        nlohmann::json a = nlohmann::json::array();
        for (int i = 0; i < 2; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < 2; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
            a.push_back(row);
        }
        return a;
    };
    return {{"achieved", mat(r.achieved.matrix)},
            {"target", mat(r.target)},
            {"time", r.achieved.time},
            {"fidelity", r.fidelity},
            {"infidelity", r.infidelity},
            {"noise", {{"epsilon", r.noise.epsilon}, {"delta_z", r.noise.delta_z}}}};
}

Mat2 interaction_deviation(const ArclengthCurve& curve, const NoiseSample& noise,
                           const InteractionOptions& opt) {
    const SpaceCurve& c = curve.curve();
    const double dz = noise.delta_z / curve.total_time();
    std::vector<double> edges{c.lower()};
    for (double b : c.breaks()) edges.push_back(b);
    edges.push_back(c.upper());

    Rk45Options rk;
    rk.rel_tol = opt.rel_tol;
    rk.abs_tol = opt.abs_tol * std::max({std::abs(noise.epsilon), std::abs(noise.delta_z), 1e-300});
    Mat2 v = Mat2::Zero();
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double hi = edges[k + 1];
        auto rhs = [&](double l, const Mat2& y) -> Mat2 {
            const CurveJet j = c.derivatives(l, l >= hi ? Side::Left : Side::Right);
            const Vec3 w =
                -noise.epsilon * j.d1.cross(j.d2) / j.d1.squaredNorm() + dz * j.d1;
            const Mat2 h = sigma_dot(0.5 * w);
            return cplx(0.0, -1.0) * (h + h * y);
        };
        v = dormand_prince(rhs, edges[k], hi, v, rk);
    }
    return v;
}

namespace {

constexpr double kGx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                           0.9061798459386640};
constexpr double kGw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};

Vec3 tangent_of(const Mat2& u) { return pauli_components(u.adjoint() * pauli::z() * u); }

// Five-point Gauss-Legendre of U^dag sz U over [lo, hi] (no discontinuity
// inside), every node reached from the state u at lo.
Vec3 gauss5(const ControlFields& f, double lo, double hi, const Mat2& u, const Rk45Options& rk) {
    Vec3 acc = Vec3::Zero();
    Mat2 v = u;
    double t = lo;
    for (int g = 0; g < 5; ++g) {
        const double node = 0.5 * (lo + hi) + 0.5 * (hi - lo) * kGx[g];
        v = advance(f, {}, t, node, v, rk);
        t = node;
        acc += 0.5 * (hi - lo) * kGw[g] * tangent_of(v);
    }
    return acc;
}

Vec3 adaptive_panel(const ControlFields& f, double lo, double hi, const Mat2& u, const Vec3& whole,
                    const Rk45Options& rk, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const Mat2 um = advance(f, {}, lo, mid, u, rk);
    const Vec3 left = gauss5(f, lo, mid, u, rk);
    const Vec3 right = gauss5(f, mid, hi, um, rk);
    if (depth >= 30 || (left + right - whole).norm() <= tol) return left + right;
    return adaptive_panel(f, lo, mid, u, left, rk, 0.5 * tol, depth + 1) +
           adaptive_panel(f, mid, hi, um, right, rk, 0.5 * tol, depth + 1);
}

}  // namespace

std::vector<Vec3> reconstruct_curve(const ControlFields& fields, int n_points,
                                    const PropagateOptions& opt) {
    if (n_points < 2) throw ValidationError("reconstruct_curve: need at least 2 points");
    const double duration = fields.duration();
    const double tol = 1e-10 * duration;
    // Panels split at the output times and at every field knot.
    std::vector<double> edges;
    for (int k = 0; k < n_points; ++k)
        edges.push_back(k == n_points - 1 ? duration : duration * k / (n_points - 1));
    const std::size_t n_out = edges.size();
    for (double x : fields.knots()) edges.push_back(x);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](double a, double b) { return b - a < 1e-13 * duration; }),
                edges.end());

    std::vector<Vec3> out{Vec3::Zero()};
    out.reserve(n_out);
    Mat2 u = Mat2::Identity();
    Vec3 r = Vec3::Zero();
    std::size_t next_out = 1;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double lo = edges[k], hi = edges[k + 1];
        const Vec3 whole = gauss5(fields, lo, hi, u, opt.rk);
        r += adaptive_panel(fields, lo, hi, u, whole, opt.rk, tol * (hi - lo) / duration, 0);
        u = advance(fields, {}, lo, hi, u, opt.rk);
        while (next_out < n_out &&
               std::abs(hi - (next_out == n_out - 1 ? duration : duration * next_out / (n_points - 1))) <
                   1e-15 * duration) {
            out.push_back(r);
            ++next_out;
        }
    }
    while (out.size() < n_out) out.push_back(r);
    return out;
}

}  // namespace scqc
