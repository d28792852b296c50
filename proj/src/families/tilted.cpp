#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "scqc/errors.hpp"
#include "scqc/families/families.hpp"
#include "scqc/robustness/robustness.hpp"

namespace scqc {

namespace {

constexpr double kPi = std::numbers::pi;

// One constant-speed piece of the tangent path: a stretch of a small circle
// (about `axis`) or of the great-circle arc.
struct Piece {
    bool circle = true;
    double s0 = 0.0, s1 = 0.0;  // tangent arclength range
    double phase0 = 0.0;        // circle angle (or arc angle) at s0
    Vec3 axis, e1, e2;          // circle: T = cos g axis + sin g (cos phi e1 + sin phi e2)
                                // arc:    T = cos psi e1 + sin psi e2
};

struct Geometry {
    double sin_g = 0.0, cos_g = 0.0;
    std::vector<Piece> pieces;  // in path order
};

// Each circle cut into `circle_parts` equal pieces, the arc into `arc_parts`.
Geometry geometry(const TiltedCircleParams& p, int circle_parts, int arc_parts) {
    Geometry g;
    g.cos_g = std::cos(p.gamma);
    g.sin_g = std::sin(p.gamma);
    const double lc = 2.0 * kPi * g.sin_g;
    auto circle = [&](const Vec3& n, const Vec3& start, double s_begin) {
        const Vec3 e1 = (start - g.cos_g * n) / g.sin_g;
        const Vec3 e2 = n.cross(e1);  // counter-clockwise about n: area along +n
        for (int h = 0; h < circle_parts; ++h)
            g.pieces.push_back({true, s_begin + h * lc / circle_parts, s_begin + (h + 1) * lc / circle_parts,
                                2.0 * kPi * h / circle_parts, n, e1, e2});
    };
    circle(p.n0, p.t0, 0.0);
    const Vec3 e2 = Vec3::UnitY().cross(p.t0);  // rotation about +y carries t0 to tf
    for (int h = 0; h < arc_parts; ++h)
        g.pieces.push_back({false, lc + h * p.theta / arc_parts, lc + (h + 1) * p.theta / arc_parts,
                            h * p.theta / arc_parts, Vec3::Zero(), p.t0, e2});
    circle(p.nf, p.tf, lc + p.theta);
    return g;
}

Vec3 piece_tangent(const Geometry& g, const Piece& pc, double s) {
    if (pc.circle) {
        const double phi = pc.phase0 + (s - pc.s0) / g.sin_g;
        return g.cos_g * pc.axis + g.sin_g * (std::cos(phi) * pc.e1 + std::sin(phi) * pc.e2);
    }
    const double psi = pc.phase0 + (s - pc.s0);
    return std::cos(psi) * pc.e1 + std::sin(psi) * pc.e2;
}

// Integral of T ds over a piece, in closed form.
Vec3 piece_moment(const Geometry& g, const Piece& pc) {
    if (pc.circle) {
        const double a = pc.phase0, b = pc.phase0 + (pc.s1 - pc.s0) / g.sin_g;
        return g.sin_g * (g.cos_g * (b - a) * pc.axis +
                          g.sin_g * ((std::sin(b) - std::sin(a)) * pc.e1 - (std::cos(b) - std::cos(a)) * pc.e2));
    }
    const double a = pc.phase0, b = pc.phase0 + (pc.s1 - pc.s0);
    return (std::sin(b) - std::sin(a)) * pc.e1 - (std::cos(b) - std::cos(a)) * pc.e2;
}

struct Solve {
    Eigen::VectorXd w;
    double residual = 0.0;
    bool converged = false;
};

// Weights w > 0 with sum w_k m_k = 0 and sum w_k l_k = T, by damped Newton in
// u = log w with minimum-norm (or least-squares, when overdetermined) steps.
Solve closure_newton(const std::vector<Vec3>& m, const std::vector<double>& l, double duration) {
    const int n = static_cast<int>(m.size());
    double total = 0.0;
    for (double x : l) total += x;
    Eigen::VectorXd u = Eigen::VectorXd::Constant(n, std::log(duration / total));
    auto residual = [&](const Eigen::VectorXd& uu) {
        Eigen::Vector4d f = Eigen::Vector4d::Zero();
        for (int k = 0; k < n; ++k) {
            const double w = std::exp(uu[k]);
            f.head<3>() += w * m[k];
            f[3] += w * l[k];
        }
        f[3] -= duration;
        return f;
    };
    Eigen::Vector4d f = residual(u);
    Solve out;
    for (int it = 0; it < 200; ++it) {
        if (f.norm() < 1e-14 * duration) {
            out.converged = true;
            break;
        }
        Eigen::MatrixXd j(4, n);
        for (int k = 0; k < n; ++k) {
            const double w = std::exp(u[k]);
            j.block<3, 1>(0, k) = w * m[k];
            j(3, k) = w * l[k];
        }
        const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-f);
        double lam = 1.0;
        bool improved = false;
        for (int b = 0; b < 40; ++b, lam *= 0.5) {
            const Eigen::VectorXd trial = u + lam * step;
            const Eigen::Vector4d ft = residual(trial);
            if (ft.norm() < (1.0 - 1e-4 * lam) * f.norm()) {
                u = trial;
                f = ft;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    out.w = u.array().exp();
    out.residual = f.head<3>().norm();
    if (f.norm() < 1e-14 * duration) out.converged = true;
    return out;
}

std::string affine(double a, double b, double t0) {
    // a + b (t - t0)
    return exact_number(a) + "+" + exact_number(b) + "*(t-" + exact_number(t0) + ")";
}

}  // namespace

double tilted_circle_alpha(double theta) {
    if (!(theta > 0.0) || !(theta <= kPi))
        throw ValidationError("tilted circles: theta must lie in (0, pi]");
    const double s2 = std::pow(std::sin(theta / 2.0), 2);
    auto f = [&](double a) {
        return 2.0 * kPi * std::sin(a) * (1.0 - s2 * std::pow(std::cos(a), 2)) - theta / 2.0;
    };
    double lo = 0.0, hi = kPi / 2.0;
    if (!(f(hi) > 0.0)) throw ValidationError("tilted circles: no feasible tilt angle for this theta");
    // f is increasing on (0, pi/2), so the bracket holds a single root.
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Vec3 tilted_circle_tangent(const TiltedCircleParams& p, double s) {
    const Geometry g = geometry(p, 1, 1);
    for (const Piece& pc : g.pieces)
        if (s <= pc.s1) return piece_tangent(g, pc, std::max(s, pc.s0));
    return piece_tangent(g, g.pieces.back(), g.pieces.back().s1);
}

TiltedCircleParams tilted_circle_params(double theta, double duration) {
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw ValidationError("tilted circles: duration must be positive and finite");
    TiltedCircleParams p;
    p.theta = theta;
    p.duration = duration;
    p.alpha = tilted_circle_alpha(theta);
    const double sa = std::sin(p.alpha), ca = std::cos(p.alpha);
    const double st = std::sin(theta / 2.0), ct = std::cos(theta / 2.0);
    p.n0 = Vec3(0.0, -sa, ca);
    p.nf = Vec3(0.0, -sa, -ca);
    p.t0 = Vec3(ct, 0.0, st);
    p.tf = Vec3(ct, 0.0, -st);
    p.gamma = std::acos(st * ca);

    {
        // The tangent path must be closable before any speed profile can close it.
        std::vector<Vec3> pts;
        const double total = 4.0 * kPi * std::sin(p.gamma) + theta;
        for (int i = 0; i < 720; ++i) pts.push_back(tilted_circle_tangent(p, total * i / 720.0));
        if (!closability_check(pts).closable)
            throw NumericalError("tilted circles: tangent path does not contain the origin in its hull");
    }

    // Constant speed on each circle and on the arc first, then ever finer
    // piecewise-constant profiles until one closes the curve.
    std::ostringstream tried;
    for (const auto& [cp, ap] : std::initializer_list<std::pair<int, int>>{{1, 1}, {2, 2}, {4, 2}, {8, 4}, {16, 4}, {32, 8}, {64, 8}, {128, 16}}) {
        const Geometry g = geometry(p, cp, ap);
        std::vector<Vec3> m;
        std::vector<double> l;
        for (const Piece& pc : g.pieces) {
            m.push_back(piece_moment(g, pc));
            l.push_back(pc.s1 - pc.s0);
        }
        const Solve sol = closure_newton(m, l, duration);
        const int n = static_cast<int>(g.pieces.size());
        if (n == 3) p.three_piece_residual = sol.residual;
        tried << (n == 3 ? "" : ", ") << n << " pieces: " << sol.residual;
        if (sol.converged) {
            p.pieces = n;
            p.circle_parts = cp;
            p.arc_parts = ap;
            p.piece_lengths = l;
            p.weights.assign(sol.w.data(), sol.w.data() + sol.w.size());
            p.closure_residual = sol.residual;
            return p;
        }
    }
    throw NumericalError("tilted circles: closure solve did not converge (final residuals " + tried.str() + ")");
}

Family tilted_circle_family(double theta, double duration) {
    const TiltedCircleParams p = tilted_circle_params(theta, duration);
    const Geometry g = geometry(p, p.circle_parts, p.arc_parts);

    // Velocity pieces in time: piece k lasts w_k l_k at unit speed.
    std::vector<VelocityExprPiece> pieces;
    double t0 = 0.0;
    for (std::size_t k = 0; k < g.pieces.size(); ++k) {
        const Piece& pc = g.pieces[k];
        const double w = p.weights[k];
        const double t1 = k + 1 == g.pieces.size() ? duration : t0 + w * (pc.s1 - pc.s0);
        VelocityExprPiece v{t0, t1, {}};
        if (pc.circle) {
            const std::string ang = affine(pc.phase0, 1.0 / (w * g.sin_g), t0);
            for (int i = 0; i < 3; ++i)
                v.components[i] = exact_number(g.cos_g * pc.axis[i]) + "+" +
                                  exact_number(g.sin_g * pc.e1[i]) + "*cos(" + ang + ")+" +
                                  exact_number(g.sin_g * pc.e2[i]) + "*sin(" + ang + ")";
        } else {
            const std::string ang = affine(pc.phase0, 1.0 / w, t0);
            for (int i = 0; i < 3; ++i)
                v.components[i] = exact_number(pc.e1[i]) + "*cos(" + ang + ")+" +
                                  exact_number(pc.e2[i]) + "*sin(" + ang + ")";
        }
        pieces.push_back(v);
        t0 = t1;
    }
    nlohmann::json spec = tangent_spec(pieces);
    Family f{.name = "tilted", .curve = curve_from_spec(spec), .spec = spec, .params = nlohmann::json::object()};

    // Natural gate from the frames alone, then a linear gauge (constant
    // detuning) that strips the z-rotations: Z_p X Z_q -> X.
    const auto track = FrenetTrack::build(arclength_reparameterize(f.curve));
    const ControlFields natural = fields_from_frenet(track);
    const ZxzAngles zxz = decompose_zxz(frame_gate(track, natural));
    f.gauge = GaugeTransform::linear(-(zxz.pre + zxz.post), zxz.post, duration);
    f.target = x_rotation(theta);

    f.params = {{"theta", theta},
                {"alpha", p.alpha},
                {"gamma", p.gamma},
                {"duration", duration},
                {"n0", {p.n0.x(), p.n0.y(), p.n0.z()}},
                {"nf", {p.nf.x(), p.nf.y(), p.nf.z()}},
                {"t0", {p.t0.x(), p.t0.y(), p.t0.z()}},
                {"tf", {p.tf.x(), p.tf.y(), p.tf.z()}},
                {"pieces", p.pieces},
                {"piece_lengths", p.piece_lengths},
                {"segment_speeds", [&] {
                     std::vector<double> v;
                     for (double w : p.weights) v.push_back(1.0 / w);
                     return v;
                 }()},
                {"closure_residual", p.closure_residual},
                {"three_piece_residual", p.three_piece_residual},
                {"natural_gate_zxz", {{"pre", zxz.pre}, {"theta", zxz.theta}, {"post", zxz.post}}},
                {"gauge", f.gauge.description()},
                {"detuning", -(zxz.pre + zxz.post) / duration}};
    f.spec["family"] = "tilted";
    f.spec["params"] = f.params;
    return f;
}

}  // namespace scqc
