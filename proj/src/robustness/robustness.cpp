#include "scqc/robustness/robustness.hpp"

#include <cmath>

#include "scqc/errors.hpp"
#include "scqc/quadrature.hpp"
#include "scqc/simplex.hpp"

namespace scqc {

namespace {

QuadratureOptions tight() {
    QuadratureOptions q;
    q.abs_tol = 1e-15;
    q.rel_tol = 1e-14;
    return q;
}

// Quadrature over the native parameter; all integrands here are reparameterization
// invariant once the Jacobian is folded in.
template <class F>
Vec3 over_parameter(const ArclengthCurve& curve, F&& f) {
    const SpaceCurve& c = curve.curve();
    return integrate([&](double l) { return Vec3(f(c.derivatives(l), l)); }, c.lower(), c.upper(),
                     c.breaks(), tight());
}

// Length scale used to make tolerances relative to T = 1.
double time_scale(const ArclengthCurve& curve) { return curve.total_time(); }

}  // namespace

Vec3 closure_residual(const ArclengthCurve& curve) {
    return over_parameter(curve, [](const CurveJet& j, double) { return j.d1; });
}

Vec3 tangent_area_residual(const ArclengthCurve& curve) {
    return over_parameter(curve,
                          [](const CurveJet& j, double) { return Vec3(j.d1.cross(j.d2) / j.d1.squaredNorm()); });
}

Vec3 projected_area_residual(const ArclengthCurve& curve) {
    return over_parameter(curve, [](const CurveJet& j, double) { return Vec3(j.r.cross(j.d1)); });
}

Mat2 first_order_magnus(const ArclengthCurve& curve, const NoiseSample& noise) {
    const Vec3 w = -noise.epsilon * tangent_area_residual(curve) +
                   (noise.delta_z / curve.total_time()) * closure_residual(curve);
    return sigma_dot(0.5 * w);
}

double magnus_norm(const Mat2& pi1) { return pauli_components(pi1).norm(); }

double dynamical_phase(const ArclengthCurve& curve, const std::function<double(double)>& delta,
                       const Vec3& p0) {
    const Vec3 integral = over_parameter(curve, [&](const CurveJet& j, double l) {
        const double d = delta ? delta(curve.time(l)) : 0.0;
        return Vec3(-j.d1.cross(j.d2) / j.d1.squaredNorm() + d * j.d1);
    });
    return 0.5 * p0.dot(integral);
}

Closability closability_check(const std::vector<Vec3>& points, double interior_threshold) {
    const int n = static_cast<int>(points.size());
    if (n == 0) throw ValidationError("closability_check: no samples");
    bool distinct = false;
    for (const Vec3& p : points)
        if ((p - points.front()).norm() > 1e-12) distinct = true;
    if (!distinct) throw ValidationError("closability_check: all samples coincide");

    // Max-min-weight form: w_i = mu_i + t with mu, t >= 0; maximize t.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, n + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
    Vec3 sum = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
        a.block<3, 1>(0, i) = points[i];
        a(3, i) = 1.0;
        sum += points[i];
    }
    a.block<3, 1>(0, n) = sum;
    a(3, n) = n;
    b(3) = 1.0;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    c(n) = 1.0;

    const LpResult r = solve_lp(a, b, c);
    Closability out;
    if (r.status != LpStatus::Optimal) return out;
    out.closable = true;
    out.min_weight = r.x(n);
    out.interior = out.min_weight > interior_threshold;
    out.weights.resize(n);
    for (int i = 0; i < n; ++i) out.weights[i] = r.x(i) + r.x(n);
    return out;
}

Closability closability_check(const TangentCurve& tangent, int n_samples) {
    if (n_samples < 4) throw ValidationError("closability_check: n_samples must be >= 4");
    if (tangent.degenerate()) throw ValidationError("closability_check: tangent curve is a single point");
    return closability_check(tangent.sample(n_samples));
}

bool RobustnessReport::closure_ok() const { return closure.norm() / total_time < tolerance; }
bool RobustnessReport::tangent_area_ok() const { return tangent_area.norm() < tolerance; }
bool RobustnessReport::projected_area_ok() const {
    return projected_area.norm() / (total_time * total_time) < tolerance;
}

RobustnessReport robustness_report(const ArclengthCurve& curve, const RobustnessOptions& opt) {
    RobustnessReport r;
    r.total_time = time_scale(curve);
    r.closure = closure_residual(curve);
    r.tangent_area = tangent_area_residual(curve);
    r.projected_area = projected_area_residual(curve);
    r.noise = opt.noise;
    const Vec3 w = -opt.noise.epsilon * r.tangent_area + (opt.noise.delta_z / r.total_time) * r.closure;
    r.magnus = 0.5 * w.norm();
    r.dynamical_phase = dynamical_phase(curve, opt.detuning, opt.initial_pauli);
    r.tolerance = opt.tolerance;
    return r;
}

namespace {
nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }
}  // namespace

nlohmann::json to_json(const RobustnessReport& r) {
    nlohmann::json j;
    j["total_time"] = r.total_time;
    j["tolerance"] = r.tolerance;
    j["closure_residual"] = {{"vector", vec_json(r.closure)},
                             {"norm", r.closure.norm()},
                             {"relative_norm", r.closure.norm() / r.total_time},
                             {"pass", r.closure_ok()}};
    j["tangent_area_residual"] = {{"vector", vec_json(r.tangent_area)},
                                  {"norm", r.tangent_area.norm()},
                                  {"pass", r.tangent_area_ok()}};
    j["projected_area_residual"] = {
        {"vector", vec_json(r.projected_area)},
        {"norm", r.projected_area.norm()},
        {"relative_norm", r.projected_area.norm() / (r.total_time * r.total_time)},
        {"pass", r.projected_area_ok()}};
    j["noise"] = {{"epsilon", r.noise.epsilon}, {"delta_z", r.noise.delta_z}};
    j["magnus_norm"] = r.magnus;
    j["dynamical_phase"] = r.dynamical_phase;
    j["doubly_robust"] = r.closure_ok() && r.tangent_area_ok();
    return j;
}

nlohmann::json to_json(const Closability& c) {
    nlohmann::json j;
    j["closable"] = c.closable;
    j["interior"] = c.interior;
    j["min_weight"] = c.min_weight;
    return j;
}

}  // namespace scqc
