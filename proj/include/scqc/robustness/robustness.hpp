#pragma once

// Noise-cancellation functionals of a unit-speed curve and the convex-hull
// closability test for tangent curves.

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "scqc/geom/curve.hpp"
#include "scqc/geom/frenet.hpp"
#include "scqc/su2.hpp"

namespace scqc {

/// Quasistatic error strengths. delta_z is dimensionless: the physical
/// detuning error times the gate time.
struct NoiseSample {
    double epsilon = 0.0;
    double delta_z = 0.0;
};

/// integral of T dt = r(T) - r(0), by quadrature.
Vec3 closure_residual(const ArclengthCurve& curve);
/// integral of T x T' dt.
Vec3 tangent_area_residual(const ArclengthCurve& curve);
/// integral of r x T dt.
Vec3 projected_area_residual(const ArclengthCurve& curve);

/// First-order interaction-picture Magnus term at the final time,
/// (sigma/2) . (-epsilon A + (delta_z / T) C), with A the tangent area and C the closure residual.
Mat2 first_order_magnus(const ArclengthCurve& curve, const NoiseSample& noise);
/// Largest eigenvalue magnitude of a traceless Hermitian 2x2 matrix.
double magnus_norm(const Mat2& pi1);

/// (p0 / 2) . integral of (-T x T' + delta(t) T) dt.
double dynamical_phase(const ArclengthCurve& curve, const std::function<double(double)>& delta,
                       const Vec3& p0);

struct Closability {
    bool closable = false;
    bool interior = false;       // a witness with every weight strictly positive exists
    double min_weight = 0.0;     // optimum of the max-min-weight problem
    std::vector<double> weights;  // empty when not closable
};

/// LP test: do nonnegative weights summing to one exist with sum w_i T_i = 0?
Closability closability_check(const std::vector<Vec3>& points, double interior_threshold = 1e-9);
Closability closability_check(const TangentCurve& tangent, int n_samples = 512);

struct RobustnessOptions {
    double tolerance = 1e-6;  // certification threshold in units where T = 1
    NoiseSample noise{};
    std::function<double(double)> detuning;  // default: zero
    Vec3 initial_pauli = Vec3::UnitZ();
};

struct RobustnessReport {
    double total_time = 0.0;
    Vec3 closure = Vec3::Zero();
    Vec3 tangent_area = Vec3::Zero();
    Vec3 projected_area = Vec3::Zero();
    double magnus = 0.0;
    double dynamical_phase = 0.0;
    double tolerance = 1e-6;
    NoiseSample noise{};

    bool closure_ok() const;
    bool tangent_area_ok() const;
    bool projected_area_ok() const;
};

RobustnessReport robustness_report(const ArclengthCurve& curve, const RobustnessOptions& opt = {});
nlohmann::json to_json(const RobustnessReport& report);
nlohmann::json to_json(const Closability& c);

}  // namespace scqc
