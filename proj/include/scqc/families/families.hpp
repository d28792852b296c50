#pragma once

// Constructive curve families: the parity curve and three counterexamples,
// Bessel curves, and tilted-circle x-rotations.

#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "scqc/fields/fields.hpp"
#include "scqc/geom/curve.hpp"
#include "scqc/geom/curve_spec.hpp"

namespace scqc {

// ---- special functions

/// J0 by its power series (long double) below x = 20, Hankel asymptotics above.
double bessel_j0(double x);
double bessel_j1(double x);
/// First n positive zeros of J0, ascending, each polished by Newton.
std::vector<double> bessel_zeros(int n);

// ---- families

struct Family {
    std::string name;
    SpaceCurve curve;
    nlohmann::json spec;    // curve spec with "family" and "params" attached
    nlohmann::json params;
    Mat2 target = Mat2::Identity();
    FieldGauge field_gauge{};
    GaugeTransform gauge = GaugeTransform::identity();  // applied after extraction
};

Family parity_family();
/// Counterexamples given by their unit-speed tangents on t in [0, 2 pi], r(0) = 0.
Family eq20_family();
Family eq21_family();
Family eq22_family();

enum class QRule {
    CentralDifference,  // q = (x_{i+1} - x_{i-1}) / (2 x_i)
    ExactClosure,       // q solving J0((1-q) x_i) = J0((1+q) x_i), closing the curve exactly
};

struct BesselParams {
    int index = 2;  // 1-based root index i
    double x = 0.0;
    double q = 0.0;
    double duration = 1.0;
    QRule rule = QRule::CentralDifference;

    double theta(double t) const;
};

/// Requires i >= 2 so both neighbouring roots exist.
BesselParams bessel_params(int index, double duration = 1.0, QRule rule = QRule::CentralDifference);
Family bessel_family(int index, double duration = 1.0, QRule rule = QRule::CentralDifference);
/// Closure residual r(T) - r(0) in closed form through J0.
Vec3 bessel_closure(const BesselParams& p);

struct TiltedCircleParams {
    double theta = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double duration = 1.0;
    Vec3 n0, nf, t0, tf;
    std::vector<double> piece_lengths;  // tangent-curve arclength of each piece
    std::vector<double> weights;        // time per unit tangent arclength, per piece
    double closure_residual = 0.0;      // |r(T) - r(0)| after the solve
    int pieces = 0;                     // 2 circle_parts + arc_parts
    int circle_parts = 1;               // equal pieces per small circle
    int arc_parts = 1;
    double three_piece_residual = 0.0;  // best closure residual reached with 3 pieces
};

/// Smallest positive root of 2 pi sin a (1 - sin^2(theta/2) cos^2 a) = theta / 2.
double tilted_circle_alpha(double theta);
TiltedCircleParams tilted_circle_params(double theta, double duration = 1.0);
/// x-rotation by theta up to the z-gauge; the gauge maps the natural gate onto X_theta.
Family tilted_circle_family(double theta, double duration = 1.0);

/// Tangent curve (unit sphere path) of the tilted-circle construction in its arclength s.
Vec3 tilted_circle_tangent(const TiltedCircleParams& p, double s);

struct FamilyOptions {
    int index = 2;
    double theta = std::numbers::pi / 2.0;
    double duration = 1.0;
    QRule q_rule = QRule::CentralDifference;
};

/// parity | eq20 | eq21 | eq22 | bessel | tilted
Family make_family(const std::string& name, const FamilyOptions& opt = {});
std::vector<std::string> family_names();

/// Everything needed to simulate a family member.
struct Pulse {
    ArclengthCurve arclength;
    FrenetTrack track;
    ControlFields fields;
    Mat2 target;
    /// Rotation placing the curve in the orientation U0^dag sz U0 = T . sigma
    /// for the final (gauged) fields.
    Mat3 canonical;

    /// Curve in its canonical orientation, for interaction-picture propagation.
    ArclengthCurve canonical_curve() const;
};

Pulse build_pulse(const Family& family, const FrenetOptions& opt = {});

}  // namespace scqc
