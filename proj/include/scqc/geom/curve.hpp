#pragma once

// Parametric space curves r(lambda) and their unit-speed reparameterization.

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scqc/chebyshev.hpp"
#include "scqc/expr.hpp"
#include "scqc/jet.hpp"
#include "scqc/su2.hpp"

namespace scqc {

enum class DerivativeScheme { Analytic, FiniteDifference };

/// Which one-sided limit to take at a breakpoint.
enum class Side { Left, Right };

/// Position and the first three parameter derivatives at one point.
struct CurveJet {
    Vec3 r = Vec3::Zero();
    Vec3 d1 = Vec3::Zero();
    Vec3 d2 = Vec3::Zero();
    Vec3 d3 = Vec3::Zero();
};

using PositionJetFn = std::function<std::array<Jet3, 3>(const Jet3&)>;
using VelocityJetFn = std::function<std::array<Jet3, 3>(const Jet3&)>;

/// A smooth piece of a velocity-specified curve.
struct VelocityPiece {
    double lower = 0.0;
    double upper = 0.0;
    VelocityJetFn velocity;
};

class SpaceCurve {
public:
    class Source;

    /// r(lambda) with derivatives from Taylor jets.
    static SpaceCurve analytic(PositionJetFn position, double lower, double upper,
                               std::vector<double> breaks = {});
    static SpaceCurve from_expressions(const std::array<Expression, 3>& components, double lower,
                                       double upper);
    /// r(lambda) = origin + integral of a piecewise velocity. Pieces must tile a
    /// contiguous interval in order.
    static SpaceCurve from_velocity(std::vector<VelocityPiece> pieces,
                                    const Vec3& origin = Vec3::Zero());
    /// Uniformly sampled points; positions by local Lagrange interpolation,
    /// derivatives by central differences with step span / (8 n).
    static SpaceCurve sampled(std::vector<Vec3> points, double lower, double upper);

    double lower() const;
    double upper() const;
    Vec3 position(double lambda) const;
    CurveJet derivatives(double lambda, Side side = Side::Right) const;
    /// Interior parameter values where derivatives may be discontinuous.
    const std::vector<double>& breaks() const;
    DerivativeScheme scheme() const;

    /// R r(lambda) for a fixed rotation R.
    SpaceCurve rotated(const Mat3& rotation) const;

private:
    explicit SpaceCurve(std::shared_ptr<const Source> src) : src_(std::move(src)) {}
    std::shared_ptr<const Source> src_;
};

struct ArclengthOptions {
    int n_samples = 256;         // regularity probes across the domain
    double min_speed = 1e-12;
    ChebFitOptions fit{};
};

/// The curve expressed in its unit-speed parameter t in [0, total_time].
class ArclengthCurve {
public:
    ArclengthCurve(SpaceCurve curve, PiecewiseChebyshev time_of_param,
                   PiecewiseChebyshev param_of_time);

    double total_time() const { return total_; }
    double parameter(double t) const;   // lambda(t)
    double time(double lambda) const;   // t(lambda)
    Vec3 position(double t) const;
    Vec3 tangent(double t, Side side = Side::Right) const;
    const SpaceCurve& curve() const { return curve_; }
    /// Curve breakpoints mapped to time.
    std::vector<double> time_breaks() const;

private:
    SpaceCurve curve_;
    PiecewiseChebyshev time_of_param_;
    PiecewiseChebyshev param_of_time_;
    double total_ = 0.0;
};

/// Throws DegenerateCurveError when the speed drops below opt.min_speed.
ArclengthCurve arclength_reparameterize(const SpaceCurve& curve, const ArclengthOptions& opt = {});

}  // namespace scqc
