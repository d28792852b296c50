#pragma once

// Frenet-Serret data of a unit-speed curve. Curvature is signed: it flips at
// every inflection so the normal and binormal stay continuous.

#include <functional>
#include <utility>
#include <vector>

#include "scqc/chebyshev.hpp"
#include "scqc/geom/curve.hpp"

namespace scqc {

struct FrenetFrame {
    Vec3 tangent = Vec3::UnitZ();
    Vec3 normal = Vec3::UnitX();
    Vec3 binormal = Vec3::UnitY();

    /// Columns T, N, B.
    Mat3 matrix() const;
};

/// Frame jump at a curve breakpoint: N_after = cos(angle) N_before + sin(angle) B_before.
struct FrameCorner {
    double time = 0.0;
    double angle = 0.0;
};

struct FrenetOptions {
    int scan_samples = 4096;       // grid used to detect inflections
    double zero_curvature = 1e-9;  // curvature below this counts as zero
    double torsion_window = 1e-4;  // fraction of total time filled around zero-curvature points
    ChebFitOptions fit{};
};

class FrenetTrack {
public:
    static FrenetTrack build(const ArclengthCurve& curve, const FrenetOptions& opt = {});

    double total_time() const { return curve_.total_time(); }
    const ArclengthCurve& curve() const { return curve_; }

    /// Frame from the curve derivatives at t (not interpolated).
    FrenetFrame frame(double t, Side side = Side::Right) const;
    /// Signed curvature from the curve derivatives at t.
    double signed_curvature(double t, Side side = Side::Right) const;
    /// Torsion with zero-curvature neighbourhoods filled linearly.
    double torsion(double t) const;

    const PiecewiseChebyshev& curvature_fit() const { return kappa_fit_; }
    const PiecewiseChebyshev& torsion_fit() const { return tau_fit_; }

    const std::vector<double>& inflection_times() const { return inflections_; }
    /// Endpoints or interior points of zero curvature without a sign change.
    const std::vector<double>& flat_points() const { return flat_; }
    const std::vector<FrameCorner>& corners() const { return corners_; }
    /// Intervals where curvature vanishes identically and torsion is undefined.
    const std::vector<std::pair<double, double>>& torsion_undefined() const { return undefined_; }
    /// Times where any field derived from this track may be non-smooth.
    std::vector<double> breakpoints() const;

private:
    explicit FrenetTrack(ArclengthCurve curve) : curve_(std::move(curve)) {}

    double raw_torsion(double t, Side side) const;
    // lambda(t), snapped onto a curve break when t is one up to round-off, so
    // one-sided evaluations pick the intended piece.
    double lambda_at(double t) const;
    int sign_at(double t, Side side) const;

    ArclengthCurve curve_;
    FrenetOptions opt_;
    std::vector<double> inflections_;
    std::vector<double> flat_;
    std::vector<double> singular_lambda_;  // parameter values of all zero-curvature points
    std::vector<std::pair<double, double>> break_times_;  // (time, lambda) of curve breaks
    std::vector<FrameCorner> corners_;
    std::vector<std::pair<double, double>> undefined_;
    double window_ = 0.0;
    PiecewiseChebyshev kappa_fit_;
    PiecewiseChebyshev tau_fit_;
};

/// Sampled view of a track on a uniform grid of n_samples points.
struct FrenetProfile {
    std::vector<double> t_grid;
    std::vector<Vec3> tangent;
    std::vector<Vec3> normal;
    std::vector<Vec3> binormal;
    std::vector<double> kappa;
    std::vector<double> tau;
    std::vector<double> inflection_times;
    std::vector<std::pair<double, double>> torsion_undefined;
};

FrenetProfile frenet_profile(const FrenetTrack& track, int n_samples);
FrenetProfile frenet_profile(const ArclengthCurve& curve, int n_samples);

/// Unit tangent as a function of its own arclength s in [0, length].
class TangentCurve {
public:
    TangentCurve(std::function<Vec3(double)> tangent_of_s, double length,
                 std::function<double(double)> time_of_s = {});

    Vec3 operator()(double s) const { return fn_(s); }
    double length() const { return length_; }
    /// True for a curve with identically zero curvature (the tangent is a point).
    bool degenerate() const { return length_ < 1e-12; }
    /// Time on the originating space curve, when known.
    double time_of(double s) const { return time_of_s_ ? time_of_s_(s) : s; }
    /// n points evenly spaced in s, both ends included.
    std::vector<Vec3> sample(int n) const;

private:
    std::function<Vec3(double)> fn_;
    double length_;
    std::function<double(double)> time_of_s_;
};

TangentCurve tangent_of(const FrenetTrack& track);
TangentCurve tangent_of(const ArclengthCurve& curve);

}  // namespace scqc
