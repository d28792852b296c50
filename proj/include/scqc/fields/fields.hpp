#pragma once

// Control fields (Omega, Phi, Delta) of the driven two-level Hamiltonian,
// their extraction from Frenet data, gauge transformations and pulse tables.

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "scqc/geom/frenet.hpp"
#include "scqc/robustness/robustness.hpp"
#include "scqc/su2.hpp"

namespace scqc {

struct FieldValue {
    double omega = 0.0;  // signed amplitude
    double phi = 0.0;
    double delta = 0.0;

    double omega_x() const;
    double omega_y() const;
};

/// Immutable, time-continuous field set on [0, duration].
class ControlFields {
public:
    using Evaluator = std::function<FieldValue(double t, Side side)>;

    /// `knots` are edges of smooth panels (used by fixed-step integrators);
    /// `discontinuities` is the subset where some field jumps.
    ControlFields(double duration, Evaluator eval, std::vector<double> knots,
                  std::vector<double> discontinuities);

    static ControlFields constant(double omega, double phi, double delta, double duration);

    double duration() const { return duration_; }
    FieldValue operator()(double t, Side side = Side::Right) const { return eval_(t, side); }
    /// Unsigned amplitude with Phi advanced by pi wherever Omega < 0; the phase
    /// then jumps by pi at every inflection.
    FieldValue polar(double t, Side side = Side::Right) const;

    /// H = ((1+eps) Omega / 2)(cos Phi sx + sin Phi sy) + ((Delta + dz) / 2) sz,
    /// with dz the physical detuning error noise.delta_z / duration.
    Mat2 hamiltonian(double t, const NoiseSample& noise, Side side = Side::Right) const;

    /// Sorted interior points, no duplicates.
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& discontinuities() const { return jumps_; }

private:
    double duration_;
    Evaluator eval_;
    std::vector<double> knots_;
    std::vector<double> jumps_;
};

/// Lambda(t) with its derivative.
class GaugeTransform {
public:
    GaugeTransform(std::function<double(double)> value, std::function<double(double)> rate,
                   nlohmann::json description);

    /// Lambda(t) = offset0 + total * t / duration: `total` is the phase advance over the gate.
    static GaugeTransform linear(double total, double offset0, double duration);
    /// Cubic Hermite through uniformly spaced samples over [0, duration].
    static GaugeTransform sampled(std::vector<double> values, double duration);
    static GaugeTransform identity();
    /// {"kind": "linear", "slope": s, "offset0": a} or {"kind": "sampled", "values": [...]}.
    static GaugeTransform from_json(const nlohmann::json& j, double duration);

    double operator()(double t) const { return value_(t); }
    double rate(double t) const { return rate_(t); }
    const nlohmann::json& description() const { return description_; }

private:
    std::function<double(double)> value_;
    std::function<double(double)> rate_;
    nlohmann::json description_;
};

/// Choice of the free field: either Delta(t) (Phi solved from torsion) or Phi(t)
/// (Delta solved). Default: Delta = 0 and Phi(0) = phi0.
struct FieldGauge {
    std::function<double(double)> detuning;
    bool constant_detuning = true;
    double detuning_value = 0.0;
    std::function<double(double)> phase;  // when set, overrides the detuning choice
    double phi0 = 0.0;

    static FieldGauge zero_detuning(double phi0 = 0.0);
    static FieldGauge with_detuning(double delta);
    static FieldGauge with_detuning(std::function<double(double)> delta);
    static FieldGauge with_phase(std::function<double(double)> phi);
};

ControlFields fields_from_frenet(const FrenetTrack& track, const FieldGauge& gauge = {});

/// Phi -> Phi + Lambda, Delta -> Delta + dLambda/dt.
ControlFields apply_gauge(const ControlFields& fields, const GaugeTransform& gauge);

/// Rotation Q with Q [T N B](0) equal to the lab frame at t = 0 for the given
/// initial phase, i.e. the orientation in which U0^dag sz U0 = T . sigma.
Mat3 canonical_rotation(const FrenetTrack& track, double phi0 = 0.0);

/// Lab frame [z, n_Phi, b_Phi] that the Pauli frame of U(t) maps onto.
Mat3 lab_frame(double phi);

/// Gate the fields implement, predicted from the curve frames alone:
/// U^dag (a.s) U = (R a).s with R = L(0) F(0)^T F(T) L(T)^T.
Mat2 frame_gate(const FrenetTrack& track, const ControlFields& fields);

/// Rotation matrix to a unitary with the same adjoint action, U^dag (a.s) U = (R a).s.
Mat2 unitary_from_rotation(const Mat3& r);

struct PulseTable {
    std::vector<double> t;
    std::vector<double> omega_x;
    std::vector<double> omega_y;
    std::vector<double> delta;
};

PulseTable pulse_table(const ControlFields& fields, int n_points = 1024);
void export_pulse_table(const PulseTable& table, const std::filesystem::path& path);
void export_pulse_table(const ControlFields& fields, const std::filesystem::path& path,
                        int n_points = 1024);
PulseTable import_pulse_table(const std::filesystem::path& path);
/// Piecewise-linear fields through the table rows.
ControlFields fields_from_table(const PulseTable& table);

nlohmann::json to_json(const FrenetProfile& p);

}  // namespace scqc
