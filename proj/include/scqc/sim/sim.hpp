#pragma once

// Noisy two-level propagation, gate fidelity, and the interaction-picture
// deviation route used for small-noise scaling.

#include <vector>

#include <json.hpp>

#include "scqc/fields/fields.hpp"
#include "scqc/geom/curve.hpp"
#include "scqc/ode.hpp"
#include "scqc/robustness/robustness.hpp"
#include "scqc/su2.hpp"

namespace scqc {

struct Propagator {
    Mat2 matrix = Mat2::Identity();
    double time = 0.0;
};

struct PropagateOptions {
    Rk45Options rk{};
    bool polish = true;  // project onto the nearest unitary at the end
};

/// Adaptive Dormand-Prince, restarted at every field discontinuity.
Propagator propagate(const ControlFields& fields, const NoiseSample& noise,
                     const PropagateOptions& opt = {});

/// Independent oracle: commutator-free fourth-order Magnus steps, `substeps`
/// per smooth panel of the fields.
Propagator propagate_oracle(const ControlFields& fields, const NoiseSample& noise,
                            int substeps = 128);

/// Average gate fidelity [Tr(M M^dag) + |Tr M|^2] / 6 with M = target^dag achieved.
/// Throws ValidationError when either input is further than 1e-6 from unitary.
double fidelity(const Mat2& achieved, const Mat2& target);
/// 1 - fidelity, evaluated from off-diagonal and diagonal-difference terms so
/// that tiny infidelities do not cancel.
double infidelity(const Mat2& achieved, const Mat2& target);
/// Infidelity of (1 + deviation) against the identity.
double infidelity_of_deviation(const Mat2& deviation);

struct GateReport {
    Propagator achieved;
    Mat2 target = Mat2::Identity();
    double fidelity = 1.0;
    double infidelity = 0.0;
    NoiseSample noise{};
};

GateReport gate_report(const ControlFields& fields, const Mat2& target, const NoiseSample& noise,
                       const PropagateOptions& opt = {});
nlohmann::json to_json(const GateReport& r);

struct InteractionOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-18;  // scaled by the noise strength
};

/// Deviation V = U_I(T) - 1 of the interaction-picture propagator for a curve
/// already in its canonical orientation, integrated over the native parameter
/// with H_I = (1/2)(-eps T x T' + dz T) . sigma.
Mat2 interaction_deviation(const ArclengthCurve& curve, const NoiseSample& noise,
                           const InteractionOptions& opt = {});

/// Zero-noise propagation that also integrates r(t) = integral of U^dag sz U dt,
/// returning r at `n_points` uniformly spaced times.
std::vector<Vec3> reconstruct_curve(const ControlFields& fields, int n_points,
                                    const PropagateOptions& opt = {});

}  // namespace scqc
