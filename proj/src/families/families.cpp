#include <numbers>

#include "scqc/errors.hpp"
#include "scqc/families/families.hpp"

namespace scqc {

namespace {

constexpr double kPi = std::numbers::pi;

// Fourier counterexamples: unit-speed tangents on [0, 2 pi] from the origin.
// Their target is whatever gate the frames produce at zero noise.
Family from_tangent(const std::string& name, const std::array<std::string, 3>& tangent) {
    nlohmann::json spec = tangent_spec({{0.0, 2.0 * kPi, tangent}});
    spec["family"] = name;
    Family f{.name = name, .curve = curve_from_spec(spec), .spec = spec, .params = nlohmann::json::object()};
    const auto track = FrenetTrack::build(arclength_reparameterize(f.curve));
    f.target = frame_gate(track, fields_from_frenet(track));
    f.spec["params"] = f.params;
    return f;
}

}  // namespace

Family parity_family() {
    nlohmann::json spec = analytic_spec({"sin(l/2)", "sin(l)*cos(l)^2", "sin(l)"}, 0.0, 4.0 * kPi);
    spec["family"] = "parity";
    spec["params"] = nlohmann::json::object();
    return Family{.name = "parity", .curve = curve_from_spec(spec), .spec = spec,
                  .params = nlohmann::json::object()};
}

Family eq20_family() { return from_tangent("eq20", {"sin(t)*cos(t)", "sin(t)^2", "cos(t)"}); }

Family eq21_family() {
    return from_tangent("eq21", {"(sqrt(2)*cos(2*t) - 2*cos(t))/4", "-(sqrt(2)*sin(2*t) + 2*sin(t))/4",
                                 "sqrt(sqrt(2)*cos(3*t) + 5/2)/2"});
}

Family eq22_family() {
    return from_tangent("eq22", {"sin(t)*cos(2*t)", "sin(t)*sin(2*t)", "cos(t)"});
}

std::vector<std::string> family_names() { return {"parity", "eq20", "eq21", "eq22", "bessel", "tilted"}; }

Family make_family(const std::string& name, const FamilyOptions& opt) {
    if (name == "parity") return parity_family();
    if (name == "eq20") return eq20_family();
    if (name == "eq21") return eq21_family();
    if (name == "eq22") return eq22_family();
    if (name == "bessel") return bessel_family(opt.index, opt.duration, opt.q_rule);
    if (name == "tilted") return tilted_circle_family(opt.theta, opt.duration);
    throw ValidationError("unknown family \"" + name +
                          "\" (expected parity, eq20, eq21, eq22, bessel or tilted)");
}

Pulse build_pulse(const Family& family, const FrenetOptions& opt) {
    ArclengthCurve arc = arclength_reparameterize(family.curve);
    FrenetTrack track = FrenetTrack::build(arc, opt);
    ControlFields fields = apply_gauge(fields_from_frenet(track, family.field_gauge), family.gauge);
    const Mat3 canonical = canonical_rotation(track, fields(0.0).phi);
    return Pulse{std::move(arc), std::move(track), std::move(fields), family.target, canonical};
}

ArclengthCurve Pulse::canonical_curve() const {
    return arclength_reparameterize(arclength.curve().rotated(canonical));
}

}  // namespace scqc
