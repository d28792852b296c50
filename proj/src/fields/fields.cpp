#include "scqc/fields/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "scqc/errors.hpp"

namespace scqc {

double FieldValue::omega_x() const { return omega * std::cos(phi); }
double FieldValue::omega_y() const { return omega * std::sin(phi); }

namespace {

std::vector<double> sorted_interior(std::vector<double> v, double duration) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (x > 0.0 && x < duration && (out.empty() || x > out.back())) out.push_back(x);
    return out;
}

double eval_sided(const PiecewiseChebyshev& f, double t, Side side) {
    return side == Side::Left ? f.left_limit(t) : f(t);
}

}  // namespace

ControlFields::ControlFields(double duration, Evaluator eval, std::vector<double> knots,
                             std::vector<double> discontinuities)
    : duration_(duration),
      eval_(std::move(eval)),
      knots_(sorted_interior(std::move(knots), duration)),
      jumps_(sorted_interior(std::move(discontinuities), duration)) {
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw ValidationError("control fields: duration must be positive and finite");
}

ControlFields ControlFields::constant(double omega, double phi, double delta, double duration) {
    return ControlFields(
        duration, [=](double, Side) { return FieldValue{omega, phi, delta}; }, {}, {});
}

FieldValue ControlFields::polar(double t, Side side) const {
    FieldValue v = eval_(t, side);
    if (v.omega < 0.0) {
        v.omega = -v.omega;
        v.phi += std::numbers::pi;
    }
    return v;
}

Mat2 ControlFields::hamiltonian(double t, const NoiseSample& noise, Side side) const {
    const FieldValue v = eval_(t, side);
    const double amp = 0.5 * (1.0 + noise.epsilon) * v.omega;
    const double dz = 0.5 * (v.delta + noise.delta_z / duration_);
    Mat2 h;
    h << cplx(dz, 0.0), amp * cplx(std::cos(v.phi), -std::sin(v.phi)),
        amp * cplx(std::cos(v.phi), std::sin(v.phi)), cplx(-dz, 0.0);
    return h;
}

GaugeTransform::GaugeTransform(std::function<double(double)> value,
                               std::function<double(double)> rate, nlohmann::json description)
    : value_(std::move(value)), rate_(std::move(rate)), description_(std::move(description)) {}

GaugeTransform GaugeTransform::linear(double total, double offset0, double duration) {
    if (!std::isfinite(total) || !std::isfinite(offset0))
        throw ValidationError("gauge: slope and offset0 must be finite");
    const double rate = total / duration;
    return GaugeTransform([=](double t) { return offset0 + rate * t; },
                          [=](double) { return rate; },
                          {{"kind", "linear"}, {"slope", total}, {"offset0", offset0}});
}

GaugeTransform GaugeTransform::sampled(std::vector<double> values, double duration) {
    if (values.size() < 2) throw ValidationError("gauge: sampled gauge needs at least 2 values");
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("gauge: sampled values must be finite");
    const int n = static_cast<int>(values.size());
    const double h = duration / (n - 1);
    std::vector<double> slope(n);
    for (int k = 0; k < n; ++k) {
        if (k == 0)
            slope[k] = (values[1] - values[0]) / h;
        else if (k == n - 1)
            slope[k] = (values[n - 1] - values[n - 2]) / h;
        else
            slope[k] = (values[k + 1] - values[k - 1]) / (2.0 * h);
    }
    auto cell = [n, h](double t) {
        const int k = std::clamp(static_cast<int>(std::floor(t / h)), 0, n - 2);
        return std::pair<int, double>{k, std::clamp(t / h - k, 0.0, 1.0)};
    };
    nlohmann::json desc = {{"kind", "sampled"}, {"values", values}};
    auto vals = std::make_shared<std::vector<double>>(std::move(values));
    auto slopes = std::make_shared<std::vector<double>>(std::move(slope));
    auto value = [vals, slopes, cell, h](double t) {
        const auto [k, s] = cell(t);
        const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
        const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
        return h00 * (*vals)[k] + h10 * h * (*slopes)[k] + h01 * (*vals)[k + 1] +
               h11 * h * (*slopes)[k + 1];
    };
    auto rate = [vals, slopes, cell, h](double t) {
        const auto [k, s] = cell(t);
        const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
        const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
        return (d00 * (*vals)[k] + d01 * (*vals)[k + 1]) / h + d10 * (*slopes)[k] +
               d11 * (*slopes)[k + 1];
    };
    return GaugeTransform(value, rate, desc);
}

GaugeTransform GaugeTransform::identity() {
    return GaugeTransform([](double) { return 0.0; }, [](double) { return 0.0; },
                          {{"kind", "linear"}, {"slope", 0.0}, {"offset0", 0.0}});
}

GaugeTransform GaugeTransform::from_json(const nlohmann::json& j, double duration) {
    if (!j.is_object() || !j.contains("kind"))
        throw ValidationError("gauge: expected an object with a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        const double slope = j.value("slope", 0.0);
        const double offset = j.value("offset0", 0.0);
        return linear(slope, offset, duration);
    }
    if (kind == "sampled") {
        if (!j.contains("values") || !j.at("values").is_array())
            throw ValidationError("gauge: sampled gauge needs a \"values\" array");
        return sampled(j.at("values").get<std::vector<double>>(), duration);
    }
    throw ValidationError("gauge: unknown kind \"" + kind + "\"");
}

FieldGauge FieldGauge::zero_detuning(double phi0) {
    FieldGauge g;
    g.phi0 = phi0;
    return g;
}

FieldGauge FieldGauge::with_detuning(double delta) {
    FieldGauge g;
    g.detuning_value = delta;
    return g;
}

FieldGauge FieldGauge::with_detuning(std::function<double(double)> delta) {
    FieldGauge g;
    g.constant_detuning = false;
    g.detuning = std::move(delta);
    return g;
}

FieldGauge FieldGauge::with_phase(std::function<double(double)> phi) {
    FieldGauge g;
    g.phase = std::move(phi);
    return g;
}

ControlFields fields_from_frenet(const FrenetTrack& track, const FieldGauge& gauge) {
    const double duration = track.total_time();
    const std::vector<double> breaks = track.breakpoints();
    const auto kappa = std::make_shared<PiecewiseChebyshev>(track.curvature_fit());
    const auto tau = std::make_shared<PiecewiseChebyshev>(track.torsion_fit());
    const std::vector<FrameCorner> corners = track.corners();

    std::vector<double> knots = kappa->knots();
    for (double k : tau->knots()) knots.push_back(k);
    std::vector<double> jumps;
    for (const auto& c : corners) jumps.push_back(c.time);

    if (gauge.phase) {
        ChebFitOptions opt;
        const auto phi = std::make_shared<PiecewiseChebyshev>(
            PiecewiseChebyshev::fit(gauge.phase, 0.0, duration, breaks, opt));
        // A kink or jump away from the known breakpoints forces the fit down to
        // its minimum panel width.
        for (const auto& p : phi->panels()) {
            if (p.b - p.a < 1e-7 * duration) {
                std::ostringstream os;
                os << "supplied phase is not differentiable near t = " << 0.5 * (p.a + p.b);
                throw ValidationError(os.str());
            }
        }
        for (double k : phi->knots()) knots.push_back(k);
        return ControlFields(
            duration,
            [kappa, tau, phi](double t, Side side) {
                const double dphi = phi->derivative(t);
                return FieldValue{eval_sided(*kappa, t, side), eval_sided(*phi, t, side),
                                  dphi - eval_sided(*tau, t, side)};
            },
            knots, jumps);
    }

    auto jump_total = [corners](double t, Side side) {
        double s = 0.0;
        for (const auto& c : corners)
            if (c.time < t || (c.time == t && side == Side::Right)) s += c.angle;
        return s;
    };
    const auto twist = std::make_shared<PiecewiseChebyshev>(tau->integral(0.0));
    const double phi0 = gauge.phi0;

    if (gauge.constant_detuning) {
        const double delta = gauge.detuning_value;
        return ControlFields(
            duration,
            [kappa, twist, jump_total, phi0, delta](double t, Side side) {
                return FieldValue{eval_sided(*kappa, t, side),
                                  phi0 + (*twist)(t) + delta * t + jump_total(t, side), delta};
            },
            knots, jumps);
    }

    const auto delta = std::make_shared<PiecewiseChebyshev>(
        PiecewiseChebyshev::fit(gauge.detuning, 0.0, duration, breaks));
    const auto delta_int = std::make_shared<PiecewiseChebyshev>(delta->integral(0.0));
    for (double k : delta->knots()) knots.push_back(k);
    return ControlFields(
        duration,
        [kappa, twist, delta, delta_int, jump_total, phi0](double t, Side side) {
            return FieldValue{eval_sided(*kappa, t, side),
                              phi0 + (*twist)(t) + (*delta_int)(t) + jump_total(t, side),
                              eval_sided(*delta, t, side)};
        },
        knots, jumps);
}

ControlFields apply_gauge(const ControlFields& fields, const GaugeTransform& gauge) {
    std::vector<double> knots = fields.knots();
    return ControlFields(
        fields.duration(),
        [fields, gauge](double t, Side side) {
            FieldValue v = fields(t, side);
            v.phi += gauge(t);
            v.delta += gauge.rate(t);
            return v;
        },
        knots, fields.discontinuities());
}

Mat3 lab_frame(double phi) {
    Mat3 lab;
    lab.col(0) = Vec3::UnitZ();
    lab.col(1) = Vec3(-std::sin(phi), std::cos(phi), 0.0);
    lab.col(2) = Vec3(-std::cos(phi), -std::sin(phi), 0.0);
    return lab;
}

Mat3 canonical_rotation(const FrenetTrack& track, double phi0) {
    return lab_frame(phi0) * track.frame(0.0).matrix().transpose();
}

Mat2 frame_gate(const FrenetTrack& track, const ControlFields& fields) {
    const double tt = fields.duration();
    const Mat3 r = canonical_rotation(track, fields(0.0).phi) *
                   track.frame(track.total_time(), Side::Left).matrix() *
                   lab_frame(fields(tt, Side::Left).phi).transpose();
    return unitary_from_rotation(r);
}

Mat2 unitary_from_rotation(const Mat3& r) {
    // U = exp(-i theta n.sigma / 2) rotates vectors by R_n(theta) under U (.) U^dag,
    // so its adjoint action U^dag (.) U is the transpose.
    const Eigen::AngleAxisd aa(Mat3(r.transpose()));
    return rotation(aa.angle() * aa.axis());
}

PulseTable pulse_table(const ControlFields& fields, int n_points) {
    if (n_points < 2) throw ValidationError("pulse table: need at least 2 points");
    PulseTable p;
    const double duration = fields.duration();
    for (int k = 0; k < n_points; ++k) {
        const double t = k == n_points - 1 ? duration : duration * k / (n_points - 1);
        const FieldValue v = fields(t, k == n_points - 1 ? Side::Left : Side::Right);
        p.t.push_back(t);
        p.omega_x.push_back(v.omega_x());
        p.omega_y.push_back(v.omega_y());
        p.delta.push_back(v.delta);
    }
    return p;
}

void export_pulse_table(const PulseTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "t,omega_x,omega_y,delta\n";
    char buf[128];
    for (std::size_t k = 0; k < table.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", table.t[k], table.omega_x[k],
                      table.omega_y[k], table.delta[k]);
        out << buf;
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void export_pulse_table(const ControlFields& fields, const std::filesystem::path& path,
                        int n_points) {
    export_pulse_table(pulse_table(fields, n_points), path);
}

PulseTable import_pulse_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,omega_x,omega_y,delta")
        throw ValidationError(path.string() + ":1: expected header t,omega_x,omega_y,delta");
    PulseTable p;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double v[4];
        const char* s = line.c_str();
        for (int i = 0; i < 4; ++i) {
            char* end = nullptr;
            v[i] = std::strtod(s, &end);
            if (end == s || (i < 3 && *end != ',') || !std::isfinite(v[i]))
                throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                                      ": malformed row, column " + std::to_string(i + 1));
            s = end + 1;
        }
        p.t.push_back(v[0]);
        p.omega_x.push_back(v[1]);
        p.omega_y.push_back(v[2]);
        p.delta.push_back(v[3]);
    }
    if (p.t.size() < 2) throw ValidationError(path.string() + ": need at least 2 rows");
    return p;
}

ControlFields fields_from_table(const PulseTable& table) {
    const auto tab = std::make_shared<PulseTable>(table);
    const std::size_t n = tab->t.size();
    if (n < 2) throw ValidationError("pulse table: need at least 2 rows");
    for (std::size_t k = 1; k < n; ++k)
        if (!(tab->t[k] > tab->t[k - 1])) throw ValidationError("pulse table: times must increase");
    if (tab->t.front() != 0.0) throw ValidationError("pulse table: first row must have t = 0");
    return ControlFields(
        tab->t.back(),
        [tab](double t, Side side) {
            const auto& ts = tab->t;
            auto it = side == Side::Left ? std::lower_bound(ts.begin(), ts.end(), t)
                                         : std::upper_bound(ts.begin(), ts.end(), t);
            std::size_t k = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
            k = std::min(k, ts.size() - 2);
            const double s = (t - ts[k]) / (ts[k + 1] - ts[k]);
            auto lerp = [&](const std::vector<double>& v) { return v[k] + s * (v[k + 1] - v[k]); };
            const double ox = lerp(tab->omega_x);
            const double oy = lerp(tab->omega_y);
            return FieldValue{std::hypot(ox, oy), std::atan2(oy, ox), lerp(tab->delta)};
        },
        tab->t, {});
}

nlohmann::json to_json(const FrenetProfile& p) {
    auto vecs = [](const std::vector<Vec3>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const Vec3& x : v) a.push_back({x.x(), x.y(), x.z()});
        return a;
    };
    nlohmann::json j;
    j["t"] = p.t_grid;
    j["kappa"] = p.kappa;
    j["tau"] = p.tau;
    j["tangent"] = vecs(p.tangent);
    j["normal"] = vecs(p.normal);
    j["binormal"] = vecs(p.binormal);
    j["inflection_times"] = p.inflection_times;
    nlohmann::json undefined = nlohmann::json::array();
    for (const auto& [a, b] : p.torsion_undefined) undefined.push_back({a, b});
    j["torsion_undefined"] = undefined;
    return j;
}

}  // namespace scqc
