#include "scqc/cli/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "scqc/errors.hpp"
#include "scqc/families/families.hpp"
#include "scqc/robustness/robustness.hpp"
#include "scqc/sim/sim.hpp"
#include "scqc/sim/sweep.hpp"

#ifndef SCQC_VERSION
#define SCQC_VERSION "0.0.0"
#endif

namespace scqc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Config {
    std::string command;
    // curve source
    std::string curve_path;
    std::string family;
    int index = 2;
    double theta = std::numbers::pi / 2.0;
    double duration = 1.0;
    std::string q_rule = "central";
    std::string gauge;  // JSON text or path
    // noise
    double epsilon = 0.0;
    double delta_z = 0.0;
    std::string eps_range = "-0.4:0.4";
    std::string dz_range = "-0.4:0.4";
    int grid = 81;
    std::optional<int> average_z;
    // output
    std::string out;
    std::string svg;
    int samples = 1024;
    int jobs = 1;
    double tol = 1e-6;
    std::uint64_t seed = 0;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

void require_finite_positive(double v, const std::string& name) {
    if (!std::isfinite(v) || !(v > 0.0)) throw ValidationError(name + " must be positive and finite");
}

std::pair<double, double> parse_range(const std::string& text, const std::string& name) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ValidationError(name + ": expected lo:hi, got \"" + text + "\"");
    try {
        std::size_t used = 0;
        const double lo = std::stod(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing");
        const std::string rest = text.substr(colon + 1);
        const double hi = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("trailing");
        if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw std::invalid_argument("order");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw ValidationError(name + ": expected finite lo:hi with lo <= hi, got \"" + text + "\"");
    }
}

json config_json(const Config& c) {
    json j = {{"command", c.command}};
    if (!c.curve_path.empty()) j["curve"] = c.curve_path;
    if (!c.family.empty()) {
        j["family"] = c.family;
        j["index"] = c.index;
        j["theta"] = c.theta;
        j["duration"] = c.duration;
        j["q_rule"] = c.q_rule;
    }
    if (!c.gauge.empty()) j["gauge"] = c.gauge;
    if (c.command == "simulate") j["noise"] = {{"epsilon", c.epsilon}, {"delta_z", c.delta_z}};
    if (c.command == "sweep") {
        j["eps_range"] = c.eps_range;
        j["dz_range"] = c.dz_range;
        j["grid"] = c.grid;
        j["average_z"] = c.average_z ? *c.average_z : 0;
        j["jobs"] = c.jobs;
        j["seed"] = c.seed;
    }
    if (c.command == "fields") j["samples"] = c.samples;
    if (c.command == "check") j["tolerance"] = c.tol;
    if (!c.out.empty()) j["out"] = c.out;
    if (!c.svg.empty()) j["svg"] = c.svg;
    return j;
}

json provenance(const Config& c) { return {{"tool", "scqc"}, {"version", version()}, {"config", config_json(c)}}; }

void ensure_parent(const fs::path& path) {
    const fs::path parent = path.parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw IoError("write failed for " + path.string());
}

Mat2 gauged_target(const Mat2& target, const GaugeTransform& g, double duration) {
    return z_rotation(g(duration)) * target * z_rotation(-g(0.0));
}

struct Loaded {
    json spec;
    Family family;
    Pulse pulse;
};

Loaded load(const Config& c) {
    if (c.curve_path.empty() == c.family.empty())
        throw ValidationError("give exactly one of --curve or --family");
    const json spec = c.family.empty() ? read_curve_spec(c.curve_path) : json();
    const Family f = [&] {
        if (c.family.empty()) return Family{.name = "curve", .curve = curve_from_spec(spec), .spec = spec, .params = json::object()};
        require_finite_positive(c.duration, "--duration");
        FamilyOptions opt;
        opt.index = c.index;
        opt.theta = c.theta;
        opt.duration = c.duration;
        opt.q_rule = c.q_rule == "exact" ? QRule::ExactClosure : QRule::CentralDifference;
        return make_family(c.family, opt);
    }();
    Pulse p = build_pulse(f);
    if (c.curve_path.size()) p.target = frame_gate(p.track, p.fields);  // natural gate of the curve
    if (!c.gauge.empty()) {
        json gj;
        const std::string text = c.gauge;
        if (text.find('{') != std::string::npos) {
            try {
                gj = json::parse(text);
            } catch (const json::parse_error& e) {
                throw ValidationError(std::string("--gauge: ") + e.what());
            }
        } else {
            gj = read_curve_spec(text);
        }
        const double T = p.fields.duration();
        const GaugeTransform g = GaugeTransform::from_json(gj, T);
        p.fields = apply_gauge(p.fields, g);
        p.target = gauged_target(p.target, g, T);
        p.canonical = canonical_rotation(p.track, p.fields(0.0).phi);
    }
    return {c.family.empty() ? spec : f.spec, f, std::move(p)};
}

json matrix_json(const Mat2& m) {
    json rows = json::array();
    for (int r = 0; r < 2; ++r) {
        json row = json::array();
        for (int k = 0; k < 2; ++k) row.push_back({m(r, k).real(), m(r, k).imag()});
        rows.push_back(row);
    }
    return rows;
}

int cmd_family(const Config& c, std::ostream& out) {
    Config fc = c;
    json spec = load(fc).spec;
    spec["provenance"] = provenance(c);
    const std::string text = spec.dump(2) + "\n";
    if (c.out.empty())
        out << text;
    else
        write_text(c.out, text);
    return kExitOk;
}

int cmd_fields(const Config& c, std::ostream& out) {
    if (c.samples < 2) throw ValidationError("--samples must be at least 2");
    const Loaded l = load(c);
    const fs::path dir = c.out.empty() ? fs::path("fields_out") : fs::path(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    const PulseTable table = pulse_table(l.pulse.fields, c.samples);
    export_pulse_table(table, dir / "pulse.csv");

    std::string csv = "t,omega,phi,delta\n";
    char buf[128];
    const double T = l.pulse.fields.duration();
    for (int k = 0; k < c.samples; ++k) {
        const double t = T * k / (c.samples - 1);
        const FieldValue v = l.pulse.fields(t, k + 1 == c.samples ? Side::Left : Side::Right);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, v.omega, v.phi, v.delta);
        csv += buf;
    }
    write_text(dir / "fields.csv", csv);

    json j;
    j["provenance"] = provenance(c);
    j["duration"] = T;
    j["target"] = matrix_json(l.pulse.target);
    j["profile"] = to_json(frenet_profile(l.pulse.track, c.samples));
    j["files"] = {(dir / "pulse.csv").string(), (dir / "fields.csv").string()};
    write_text(dir / "profile.json", j.dump(2) + "\n");
    out << "wrote " << (dir / "pulse.csv").string() << ", " << (dir / "fields.csv").string() << ", "
        << (dir / "profile.json").string() << "\n";
    return kExitOk;
}

int cmd_check(const Config& c, std::ostream& out) {
    require_finite_positive(c.tol, "--tol");
    const Loaded l = load(c);
    RobustnessOptions opt;
    opt.tolerance = c.tol;
    const RobustnessReport r = robustness_report(l.pulse.arclength, opt);
    const Closability cl = closability_check(tangent_of(l.pulse.track));

    auto line = [&](const char* name, bool ok, double value) {
        out << name << ": " << (ok ? "PASS" : "FAIL") << " (" << num(value) << ")\n";
    };
    line("closure", r.closure_ok(), r.closure.norm() / r.total_time);
    line("tangent-area", r.tangent_area_ok(), r.tangent_area.norm());
    line("projected-area", r.projected_area_ok(), r.projected_area.norm() / (r.total_time * r.total_time));
    out << "closability: " << (cl.closable ? "PASS" : "FAIL")
        << (cl.closable ? (cl.interior ? " (interior)" : " (boundary only)") : "") << "\n";
    out << "doubly robust: " << (r.closure_ok() && r.tangent_area_ok() ? "yes" : "no") << "\n";

    if (!c.out.empty()) {
        json j = to_json(r);
        j["closability"] = to_json(cl);
        j["provenance"] = provenance(c);
        write_text(c.out, j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_simulate(const Config& c, std::ostream& out) {
    if (!std::isfinite(c.epsilon) || !std::isfinite(c.delta_z))
        throw ValidationError("--eps and --dz must be finite");
    const Loaded l = load(c);
    const GateReport g = gate_report(l.pulse.fields, l.pulse.target, {c.epsilon, c.delta_z});
    json j = to_json(g);
    j["provenance"] = provenance(c);
    const std::string text = j.dump(2) + "\n";
    if (c.out.empty())
        out << text;
    else
        write_text(c.out, text);
    return kExitOk;
}

int cmd_sweep(const Config& c, std::ostream& out, std::ostream& err) {
    if (c.grid < 1) throw ValidationError("--grid must be at least 1");
    if (c.average_z && *c.average_z < 1) throw ValidationError("--average-z must be at least 1");
    const auto [e0, e1] = parse_range(c.eps_range, "--eps-range");
    const auto [d0, d1] = parse_range(c.dz_range, "--dz-range");
    const Loaded l = load(c);

    SweepSpec spec;
    spec.epsilon_axis = linspace(e0, e1, c.grid);
    spec.delta_axis = linspace(d0, d1, c.grid);
    spec.average_z = c.average_z.value_or(0);
    spec.jobs = c.jobs;
    const SweepGrid grid = sweep(l.pulse.fields, l.pulse.target, spec, provenance(c));

    const fs::path csv_path = c.out.empty() ? fs::path("sweep.csv") : fs::path(c.out);
    fs::path json_path = csv_path;
    json_path.replace_extension(".json");
    write_text(csv_path, to_csv(grid));
    write_text(json_path, to_json(grid).dump(2) + "\n");
    out << "wrote " << csv_path.string() << ", " << json_path.string();
    if (!c.svg.empty()) {
        write_text(c.svg, to_svg(grid, l.family.name));
        out << ", " << c.svg;
    }
    out << "\n";

    const std::size_t bad = grid.invalid_count();
    if (bad > 0) {
        err << bad << " of " << grid.infidelity.size() << " cells failed";
        for (const auto& e : grid.errors)
            if (!e.empty()) {
                err << "; first: " << e;
                break;
            }
        err << "\n";
        if (bad == grid.infidelity.size()) return kExitNumeric;
    }
    return kExitOk;
}

void add_source(CLI::App* sub, Config& c) {
    sub->add_option("--curve", c.curve_path, "curve spec JSON file");
    sub->add_option("--family", c.family, "parity|eq20|eq21|eq22|bessel|tilted");
    sub->add_option("--index", c.index, "Bessel root index (>= 2)");
    sub->add_option("--theta", c.theta, "tilted-circle rotation angle");
    sub->add_option("--duration", c.duration, "gate time for bessel / tilted");
    sub->add_option("--q-rule", c.q_rule, "Bessel q: central | exact")
        ->check(CLI::IsMember({"central", "exact"}));
    sub->add_option("--gauge", c.gauge, "gauge JSON (inline or file)");
}

}  // namespace

std::string version() { return SCQC_VERSION; }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Config c;
    if (const char* env = std::getenv("SCQC_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !std::isfinite(v) || v <= 0.0) {
            err << "error: SCQC_TOL must be a positive number\n";
            return kExitValidation;
        }
        c.tol = v;
    }

    CLI::App app{"Space-curve quantum control: curves, pulses, robustness checks and noise sweeps"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    auto* family = app.add_subcommand("family", "emit a family's curve spec JSON");
    family->add_option("name", c.family, "parity|eq20|eq21|eq22|bessel|tilted")->required();
    family->add_option("--index", c.index, "Bessel root index (>= 2)");
    family->add_option("--theta", c.theta, "tilted-circle rotation angle");
    family->add_option("--duration", c.duration, "gate time for bessel / tilted");
    family->add_option("--q-rule", c.q_rule, "Bessel q: central | exact")
        ->check(CLI::IsMember({"central", "exact"}));
    family->add_option("--out", c.out, "output file (default stdout)");

    auto* fields = app.add_subcommand("fields", "extract control fields and the Frenet profile");
    add_source(fields, c);
    fields->add_option("--samples", c.samples, "rows in the exported tables");
    fields->add_option("--out", c.out, "output directory (default fields_out)");

    auto* check = app.add_subcommand("check", "robustness conditions and closability");
    add_source(check, c);
    check->add_option("--tol", c.tol, "certification tolerance (env SCQC_TOL)");
    check->add_option("--out", c.out, "JSON report file");

    auto* simulate = app.add_subcommand("simulate", "propagate one noise sample");
    add_source(simulate, c);
    simulate->add_option("--eps", c.epsilon, "drive amplitude error");
    simulate->add_option("--dz", c.delta_z, "detuning error times gate time");
    simulate->add_option("--out", c.out, "JSON report file (default stdout)");

    auto* sweep_cmd = app.add_subcommand("sweep", "infidelity over an (eps, dz) grid");
    add_source(sweep_cmd, c);
    sweep_cmd->add_option("--eps-range", c.eps_range, "lo:hi");
    sweep_cmd->add_option("--dz-range", c.dz_range, "lo:hi (detuning error times gate time)");
    sweep_cmd->add_option("--grid", c.grid, "points per axis");
    std::string avg_text;
    auto* avg = sweep_cmd->add_option("--average-z", avg_text, "average over N z-rotations (default 16)")
                    ->expected(0, 1);
    sweep_cmd->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
    sweep_cmd->add_option("--seed", c.seed, "recorded for provenance; averaging angles are deterministic");
    sweep_cmd->add_option("--out", c.out, "CSV path (JSON written alongside)");
    sweep_cmd->add_option("--svg", c.svg, "heatmap SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (avg->count() > 0) {
            if (avg_text.empty()) {
                c.average_z = 16;
            } else {
                try {
                    c.average_z = std::stoi(avg_text);
                } catch (const std::logic_error&) {
                    throw ValidationError("--average-z: expected an integer, got \"" + avg_text + "\"");
                }
            }
        }
        if (*family) {
            c.command = "family";
            return cmd_family(c, out);
        }
        if (*fields) {
            c.command = "fields";
            return cmd_fields(c, out);
        }
        if (*check) {
            c.command = "check";
            return cmd_check(c, out);
        }
        if (*simulate) {
            c.command = "simulate";
            return cmd_simulate(c, out);
        }
        c.command = "sweep";
        return cmd_sweep(c, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace scqc::cli
