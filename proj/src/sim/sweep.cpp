#include "scqc/sim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "scqc/errors.hpp"

namespace scqc {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::size_t SweepGrid::invalid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 0));
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw ValidationError("linspace: need at least one point");
    if (n == 1) return {lo};
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1);
    return v;
}

double averaged_infidelity(const ControlFields& fields, const Mat2& target,
                           const NoiseSample& noise, int angles, const PropagateOptions& opt) {
    if (angles <= 0) return infidelity(propagate(fields, noise, opt).matrix, target);
    double sum = 0.0;
    for (int k = 0; k < angles; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / angles;
        const ControlFields g =
            apply_gauge(fields, GaugeTransform::linear(phi, 0.0, fields.duration()));
        sum += infidelity(propagate(g, noise, opt).matrix, z_rotation(phi) * target);
    }
    return sum / angles;
}

SweepGrid sweep(const ControlFields& fields, const Mat2& target, const SweepSpec& spec,
                nlohmann::json metadata) {
    if (spec.epsilon_axis.empty() || spec.delta_axis.empty())
        throw ValidationError("sweep: noise axes must be non-empty");
    for (double x : spec.epsilon_axis)
        if (!std::isfinite(x)) throw ValidationError("sweep: epsilon axis must be finite");
    for (double x : spec.delta_axis)
        if (!std::isfinite(x)) throw ValidationError("sweep: delta axis must be finite");
    if (spec.average_z < 0) throw ValidationError("sweep: average_z must be non-negative");

    SweepGrid g;
    g.epsilon_axis = spec.epsilon_axis;
    g.delta_axis = spec.delta_axis;
    const std::size_t ne = g.epsilon_axis.size();
    const std::size_t cells = ne * g.delta_axis.size();
    g.infidelity.assign(cells, std::nan(""));
    g.valid.assign(cells, 0);
    g.errors.assign(cells, "");
    g.metadata = std::move(metadata);
    g.metadata["average_z"] = spec.average_z;

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t idx = next++; idx < cells; idx = next++) {
            const NoiseSample noise{g.epsilon_axis[idx % ne], g.delta_axis[idx / ne]};
            try {
                g.infidelity[idx] =
                    averaged_infidelity(fields, target, noise, spec.average_z, spec.propagate);
                g.valid[idx] = 1;
            } catch (const std::exception& e) {
                g.errors[idx] = e.what();
            }
        }
    };
    int jobs = spec.jobs > 0 ? spec.jobs : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::clamp(jobs, 1, static_cast<int>(std::min<std::size_t>(cells, 256)));
    if (jobs == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < jobs; ++k) pool.emplace_back(work);
    }
    return g;
}

std::string to_csv(const SweepGrid& grid) {
    std::ostringstream os;
    os << "epsilon,delta_z,infidelity\n";
    const std::size_t ne = grid.epsilon_axis.size();
    for (std::size_t i = 0; i < grid.delta_axis.size(); ++i)
        for (std::size_t j = 0; j < ne; ++j) {
            const std::size_t idx = i * ne + j;
            os << fmt17(grid.epsilon_axis[j]) << ',' << fmt17(grid.delta_axis[i]) << ','
               << (grid.valid[idx] ? fmt17(grid.infidelity[idx]) : std::string("invalid")) << '\n';
        }
    return os.str();
}

void write_csv(const SweepGrid& grid, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << to_csv(grid);
    if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json to_json(const SweepGrid& grid) {
    nlohmann::json j;
    j["epsilon_axis"] = grid.epsilon_axis;
    j["delta_axis"] = grid.delta_axis;
    nlohmann::json rows = nlohmann::json::array();
    const std::size_t ne = grid.epsilon_axis.size();
    for (std::size_t i = 0; i < grid.delta_axis.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < ne; ++k) {
            const std::size_t idx = i * ne + k;
            if (grid.valid[idx])
                row.push_back(grid.infidelity[idx]);
            else
                row.push_back(nullptr);
        }
        rows.push_back(row);
    }
    j["infidelity"] = rows;
    j["layout"] = "infidelity[i_delta][j_epsilon]";
    nlohmann::json bad = nlohmann::json::array();
    for (std::size_t idx = 0; idx < grid.valid.size(); ++idx)
        if (!grid.valid[idx])
            bad.push_back({{"i_delta", idx / ne}, {"j_epsilon", idx % ne}, {"error", grid.errors[idx]}});
    j["invalid_cells"] = bad;
    j["metadata"] = grid.metadata;
    return j;
}

std::string to_svg(const SweepGrid& grid, const std::string& title) {
    const std::size_t ne = grid.epsilon_axis.size();
    const std::size_t nd = grid.delta_axis.size();
    double lo = 0.0, hi = -1e300;
    bool any = false;
    for (std::size_t idx = 0; idx < grid.infidelity.size(); ++idx) {
        if (!grid.valid[idx]) continue;
        const double v = std::log10(std::max(grid.infidelity[idx], 1e-16));
        lo = any ? std::min(lo, v) : v;
        hi = any ? std::max(hi, v) : v;
        any = true;
    }
    if (!any || hi <= lo) hi = lo + 1.0;

    // Viridis-like ramp through five stops.
    static const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                       {94, 201, 98}, {253, 231, 37}};
    auto colour = [&](double v) {
        const double s = std::clamp((v - lo) / (hi - lo), 0.0, 1.0) * 4.0;
        const int k = std::min(3, static_cast<int>(s));
        const double f = s - k;
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                      static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                      static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                      static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
        return std::string(buf);
    };

    const double left = 70, top = 40, size = 400, bar = 20;
    const double cw = size / ne, ch = size / nd;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + size + 120 << "\" height=\""
       << top + size + 60 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!title.empty()) os << "<text x=\"" << left << "\" y=\"20\">" << title << "</text>\n";
    for (std::size_t i = 0; i < nd; ++i)
        for (std::size_t j = 0; j < ne; ++j) {
            const std::size_t idx = i * ne + j;
            const std::string fill =
                grid.valid[idx] ? colour(std::log10(std::max(grid.infidelity[idx], 1e-16))) : "#999999";
            // Row 0 (smallest delta) at the bottom.
            os << "<rect x=\"" << fmt("%.3f", left + j * cw) << "\" y=\""
               << fmt("%.3f", top + (nd - 1 - i) * ch) << "\" width=\"" << fmt("%.3f", cw + 0.05)
               << "\" height=\"" << fmt("%.3f", ch + 0.05) << "\" fill=\"" << fill << "\"/>\n";
        }
    os << "<text x=\"" << left + size / 2 - 20 << "\" y=\"" << top + size + 35 << "\">epsilon</text>\n";
    os << "<text x=\"15\" y=\"" << top + size / 2 << "\">delta_z T</text>\n";
    os << "<text x=\"" << left << "\" y=\"" << top + size + 16 << "\">"
       << fmt("%.3g", grid.epsilon_axis.front()) << "</text>\n";
    os << "<text x=\"" << left + size - 30 << "\" y=\"" << top + size + 16 << "\">"
       << fmt("%.3g", grid.epsilon_axis.back()) << "</text>\n";
    os << "<text x=\"30\" y=\"" << top + size << "\">" << fmt("%.3g", grid.delta_axis.front())
       << "</text>\n";
    os << "<text x=\"30\" y=\"" << top + 10 << "\">" << fmt("%.3g", grid.delta_axis.back())
       << "</text>\n";
    for (int k = 0; k < 50; ++k) {
        const double v = lo + (hi - lo) * (k + 0.5) / 50.0;
        os << "<rect x=\"" << left + size + 20 << "\" y=\"" << fmt("%.3f", top + size - (k + 1) * size / 50.0)
           << "\" width=\"" << bar << "\" height=\"" << fmt("%.3f", size / 50.0 + 0.05) << "\" fill=\""
           << colour(v) << "\"/>\n";
    }
    os << "<text x=\"" << left + size + 45 << "\" y=\"" << top + 10 << "\">" << fmt("%.2f", hi) << "</text>\n";
    os << "<text x=\"" << left + size + 45 << "\" y=\"" << top + size << "\">" << fmt("%.2f", lo)
       << "</text>\n";
    os << "<text x=\"" << left + size + 10 << "\" y=\"" << top - 8 << "\">log10 infidelity</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace scqc
