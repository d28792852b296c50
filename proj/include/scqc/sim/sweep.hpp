#pragma once

// Infidelity over an (epsilon, delta_z) grid, optionally averaged over the
// z-rotation family generated by linear gauges.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scqc/sim/sim.hpp"

namespace scqc {

struct SweepSpec {
    std::vector<double> epsilon_axis;
    std::vector<double> delta_axis;
    int average_z = 0;  // number of equally spaced angles in [0, 2 pi); 0 disables averaging
    int jobs = 1;       // worker threads; <= 0 uses the hardware concurrency
    PropagateOptions propagate{};
};

struct SweepGrid {
    std::vector<double> epsilon_axis;
    std::vector<double> delta_axis;
    std::vector<double> infidelity;  // index = i_delta * n_eps + j_eps
    std::vector<char> valid;
    std::vector<std::string> errors;  // per cell, empty when valid
    nlohmann::json metadata;

    double at(std::size_t i_delta, std::size_t j_eps) const {
        return infidelity[i_delta * epsilon_axis.size() + j_eps];
    }
    std::size_t invalid_count() const;
};

std::vector<double> linspace(double lo, double hi, int n);

/// Each cell is independent; results do not depend on `jobs` or scheduling.
SweepGrid sweep(const ControlFields& fields, const Mat2& target, const SweepSpec& spec,
                nlohmann::json metadata = {});

/// Mean infidelity over `angles` z-rotations Lambda(t) = phi t / T, each against
/// Z_phi target; with angles == 0 the plain infidelity.
double averaged_infidelity(const ControlFields& fields, const Mat2& target,
                           const NoiseSample& noise, int angles, const PropagateOptions& opt = {});

void write_csv(const SweepGrid& grid, const std::filesystem::path& path);
std::string to_csv(const SweepGrid& grid);
nlohmann::json to_json(const SweepGrid& grid);
/// Heatmap of log10 infidelity; invalid cells drawn grey.
std::string to_svg(const SweepGrid& grid, const std::string& title = "");

}  // namespace scqc
