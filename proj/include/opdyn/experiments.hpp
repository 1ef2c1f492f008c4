#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "opdyn/config.hpp"
#include "opdyn/pde.hpp"
#include "opdyn/sim.hpp"

namespace opdyn {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kBlowUp = 3;
inline constexpr int kStability = 4;
}  // namespace exit_code

struct ExperimentContext {
    KeyValueConfig cfg;
    std::filesystem::path output_dir = "out";
    int threads = 1;
    std::set<std::string> formats = {"csv", "ndjson", "svg"};
};

struct PdeConfig {
    Grid2D grid;
    double t_end = 1.0;
    double dt = 1e-4;
    int coeff_stride = 1;
    int snapshot_stride = 1000;
    ModelParams model;
    NoiseSpec noise;
    std::vector<MixtureComponent> components;
};

SimConfig sim_config_from(const KeyValueConfig& cfg);
PdeConfig pde_config_from(const KeyValueConfig& cfg);

int run_abm(const ExperimentContext& ctx);
int run_pde(const ExperimentContext& ctx);
int noise_sweep(const ExperimentContext& ctx);
int chaos_study(const ExperimentContext& ctx);
int fluctuation_study(const ExperimentContext& ctx);
int compare_limits(const ExperimentContext& ctx);
int render(const ExperimentContext& ctx);

// Dispatch by mode name; returns a process exit code and reports errors on
// stderr rather than throwing.
int run_mode(const std::string& mode, const ExperimentContext& ctx);

}  // namespace opdyn
