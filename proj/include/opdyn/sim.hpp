#pragma once

#include <cstdint>
#include <vector>
#include <cmath>

#include "opdyn/model.hpp"

namespace opdyn {

enum class InitKind { UniformBox, GaussianMixture };

// Gaussian mixture components live in 1-D position x opinion space; the
// uniform box generalizes to any spatial dimension.
struct MixtureComponent {
    double mean_pos = 0.0;
    double mean_op = 0.0;
    double stddev = 0.1;
    double weight = 1.0;
};

struct InitSpec {
    InitKind kind = InitKind::UniformBox;
    std::vector<double> pos_low;   // per axis
    std::vector<double> pos_high;  // per axis
    double op_low = -1.0;
    double op_high = 1.0;
    std::vector<MixtureComponent> components;
};

struct SimConfig {
    int n_agents = 100;
    double t_end = 2.5;
    double dt = 0.01;
    std::uint64_t seed = 0;
    int snapshot_stride = 1;
    InitSpec init;
    ModelParams model;
    NoiseSpec noise;
    InteractionKernel kernel = InteractionKernel::Pairwise;

    long n_steps() const { return std::lround(t_end / dt); }
    void validate() const;
};

struct Trajectory {
    std::vector<SystemState> snapshots;
    SimConfig config;
};

// Thrown when an integration step produces a non-finite state.
struct BlowUpError : std::runtime_error {
    long step;
    explicit BlowUpError(long s)
        : std::runtime_error("non-finite state at step " + std::to_string(s)),
          step(s) {}
};

SystemState init_state(const SimConfig& cfg);
SystemState em_step(const SystemState& s, const SimConfig& cfg,
                    long step_index, int threads = 1);
Trajectory simulate(const SimConfig& cfg, int threads = 1);

}  // namespace opdyn
