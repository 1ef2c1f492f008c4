#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace opdyn {

// Positions and opinions of all agents at one instant. Positions are stored
// row-major, agent k occupying entries [k*dim, (k+1)*dim).
struct SystemState {
    int dim = 2;
    std::vector<double> positions;  // N * dim
    std::vector<double> opinions;   // N
    double time = 0.0;

    int n_agents() const { return static_cast<int>(opinions.size()); }
    std::span<const double> pos(int k) const {
        return {positions.data() + static_cast<std::size_t>(k) * dim,
                static_cast<std::size_t>(dim)};
    }
    bool all_finite() const;
};

struct ModelParams {
    double alpha = 20.0;   // opinion strength
    double beta = 20.0;    // spatial strength
    double radius = 0.15;  // interaction radius R
    double lambda = -1.0;  // decay rate of s(x) = exp(lambda*x), three-body only
    double scaling = 1.0;  // multiplicative prefactor on both drift kernels
    int dim = 2;

    void validate() const;
};

enum class NoiseKind { Additive, MultiplicativeMin, KernelAveraged };
enum class PairSigmaKernel { Constant, Indicator, OpinionGap };
enum class MultNoiseTarget { Both, OpinionOnly };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Additive;
    // Additive
    double sigma_sp = 0.0;
    double sigma_op = 0.0;
    // MultiplicativeMin
    double sigma_iso = 0.05;  // fallback amplitude for agents with no neighbor
    MultNoiseTarget apply_to = MultNoiseTarget::Both;
    // KernelAveraged
    PairSigmaKernel sp_kernel = PairSigmaKernel::Constant;
    PairSigmaKernel op_kernel = PairSigmaKernel::Constant;
    double sp_amp = 0.0;
    double op_amp = 0.0;

    void validate() const;
};

enum class InteractionKernel {
    Pairwise,   // bounded-confidence pair maps for both position and opinion
    ThreeBody,  // three-body opinion map, pairwise spatial map
    LinearTest, // drift -x / -theta per agent, for integrator verification
};

struct DriftVector {
    std::vector<double> spatial;  // N * dim
    std::vector<double> opinion;  // N
};

struct NoiseAmplitudes {
    std::vector<double> spatial;  // N, isotropic across axes
    std::vector<double> opinion;  // N
};

// Sorted in-radius neighbor indices per agent, self excluded.
struct NeighborLists {
    std::vector<std::vector<int>> lists;
};

NeighborLists build_neighbor_lists(const SystemState& s, double radius);

// All in-radius unordered pairs (i, j) with i < j, in lexicographic order.
// Cell-list accelerated; agrees exactly with the naive double loop.
std::vector<std::pair<int, int>> neighbor_pairs(const SystemState& s,
                                                double radius);

// Pair interaction maps. Indicator is closed at R, sgn(0) = 0.
double opinion_drift_pair(std::span<const double> x1, std::span<const double> x2,
                          double th1, double th2, const ModelParams& p);
void spatial_drift_pair(std::span<const double> x1, std::span<const double> x2,
                        double th1, double th2, const ModelParams& p,
                        std::span<double> out);
double opinion_drift_threebody(std::span<const double> x1,
                               std::span<const double> x2,
                               std::span<const double> x3, double th1,
                               double th2, double th3, const ModelParams& p);

// Mean-field normalized drift of every agent: 1/N pair sums (self term
// included, identically zero) or 1/N^2 triple sums for the three-body kernel.
DriftVector total_drift(const SystemState& s, const ModelParams& p,
                        InteractionKernel kernel);
DriftVector total_drift(const SystemState& s, const ModelParams& p,
                        InteractionKernel kernel, const NeighborLists& nbrs,
                        int threads);

NoiseAmplitudes noise_amplitude(const SystemState& s, const NoiseSpec& spec,
                                const ModelParams& p);
NoiseAmplitudes noise_amplitude(const SystemState& s, const NoiseSpec& spec,
                                const ModelParams& p, const NeighborLists& nbrs);

}  // namespace opdyn
