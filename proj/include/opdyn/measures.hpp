#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "opdyn/model.hpp"
#include "opdyn/pde.hpp"
#include "opdyn/sim.hpp"

namespace opdyn {

// Uniform-weight point cloud in position x opinion space.
struct EmpiricalMeasure {
    int dim = 0;                 // ambient dimension d+1
    std::vector<double> points;  // N * dim, row-major

    int size() const {
        return dim == 0 ? 0 : static_cast<int>(points.size()) / dim;
    }
};

EmpiricalMeasure empirical_measure(const SystemState& s);

struct ClusterLabels {
    std::vector<int> labels;
    int n_clusters = 0;
};

// Connected components of the in-radius graph, labeled in order of each
// component's smallest agent index.
ClusterLabels cluster_components(const SystemState& s, double radius);

// Pooled within-cluster opinion standard deviation.
double within_cluster_opinion_std(const SystemState& s,
                                  const ClusterLabels& labels);

enum class DistanceMethod { Exact1d, Sliced, SynchronousPath };

struct DistanceReport {
    double value = 0.0;
    DistanceMethod method = DistanceMethod::Exact1d;
    int n_projections = 0;
    std::uint64_t seed = 0;
};

// Exact W2 between equal-size empirical measures on the line; inputs sorted.
double w2_1d_exact(std::vector<double> a, std::vector<double> b);

DistanceReport sliced_w2(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                         int n_proj, std::uint64_t seed);

// (1/N) sum_i sup_{s<=t} squared path deviation under the agent-index
// coupling; an upper bound for the truncated W2 path distance.
double synchronous_path_distance(const Trajectory& a, const Trajectory& b,
                                 double t);

// n i.i.d. samples from a grid density: inverse CDF over cell masses plus
// uniform jitter inside each cell. Returns (z, eta) pairs.
EmpiricalMeasure sample_from_density(const DensityField& rho, int n,
                                     std::uint64_t seed);

// Least-squares slope of log Var vs log N over ensembles of an observable.
double fluctuation_slope(const std::map<int, std::vector<double>>& groups);

}  // namespace opdyn
