#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "opdyn/pde.hpp"
#include "opdyn/sim.hpp"

namespace opdyn {

std::uint64_t fnv1a64(const std::string& data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

// Shortest round-trip decimal representation; deterministic across runs.
std::string fmt_double(double v);

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj);
void write_snapshots_ndjson(const std::filesystem::path& path,
                            const Trajectory& traj);
void write_density_csv(const std::filesystem::path& path,
                       const DensityField& rho);

// Scatter of agent positions colored by opinion on a blue-white-red ramp
// clamped to [-1, 1]. No timestamps, fixed element order.
void write_scatter_svg(const std::filesystem::path& path,
                       const SystemState& s);
void write_heatmap_svg(const std::filesystem::path& path,
                       const DensityField& rho);

struct ManifestEntry {
    std::string file;
    std::uint64_t checksum;
    std::uintmax_t bytes;
};

void write_manifest(const std::filesystem::path& path,
                    const std::string& config_hash, std::uint64_t seed,
                    double wall_clock_s,
                    const std::vector<ManifestEntry>& entries);

ManifestEntry checksum_entry(const std::filesystem::path& dir,
                             const std::string& filename);

}  // namespace opdyn
