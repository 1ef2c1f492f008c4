#include "opdyn/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace opdyn {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const int d = traj.snapshots.empty() ? 0 : traj.snapshots.front().dim;
    out << "t,agent";
    for (int a = 0; a < d; ++a) out << ",x_" << a;
    out << ",theta\n";
    for (const auto& s : traj.snapshots)
        for (int k = 0; k < s.n_agents(); ++k) {
            out << fmt_double(s.time) << ',' << k;
            for (int a = 0; a < d; ++a)
                out << ',' << fmt_double(s.positions[k * d + a]);
            out << ',' << fmt_double(s.opinions[k]) << '\n';
        }
}

void write_snapshots_ndjson(const std::filesystem::path& path,
                            const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& s : traj.snapshots) {
        out << "{\"t\":" << fmt_double(s.time) << ",\"positions\":[";
        for (std::size_t i = 0; i < s.positions.size(); ++i)
            out << (i ? "," : "") << fmt_double(s.positions[i]);
        out << "],\"opinions\":[";
        for (std::size_t i = 0; i < s.opinions.size(); ++i)
            out << (i ? "," : "") << fmt_double(s.opinions[i]);
        out << "]}\n";
    }
}

void write_density_csv(const std::filesystem::path& path,
                       const DensityField& rho) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "z,eta,rho\n";
    for (int iz = 0; iz < rho.grid.nz; ++iz)
        for (int ie = 0; ie < rho.grid.neta; ++ie)
            out << fmt_double(rho.grid.z_center(iz)) << ','
                << fmt_double(rho.grid.eta_center(ie)) << ','
                << fmt_double(rho.at(iz, ie)) << '\n';
}

namespace {

std::string ramp_color(double t) {
    // blue (-1) -> white (0) -> red (+1)
    t = std::clamp(t, -1.0, 1.0);
    int r, g, b;
    if (t < 0.0) {
        r = static_cast<int>(std::lround(255 * (1.0 + t)));
        g = r;
        b = 255;
    } else {
        r = 255;
        g = static_cast<int>(std::lround(255 * (1.0 - t)));
        b = g;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string heat_color(double t) {
    // dark blue -> yellow
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255 * t));
    const int g = static_cast<int>(std::lround(220 * t));
    const int b = static_cast<int>(std::lround(80 + 100 * (1.0 - t)));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void write_scatter_svg(const std::filesystem::path& path,
                       const SystemState& s) {
    const int W = 600;
    double lo = -0.5, hi = 0.5;
    for (double v : s.positions) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto px = [&](double v) { return (v - lo) / (hi - lo) * W; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << W << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#f8f8f8\"/>\n";
    const int d = s.dim;
    for (int k = 0; k < s.n_agents(); ++k) {
        const double x = px(s.positions[k * d]);
        const double y =
            d > 1 ? W - px(s.positions[k * d + 1]) : W / 2.0;
        out << "<circle cx=\"" << fmt_double(x) << "\" cy=\"" << fmt_double(y)
            << "\" r=\"4\" fill=\"" << ramp_color(s.opinions[k])
            << "\" stroke=\"#555\" stroke-width=\"0.5\"/>\n";
    }
    out << "</svg>\n";
}

void write_heatmap_svg(const std::filesystem::path& path,
                       const DensityField& rho) {
    const int cell = std::max(1, 640 / std::max(rho.grid.nz, rho.grid.neta));
    const double vmax = std::max(rho.max_value(), 1e-300);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << rho.grid.nz * cell << "\" height=\"" << rho.grid.neta * cell
        << "\">\n";
    for (int iz = 0; iz < rho.grid.nz; ++iz)
        for (int ie = 0; ie < rho.grid.neta; ++ie) {
            const double t = rho.at(iz, ie) / vmax;
            out << "<rect x=\"" << iz * cell << "\" y=\""
                << (rho.grid.neta - 1 - ie) * cell << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"" << heat_color(t)
                << "\"/>\n";
        }
    out << "</svg>\n";
}

void write_manifest(const std::filesystem::path& path,
                    const std::string& config_hash, std::uint64_t seed,
                    double wall_clock_s,
                    const std::vector<ManifestEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "{\"type\":\"run\",\"config_hash\":\"" << config_hash
        << "\",\"seed\":" << seed << ",\"version\":\"0.1.0\""
        << ",\"wall_clock_s\":" << fmt_double(wall_clock_s) << "}\n";
    for (const auto& e : entries)
        out << "{\"type\":\"file\",\"file\":\"" << e.file << "\",\"fnv1a64\":\""
            << hex64(e.checksum) << "\",\"bytes\":" << e.bytes << "}\n";
}

ManifestEntry checksum_entry(const std::filesystem::path& dir,
                             const std::string& filename) {
    const auto p = dir / filename;
    return ManifestEntry{filename, fnv1a64_file(p),
                         std::filesystem::file_size(p)};
}

}  // namespace opdyn
