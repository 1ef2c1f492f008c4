#include "opdyn/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "opdyn/rng.hpp"

namespace opdyn {

EmpiricalMeasure empirical_measure(const SystemState& s) {
    const int n = s.n_agents(), d = s.dim;
    EmpiricalMeasure m;
    m.dim = d + 1;
    m.points.resize(static_cast<std::size_t>(n) * (d + 1));
    for (int k = 0; k < n; ++k) {
        for (int a = 0; a < d; ++a)
            m.points[k * (d + 1) + a] = s.positions[k * d + a];
        m.points[k * (d + 1) + d] = s.opinions[k];
    }
    return m;
}

ClusterLabels cluster_components(const SystemState& s, double radius) {
    const int n = s.n_agents();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [i, j] : neighbor_pairs(s, radius)) {
        int ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
    }
    ClusterLabels out;
    out.labels.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (out.labels[r] < 0) out.labels[r] = out.n_clusters++;
        out.labels[i] = out.labels[r];
    }
    return out;
}

double within_cluster_opinion_std(const SystemState& s,
                                  const ClusterLabels& labels) {
    const int n = s.n_agents();
    std::vector<double> sum(labels.n_clusters, 0.0);
    std::vector<int> cnt(labels.n_clusters, 0);
    for (int i = 0; i < n; ++i) {
        sum[labels.labels[i]] += s.opinions[i];
        ++cnt[labels.labels[i]];
    }
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const int c = labels.labels[i];
        const double d = s.opinions[i] - sum[c] / cnt[c];
        ss += d * d;
    }
    return std::sqrt(ss / n);
}

double w2_1d_exact(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("w2_1d_exact: equal nonempty sizes required");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s / a.size());
}

DistanceReport sliced_w2(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                         int n_proj, std::uint64_t seed) {
    if (a.size() != b.size() || a.dim != b.dim)
        throw std::invalid_argument("sliced_w2: clouds must match in size/dim");
    if (n_proj < 1) throw std::invalid_argument("sliced_w2: n_proj >= 1");
    const int n = a.size(), d = a.dim;
    double acc = 0.0;
    std::vector<double> dir(d), pa(n), pb(n);
    for (int k = 0; k < n_proj; ++k) {
        auto stream = rng::make_stream(seed, rng::kTagSliced, k);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (int i = 0; i < d; ++i) {
                dir[i] = stream.normal();
                norm += dir[i] * dir[i];
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (int i = 0; i < d; ++i) dir[i] /= norm;
        for (int p = 0; p < n; ++p) {
            double sa = 0.0, sb = 0.0;
            for (int i = 0; i < d; ++i) {
                sa += dir[i] * a.points[p * d + i];
                sb += dir[i] * b.points[p * d + i];
            }
            pa[p] = sa;
            pb[p] = sb;
        }
        const double w = w2_1d_exact(pa, pb);
        acc += w * w;
    }
    // A random unit direction captures 1/dim of any squared displacement in
    // expectation; rescale so the estimate is comparable to (and still a
    // lower bound for) the full W2.
    return DistanceReport{std::sqrt(acc / n_proj * d), DistanceMethod::Sliced,
                          n_proj, seed};
}

double synchronous_path_distance(const Trajectory& a, const Trajectory& b,
                                 double t) {
    if (a.snapshots.empty() || b.snapshots.empty() ||
        a.snapshots.size() != b.snapshots.size())
        throw std::invalid_argument("synchronous_path_distance: snapshot grids "
                                    "must match");
    const auto& s0 = a.snapshots.front();
    const int n = s0.n_agents(), d = s0.dim;
    if (b.snapshots.front().n_agents() != n || b.snapshots.front().dim != d)
        throw std::invalid_argument("synchronous_path_distance: agent counts "
                                    "must match");
    std::vector<double> supdev(n, 0.0);
    for (std::size_t si = 0; si < a.snapshots.size(); ++si) {
        const auto& sa = a.snapshots[si];
        const auto& sb = b.snapshots[si];
        if (std::abs(sa.time - sb.time) > 1e-12)
            throw std::invalid_argument("synchronous_path_distance: snapshot "
                                        "times must match");
        if (sa.time > t + 1e-12) break;
        for (int k = 0; k < n; ++k) {
            double dev = 0.0;
            for (int ax = 0; ax < d; ++ax) {
                const double dx =
                    sa.positions[k * d + ax] - sb.positions[k * d + ax];
                dev += dx * dx;
            }
            const double dth = sa.opinions[k] - sb.opinions[k];
            dev += dth * dth;
            supdev[k] = std::max(supdev[k], dev);
        }
    }
    return std::accumulate(supdev.begin(), supdev.end(), 0.0) / n;
}

EmpiricalMeasure sample_from_density(const DensityField& rho, int n,
                                     std::uint64_t seed) {
    const Grid2D& g = rho.grid;
    std::vector<double> cdf(rho.values.size());
    std::partial_sum(rho.values.begin(), rho.values.end(), cdf.begin());
    const double total = cdf.back();
    if (total <= 0.0)
        throw std::invalid_argument("sample_from_density: empty density");
    EmpiricalMeasure m;
    m.dim = 2;
    m.points.resize(static_cast<std::size_t>(n) * 2);
    auto stream = rng::make_stream(seed, rng::kTagSample);
    for (int k = 0; k < n; ++k) {
        const double u = stream.u01() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto cell = std::min<std::size_t>(it - cdf.begin(),
                                                cdf.size() - 1);
        const int iz = static_cast<int>(cell) / g.neta;
        const int ie = static_cast<int>(cell) % g.neta;
        m.points[k * 2] = g.z_min + (iz + stream.u01()) * g.h;
        m.points[k * 2 + 1] = g.eta_min + (ie + stream.u01()) * g.h;
    }
    return m;
}

double fluctuation_slope(const std::map<int, std::vector<double>>& groups) {
    if (groups.size() < 3)
        throw std::invalid_argument("fluctuation_slope: need >= 3 group sizes");
    std::vector<double> xs, ys;
    for (const auto& [n, vals] : groups) {
        if (vals.size() < 8)
            throw std::invalid_argument(
                "fluctuation_slope: need >= 8 ensemble members per N");
        const double mean =
            std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= (vals.size() - 1);
        if (var <= 0.0)
            throw std::invalid_argument(
                "fluctuation_slope: degenerate zero-variance group");
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(var));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
}

}  // namespace opdyn
