#include "opdyn/model.hpp"

#include "opdyn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace opdyn {

bool SystemState::all_finite() const {
    for (double v : positions)
        if (!std::isfinite(v)) return false;
    for (double v : opinions)
        if (!std::isfinite(v)) return false;
    return true;
}

void ModelParams::validate() const {
    if (radius <= 0.0) throw std::invalid_argument("radius must be > 0");
    if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
    if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
}

void NoiseSpec::validate() const {
    if (sigma_sp < 0 || sigma_op < 0 || sigma_iso < 0 || sp_amp < 0 ||
        op_amp < 0)
        throw std::invalid_argument("noise amplitudes must be >= 0");
}

namespace {

inline double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Uniform cell list with cell edge R. Neighbor candidates come from the 3^d
// adjacent cells; the caller re-checks the exact distance.
struct CellList {
    int dim;
    double cell;
    std::vector<double> origin;
    std::unordered_map<std::uint64_t, std::vector<int>> cells;

    CellList(const SystemState& s, double radius)
        : dim(s.dim), cell(radius), origin(s.dim,
                                           std::numeric_limits<double>::max()) {
        const int n = s.n_agents();
        for (int k = 0; k < n; ++k) {
            auto p = s.pos(k);
            for (int a = 0; a < dim; ++a) origin[a] = std::min(origin[a], p[a]);
        }
        for (int k = 0; k < n; ++k) cells[key_of(s.pos(k))].push_back(k);
    }

    std::uint64_t key_of(std::span<const double> p) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (int a = 0; a < dim; ++a) {
            auto c = static_cast<std::int64_t>(
                std::floor((p[a] - origin[a]) / cell));
            h = (h ^ static_cast<std::uint64_t>(c)) * 0x100000001b3ULL;
            h = splitrot(h);
        }
        return h;
    }

    static std::uint64_t splitrot(std::uint64_t h) {
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdULL;
        return h ^ (h >> 29);
    }

    template <class Fn>
    void for_candidates(std::span<const double> p, Fn&& fn) const {
        std::vector<std::int64_t> base(dim), off(dim, -1);
        for (int a = 0; a < dim; ++a)
            base[a] = static_cast<std::int64_t>(
                std::floor((p[a] - origin[a]) / cell));
        while (true) {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (int a = 0; a < dim; ++a) {
                h = (h ^ static_cast<std::uint64_t>(base[a] + off[a])) *
                    0x100000001b3ULL;
                h = splitrot(h);
            }
            if (auto it = cells.find(h); it != cells.end())
                for (int j : it->second) fn(j);
            int a = 0;
            for (; a < dim; ++a) {
                if (++off[a] <= 1) break;
                off[a] = -1;
            }
            if (a == dim) break;
        }
    }
};

}  // namespace

NeighborLists build_neighbor_lists(const SystemState& s, double radius) {
    const int n = s.n_agents();
    NeighborLists out;
    out.lists.resize(n);
    const double r2 = radius * radius;
    if (n <= 64) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (j != i && dist2(s.pos(i), s.pos(j)) <= r2)
                    out.lists[i].push_back(j);
        return out;
    }
    CellList cl(s, radius);
    for (int i = 0; i < n; ++i) {
        auto pi = s.pos(i);
        auto& li = out.lists[i];
        cl.for_candidates(pi, [&](int j) {
            if (j != i && dist2(pi, s.pos(j)) <= r2) li.push_back(j);
        });
        std::sort(li.begin(), li.end());
    }
    return out;
}

std::vector<std::pair<int, int>> neighbor_pairs(const SystemState& s,
                                                double radius) {
    if (radius <= 0.0) throw std::invalid_argument("radius must be > 0");
    auto nbrs = build_neighbor_lists(s, radius);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < s.n_agents(); ++i)
        for (int j : nbrs.lists[i])
            if (j > i) pairs.emplace_back(i, j);
    return pairs;
}

double opinion_drift_pair(std::span<const double> x1, std::span<const double> x2,
                          double th1, double th2, const ModelParams& p) {
    if (dist2(x1, x2) > p.radius * p.radius) return 0.0;
    return p.scaling * p.alpha * (th2 - th1);
}

void spatial_drift_pair(std::span<const double> x1, std::span<const double> x2,
                        double th1, double th2, const ModelParams& p,
                        std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (dist2(x1, x2) > p.radius * p.radius) return;
    const double c = p.scaling * p.beta * sgn(th1 * th2);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = c * (x2[a] - x1[a]);
}

double opinion_drift_threebody(std::span<const double> x1,
                               std::span<const double> x2,
                               std::span<const double> x3, double th1,
                               double th2, double th3, const ModelParams& p) {
    const double r2 = p.radius * p.radius;
    if (dist2(x1, x2) > r2 || dist2(x1, x3) > r2 || dist2(x2, x3) > r2)
        return 0.0;
    return p.scaling * p.alpha * std::exp(p.lambda * std::abs(th2 - th3)) *
           ((th2 - th1) + (th3 - th1));
}

DriftVector total_drift(const SystemState& s, const ModelParams& p,
                        InteractionKernel kernel) {
    auto nbrs = build_neighbor_lists(s, p.radius);
    return total_drift(s, p, kernel, nbrs, 1);
}

DriftVector total_drift(const SystemState& s, const ModelParams& p,
                        InteractionKernel kernel, const NeighborLists& nbrs,
                        int threads) {
    const int n = s.n_agents();
    if (n < 1) throw std::invalid_argument("total_drift: empty state");
    const int d = s.dim;
    DriftVector out;
    out.spatial.assign(static_cast<std::size_t>(n) * d, 0.0);
    out.opinion.assign(n, 0.0);

    if (kernel == InteractionKernel::LinearTest) {
        for (int k = 0; k < n; ++k) {
            auto pk = s.pos(k);
            for (int a = 0; a < d; ++a) out.spatial[k * d + a] = -pk[a];
            out.opinion[k] = -s.opinions[k];
        }
        return out;
    }

    const double r2 = p.radius * p.radius;
    parallel_for(n, threads, [&](int lo, int hi) {
        std::vector<double> pairbuf(d);
        for (int k = lo; k < hi; ++k) {
            auto xk = s.pos(k);
            const double thk = s.opinions[k];
            double op_acc = 0.0;
            std::span<double> sp_acc(out.spatial.data() +
                                         static_cast<std::size_t>(k) * d,
                                     d);
            // Fixed ascending-j order keeps sums deterministic across the
            // naive and cell-list paths.
            for (int j : nbrs.lists[k]) {
                auto xj = s.pos(j);
                spatial_drift_pair(xk, xj, thk, s.opinions[j], p, pairbuf);
                for (int a = 0; a < d; ++a) sp_acc[a] += pairbuf[a];
                if (kernel == InteractionKernel::Pairwise)
                    op_acc += opinion_drift_pair(xk, xj, thk, s.opinions[j], p);
            }
            if (kernel == InteractionKernel::ThreeBody) {
                // Candidates = {k} + neighbors(k); any triple with a member
                // outside B(xk, R) has a vanishing pair indicator.
                std::vector<int> cand;
                cand.reserve(nbrs.lists[k].size() + 1);
                auto pos_it = std::lower_bound(nbrs.lists[k].begin(),
                                               nbrs.lists[k].end(), k);
                cand.assign(nbrs.lists[k].begin(), pos_it);
                cand.push_back(k);
                cand.insert(cand.end(), pos_it, nbrs.lists[k].end());
                double tb = 0.0;
                for (int j : cand) {
                    auto xj = s.pos(j);
                    for (int l : cand) {
                        if (dist2(xj, s.pos(l)) > r2) continue;
                        tb += p.scaling * p.alpha *
                              std::exp(p.lambda *
                                       std::abs(s.opinions[j] - s.opinions[l])) *
                              ((s.opinions[j] - thk) + (s.opinions[l] - thk));
                    }
                }
                op_acc = tb / n;  // combined with the outer 1/N below -> 1/N^2
            }
            for (int a = 0; a < d; ++a) sp_acc[a] /= n;
            out.opinion[k] = op_acc / n;
        }
    });
    return out;
}

NoiseAmplitudes noise_amplitude(const SystemState& s, const NoiseSpec& spec,
                                const ModelParams& p) {
    auto nbrs = build_neighbor_lists(s, p.radius);
    return noise_amplitude(s, spec, p, nbrs);
}

NoiseAmplitudes noise_amplitude(const SystemState& s, const NoiseSpec& spec,
                                const ModelParams& p,
                                const NeighborLists& nbrs) {
    const int n = s.n_agents();
    NoiseAmplitudes out;
    out.spatial.assign(n, 0.0);
    out.opinion.assign(n, 0.0);

    switch (spec.kind) {
        case NoiseKind::Additive:
            std::fill(out.spatial.begin(), out.spatial.end(), spec.sigma_sp);
            std::fill(out.opinion.begin(), out.opinion.end(), spec.sigma_op);
            break;
        case NoiseKind::MultiplicativeMin:
            for (int i = 0; i < n; ++i) {
                double m = std::numeric_limits<double>::infinity();
                for (int j : nbrs.lists[i])
                    m = std::min(m, std::abs(s.opinions[i] - s.opinions[j]));
                const double sig = std::isfinite(m) ? m : spec.sigma_iso;
                out.opinion[i] = sig;
                if (spec.apply_to == MultNoiseTarget::Both)
                    out.spatial[i] = sig;
            }
            break;
        case NoiseKind::KernelAveraged: {
            auto eval = [&](PairSigmaKernel kern, double amp, int i, int j) {
                const bool in = dist2(s.pos(i), s.pos(j)) <=
                                p.radius * p.radius;
                switch (kern) {
                    case PairSigmaKernel::Constant:
                        return amp;
                    case PairSigmaKernel::Indicator:
                        return in ? amp : 0.0;
                    case PairSigmaKernel::OpinionGap:
                        return in ? amp * std::abs(s.opinions[i] -
                                                   s.opinions[j])
                                  : 0.0;
                }
                return 0.0;
            };
            for (int i = 0; i < n; ++i) {
                double ssp = 0.0, sop = 0.0;
                for (int j = 0; j < n; ++j) {
                    ssp += eval(spec.sp_kernel, spec.sp_amp, i, j);
                    sop += eval(spec.op_kernel, spec.op_amp, i, j);
                }
                out.spatial[i] = ssp / n;
                out.opinion[i] = sop / n;
            }
            break;
        }
    }
    return out;
}

}  // namespace opdyn
