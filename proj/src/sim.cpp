#include "opdyn/sim.hpp"

#include <cmath>

#include "opdyn/rng.hpp"

namespace opdyn {

void SimConfig::validate() const {
    model.validate();
    noise.validate();
    if (n_agents < 1) throw std::invalid_argument("n_agents must be >= 1");
    if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
    if (t_end < 0.0) throw std::invalid_argument("t_end must be >= 0");
    if (t_end > 0.0 && dt > t_end)
        throw std::invalid_argument("dt must not exceed t_end");
    if (snapshot_stride < 1)
        throw std::invalid_argument("snapshot_stride must be >= 1");
    if (init.kind == InitKind::UniformBox) {
        if (static_cast<int>(init.pos_low.size()) != model.dim ||
            static_cast<int>(init.pos_high.size()) != model.dim)
            throw std::invalid_argument("init box bounds must match dim");
        for (int a = 0; a < model.dim; ++a)
            if (init.pos_low[a] > init.pos_high[a])
                throw std::invalid_argument("init box: low > high");
        if (init.op_low > init.op_high)
            throw std::invalid_argument("init opinions: low > high");
    } else {
        if (model.dim != 1)
            throw std::invalid_argument(
                "gaussian-mixture init requires dim = 1");
        if (init.components.empty())
            throw std::invalid_argument("mixture init needs components");
        for (const auto& c : init.components) {
            if (c.stddev <= 0.0)
                throw std::invalid_argument("mixture stddev must be > 0");
            if (c.weight <= 0.0)
                throw std::invalid_argument("mixture weight must be > 0");
        }
    }
    if (kernel == InteractionKernel::ThreeBody && model.lambda >= 0.0)
        throw std::invalid_argument("three-body kernel requires lambda < 0");
}

SystemState init_state(const SimConfig& cfg) {
    cfg.validate();
    const int n = cfg.n_agents, d = cfg.model.dim;
    SystemState s;
    s.dim = d;
    s.positions.resize(static_cast<std::size_t>(n) * d);
    s.opinions.resize(n);
    if (cfg.init.kind == InitKind::UniformBox) {
        for (int k = 0; k < n; ++k) {
            for (int a = 0; a < d; ++a) {
                const double u = rng::uniform01(cfg.seed, rng::kTagInit, k, a, 0);
                s.positions[k * d + a] =
                    cfg.init.pos_low[a] +
                    (cfg.init.pos_high[a] - cfg.init.pos_low[a]) * u;
            }
            const double u = rng::uniform01(cfg.seed, rng::kTagInit, k, d, 0);
            s.opinions[k] =
                cfg.init.op_low + (cfg.init.op_high - cfg.init.op_low) * u;
        }
    } else {
        double wsum = 0.0;
        for (const auto& c : cfg.init.components) wsum += c.weight;
        for (int k = 0; k < n; ++k) {
            double u = rng::uniform01(cfg.seed, rng::kTagInit, k, 0, 1) * wsum;
            std::size_t ci = 0;
            for (; ci + 1 < cfg.init.components.size(); ++ci) {
                u -= cfg.init.components[ci].weight;
                if (u < 0.0) break;
            }
            const auto& c = cfg.init.components[ci];
            s.positions[k] =
                c.mean_pos +
                c.stddev * rng::normal(cfg.seed, rng::kTagInit, k, 0, 2);
            s.opinions[k] =
                c.mean_op +
                c.stddev * rng::normal(cfg.seed, rng::kTagInit, k, 1, 2);
        }
    }
    return s;
}

SystemState em_step(const SystemState& s, const SimConfig& cfg,
                    long step_index, int threads) {
    const int n = s.n_agents(), d = s.dim;
    auto nbrs = build_neighbor_lists(s, cfg.model.radius);
    const DriftVector drift = total_drift(s, cfg.model, cfg.kernel, nbrs,
                                          threads);
    const NoiseAmplitudes amp = noise_amplitude(s, cfg.noise, cfg.model, nbrs);

    SystemState next = s;
    next.time = s.time + cfg.dt;
    const double sq = std::sqrt(cfg.dt);
    const auto step = static_cast<std::uint64_t>(step_index);
    for (int k = 0; k < n; ++k) {
        for (int a = 0; a < d; ++a) {
            const double xi = rng::normal(cfg.seed, rng::kTagStep, k, step, a);
            next.positions[k * d + a] +=
                drift.spatial[k * d + a] * cfg.dt + amp.spatial[k] * sq * xi;
        }
        const double xi = rng::normal(cfg.seed, rng::kTagStep, k, step, d);
        next.opinions[k] += drift.opinion[k] * cfg.dt + amp.opinion[k] * sq * xi;
    }
    if (!next.all_finite()) throw BlowUpError(step_index);
    return next;
}

Trajectory simulate(const SimConfig& cfg, int threads) {
    Trajectory traj;
    traj.config = cfg;
    SystemState s = init_state(cfg);
    const long steps = cfg.n_steps();
    traj.snapshots.push_back(s);
    for (long i = 0; i < steps; ++i) {
        s = em_step(s, cfg, i, threads);
        if ((i + 1) % cfg.snapshot_stride == 0 || i + 1 == steps)
            traj.snapshots.push_back(s);
    }
    return traj;
}

}  // namespace opdyn
