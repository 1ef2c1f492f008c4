#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "opdyn/sim.hpp"

using namespace opdyn;

namespace {

SimConfig base_config() {
    SimConfig cfg;
    cfg.n_agents = 50;
    cfg.t_end = 1.0;
    cfg.dt = 0.01;
    cfg.model.dim = 2;
    cfg.init.pos_low = {-0.25, -0.25};
    cfg.init.pos_high = {0.25, 0.25};
    cfg.noise.sigma_sp = 0.0;
    cfg.noise.sigma_op = 0.0;
    return cfg;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / v.size();
}

}  // namespace

TEST_CASE("linear drift without noise matches the exact Euler recurrence") {
    SimConfig cfg = base_config();
    cfg.kernel = InteractionKernel::LinearTest;
    cfg.n_agents = 4;
    cfg.dt = 1e-3;
    cfg.snapshot_stride = 1000;
    const auto traj = simulate(cfg);
    const auto& s0 = traj.snapshots.front();
    const auto& sT = traj.snapshots.back();
    const double factor = std::pow(1.0 - cfg.dt, cfg.n_steps());
    for (int k = 0; k < cfg.n_agents; ++k) {
        CHECK(sT.opinions[k] ==
              doctest::Approx(s0.opinions[k] * factor).epsilon(1e-12));
        for (int d = 0; d < 2; ++d)
            CHECK(sT.positions[k * 2 + d] ==
                  doctest::Approx(s0.positions[k * 2 + d] * factor)
                      .epsilon(1e-12));
        // and the recurrence converges to the exponential
        CHECK(sT.opinions[k] == doctest::Approx(s0.opinions[k] *
                                                std::exp(-1.0))
                                    .epsilon(1e-3));
    }
}

TEST_CASE("pure diffusion reproduces Brownian variance growth") {
    SimConfig cfg = base_config();
    cfg.n_agents = 10000;
    cfg.t_end = 0.5;
    cfg.dt = 0.01;
    cfg.model.alpha = 0.0;
    cfg.model.beta = 0.0;
    cfg.init.pos_low = {-5.0, -5.0};  // sparse: keep neighbor lists short
    cfg.init.pos_high = {5.0, 5.0};
    cfg.noise.sigma_op = 0.1;
    cfg.init.op_low = 0.0;  // start all opinions at 0
    cfg.init.op_high = 0.0;
    cfg.snapshot_stride = 50;
    const auto traj = simulate(cfg);
    const double got = variance(traj.snapshots.back().opinions);
    const double want = cfg.noise.sigma_op * cfg.noise.sigma_op * cfg.t_end;
    CHECK(got == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("two coupled agents contract at the predicted exponential rate") {
    SimConfig cfg = base_config();
    cfg.n_agents = 2;
    cfg.model.dim = 1;
    cfg.model.alpha = 2.0;
    cfg.model.beta = 0.0;  // keep positions fixed so the pair stays in range
    cfg.init.kind = InitKind::GaussianMixture;
    cfg.init.components = {{0.0, 0.0, 1e-9, 1.0}};
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 10000;
    auto s = init_state(cfg);
    s.opinions = {0.5, -0.5};
    // gap obeys d(gap)/dt = -alpha * gap while both agents interact
    for (long step = 0; step < cfg.n_steps(); ++step)
        s = em_step(s, cfg, step);
    const double gap = s.opinions[0] - s.opinions[1];
    CHECK(gap == doctest::Approx(std::exp(-cfg.model.alpha)).epsilon(1e-3));
    // the mean is conserved exactly up to rounding
    CHECK(std::abs(s.opinions[0] + s.opinions[1]) < 1e-14);
}

TEST_CASE("simulation is deterministic and thread-count independent") {
    SimConfig cfg = base_config();
    cfg.noise.sigma_sp = 0.05;
    cfg.noise.sigma_op = 0.05;
    cfg.snapshot_stride = 25;
    const auto a = simulate(cfg, 1);
    const auto b = simulate(cfg, 1);
    const auto c = simulate(cfg, 4);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    REQUIRE(a.snapshots.size() == c.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        CHECK(a.snapshots[i].positions == b.snapshots[i].positions);
        CHECK(a.snapshots[i].opinions == b.snapshots[i].opinions);
        CHECK(a.snapshots[i].positions == c.snapshots[i].positions);
        CHECK(a.snapshots[i].opinions == c.snapshots[i].opinions);
    }
}

TEST_CASE("different seeds decorrelate trajectories") {
    SimConfig cfg = base_config();
    cfg.noise.sigma_op = 0.05;
    const auto a = simulate(cfg);
    cfg.seed = 1;
    const auto b = simulate(cfg);
    CHECK(a.snapshots.back().opinions != b.snapshots.back().opinions);
}

TEST_CASE("minimum-gap noise freezes a local consensus exactly") {
    SimConfig cfg = base_config();
    cfg.n_agents = 3;
    cfg.model.alpha = 0.0;
    cfg.model.beta = 0.0;
    cfg.noise.kind = NoiseKind::MultiplicativeMin;
    cfg.t_end = 0.1;
    auto s = init_state(cfg);
    // clamp everyone to one point in opinion space, all within range
    s.positions = {0.0, 0.0, 0.05, 0.0, 0.0, 0.05};
    s.opinions = {0.3, 0.3, 0.3};
    const auto before = s;
    for (long step = 0; step < cfg.n_steps(); ++step)
        s = em_step(s, cfg, step);
    CHECK(s.positions == before.positions);
    CHECK(s.opinions == before.opinions);
}

TEST_CASE("halving dt tightens the weak error of the linear test") {
    SimConfig cfg = base_config();
    cfg.kernel = InteractionKernel::LinearTest;
    cfg.n_agents = 1;
    cfg.init.op_low = cfg.init.op_high = 1.0;
    cfg.snapshot_stride = 1 << 20;
    auto err = [&](double dt) {
        cfg.dt = dt;
        const auto traj = simulate(cfg);
        return std::abs(traj.snapshots.back().opinions[0] - std::exp(-1.0));
    };
    const double e1 = err(0.01), e2 = err(0.005);
    CHECK(e2 < 0.6 * e1);  // first-order convergence
}

TEST_CASE("non-finite states raise BlowUpError with the failing step") {
    SimConfig cfg = base_config();
    cfg.kernel = InteractionKernel::LinearTest;
    cfg.n_agents = 2;
    cfg.dt = 100.0;  // |1 - dt| = 99 per step: divergence, then overflow
    cfg.t_end = 1e5;
    CHECK_THROWS_AS(simulate(cfg), BlowUpError);
}

TEST_CASE("uniform box initialization respects its bounds") {
    SimConfig cfg = base_config();
    cfg.n_agents = 500;
    const auto s = init_state(cfg);
    for (int k = 0; k < 500; ++k) {
        for (int d = 0; d < 2; ++d) {
            CHECK(s.positions[k * 2 + d] >= -0.25);
            CHECK(s.positions[k * 2 + d] < 0.25);
        }
        CHECK(s.opinions[k] >= -1.0);
        CHECK(s.opinions[k] < 1.0);
    }
}

TEST_CASE("gaussian mixture initialization hits its component means") {
    SimConfig cfg = base_config();
    cfg.model.dim = 1;
    cfg.n_agents = 4000;
    cfg.init.kind = InitKind::GaussianMixture;
    cfg.init.components = {{-1.0, 0.5, 0.05, 1.0}, {1.0, -0.5, 0.05, 1.0}};
    const auto s = init_state(cfg);
    double mp = 0.0, mo = 0.0;
    int left = 0;
    for (int k = 0; k < 4000; ++k) {
        mp += s.positions[k];
        mo += s.opinions[k];
        if (s.positions[k] < 0) ++left;
    }
    CHECK(std::abs(mp / 4000) < 0.05);  // symmetric mixture
    CHECK(std::abs(mo / 4000) < 0.05);
    CHECK(left == doctest::Approx(2000).epsilon(0.05));
}

TEST_CASE("config validation rejects inconsistent settings") {
    SimConfig cfg = base_config();
    cfg.dt = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = base_config();
    cfg.n_agents = 0;
    CHECK_THROWS(cfg.validate());
    cfg = base_config();
    cfg.init.pos_low = {-0.25};  // wrong arity for dim = 2
    CHECK_THROWS(cfg.validate());
}
