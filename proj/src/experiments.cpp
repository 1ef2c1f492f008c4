#include "opdyn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "opdyn/measures.hpp"
#include "opdyn/output.hpp"
#include "opdyn/parallel.hpp"
#include "opdyn/rng.hpp"

namespace opdyn {

namespace {

using clock_type = std::chrono::steady_clock;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<MixtureComponent> parse_components(const std::string& text) {
    std::vector<MixtureComponent> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        MixtureComponent c;
        if (std::sscanf(item.c_str(), "%lf:%lf:%lf:%lf", &c.mean_pos,
                        &c.mean_op, &c.stddev, &c.weight) != 4)
            throw ConfigError("bad mixture component '" + item +
                              "' (want pos:op:std:weight)");
        out.push_back(c);
    }
    if (out.empty()) throw ConfigError("empty mixture component list");
    return out;
}

InteractionKernel parse_kernel(const std::string& s) {
    if (s == "pairwise") return InteractionKernel::Pairwise;
    if (s == "three-body") return InteractionKernel::ThreeBody;
    if (s == "linear-test") return InteractionKernel::LinearTest;
    throw ConfigError("unknown model.kernel '" + s + "'");
}

PairSigmaKernel parse_sigma_kernel(const std::string& s) {
    if (s == "constant") return PairSigmaKernel::Constant;
    if (s == "indicator") return PairSigmaKernel::Indicator;
    if (s == "opinion-gap") return PairSigmaKernel::OpinionGap;
    throw ConfigError("unknown pair sigma kernel '" + s + "'");
}

ModelParams model_from(const KeyValueConfig& cfg) {
    ModelParams p;
    p.alpha = cfg.get_double("model.alpha", 20.0);
    p.beta = cfg.get_double("model.beta", 20.0);
    p.radius = cfg.get_double("model.radius", 0.15);
    p.lambda = cfg.get_double("model.lambda", -1.0);
    p.scaling = cfg.get_double("model.scaling", 1.0);
    p.dim = static_cast<int>(cfg.get_long("abm.dim", 2));
    return p;
}

NoiseSpec noise_from(const KeyValueConfig& cfg) {
    NoiseSpec n;
    const std::string kind = cfg.get_string("noise.kind", "additive");
    if (kind == "additive")
        n.kind = NoiseKind::Additive;
    else if (kind == "multiplicative-min")
        n.kind = NoiseKind::MultiplicativeMin;
    else if (kind == "kernel-averaged")
        n.kind = NoiseKind::KernelAveraged;
    else
        throw ConfigError("unknown noise.kind '" + kind + "'");
    n.sigma_sp = cfg.get_double("noise.sigma_sp", 0.05);
    n.sigma_op = cfg.get_double("noise.sigma_op", 0.05);
    n.sigma_iso = cfg.get_double("noise.sigma_iso", 0.05);
    const std::string target = cfg.get_string("noise.apply_to", "both");
    if (target == "both")
        n.apply_to = MultNoiseTarget::Both;
    else if (target == "opinion-only")
        n.apply_to = MultNoiseTarget::OpinionOnly;
    else
        throw ConfigError("unknown noise.apply_to '" + target + "'");
    n.sp_kernel =
        parse_sigma_kernel(cfg.get_string("noise.sp_kernel", "constant"));
    n.op_kernel =
        parse_sigma_kernel(cfg.get_string("noise.op_kernel", "constant"));
    n.sp_amp = cfg.get_double("noise.sp_amp", 0.0);
    n.op_amp = cfg.get_double("noise.op_amp", 0.0);
    return n;
}

struct RunOutputs {
    std::vector<std::string> files;
    void add(const std::string& f) { files.push_back(f); }
};

void finish_manifest(const ExperimentContext& ctx, const RunOutputs& outs,
                     std::uint64_t seed, clock_type::time_point t0) {
    std::vector<ManifestEntry> entries;
    for (const auto& f : outs.files)
        entries.push_back(checksum_entry(ctx.output_dir, f));
    const double wall =
        std::chrono::duration<double>(clock_type::now() - t0).count();
    write_manifest(ctx.output_dir / "manifest.ndjson",
                   hex64(fnv1a64(ctx.cfg.canonical())),
                   ctx.cfg.get_u64("seed", 0), wall, entries);
    (void)seed;
}

void write_cluster_series(const std::filesystem::path& path,
                          const Trajectory& traj, double radius) {
    std::ofstream out(path);
    out << "t,n_clusters,within_cluster_opinion_std\n";
    for (const auto& s : traj.snapshots) {
        const auto labels = cluster_components(s, radius);
        out << fmt_double(s.time) << ',' << labels.n_clusters << ','
            << fmt_double(within_cluster_opinion_std(s, labels)) << '\n';
    }
}

void write_opinion_hist(const std::filesystem::path& path,
                        const Trajectory& traj) {
    constexpr int kBins = 80;
    constexpr double lo = -2.0, hi = 2.0;
    std::ofstream out(path);
    out << "t,bin_lo,bin_hi,count\n";
    for (const auto& s : traj.snapshots) {
        std::vector<int> counts(kBins, 0);
        for (double th : s.opinions) {
            int b = static_cast<int>((th - lo) / (hi - lo) * kBins);
            b = std::clamp(b, 0, kBins - 1);
            ++counts[b];
        }
        for (int b = 0; b < kBins; ++b)
            out << fmt_double(s.time) << ','
                << fmt_double(lo + b * (hi - lo) / kBins) << ','
                << fmt_double(lo + (b + 1) * (hi - lo) / kBins) << ','
                << counts[b] << '\n';
    }
}

}  // namespace

SimConfig sim_config_from(const KeyValueConfig& cfg) {
    SimConfig sc;
    sc.n_agents = static_cast<int>(cfg.get_long("abm.n_agents", 100));
    sc.t_end = cfg.get_double("abm.t_end", 2.5);
    sc.dt = cfg.get_double("abm.dt", 0.01);
    sc.seed = cfg.get_u64("seed", 0);
    sc.snapshot_stride =
        static_cast<int>(cfg.get_long("abm.snapshot_stride", 1));
    sc.model = model_from(cfg);
    sc.noise = noise_from(cfg);
    sc.kernel = parse_kernel(cfg.get_string("model.kernel", "pairwise"));

    const std::string init = cfg.get_string("abm.init", "uniform-box");
    if (init == "uniform-box") {
        sc.init.kind = InitKind::UniformBox;
        sc.init.pos_low = cfg.get_doubles(
            "abm.init.pos_low", std::vector<double>(sc.model.dim, -0.25));
        sc.init.pos_high = cfg.get_doubles(
            "abm.init.pos_high", std::vector<double>(sc.model.dim, 0.25));
        sc.init.op_low = cfg.get_double("abm.init.op_low", -1.0);
        sc.init.op_high = cfg.get_double("abm.init.op_high", 1.0);
    } else if (init == "gaussian-mixture") {
        sc.init.kind = InitKind::GaussianMixture;
        sc.init.components =
            parse_components(cfg.get_string("abm.init.components", ""));
    } else {
        throw ConfigError("unknown abm.init '" + init + "'");
    }
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return sc;
}

PdeConfig pde_config_from(const KeyValueConfig& cfg) {
    PdeConfig pc;
    pc.grid = Grid2D::make(cfg.get_double("pde.z_min", -2.0),
                           cfg.get_double("pde.z_max", 2.0),
                           cfg.get_double("pde.eta_min", -2.0),
                           cfg.get_double("pde.eta_max", 2.0),
                           cfg.get_double("pde.h", 0.05));
    pc.t_end = cfg.get_double("pde.t_end", 1.0);
    pc.dt = cfg.get_double("pde.dt", 1e-4);
    pc.coeff_stride = static_cast<int>(cfg.get_long("pde.coeff_stride", 1));
    pc.snapshot_stride = static_cast<int>(cfg.get_long(
        "pde.snapshot_stride", std::max(1L, std::lround(pc.t_end / pc.dt) / 10)));
    pc.model = model_from(cfg);
    pc.model.dim = 1;  // PDE state space is one spatial + one opinion axis
    pc.noise = noise_from(cfg);

    if (cfg.has("pde.init.components")) {
        pc.components = parse_components(cfg.get_string("pde.init.components", ""));
    } else {
        // Cluster centers drawn uniformly from a box, equal weights.
        const long k = cfg.get_long("pde.init.random_components", 4);
        if (k < 1) throw ConfigError("pde.init.random_components must be >= 1");
        const double std = cfg.get_double("pde.init.std", 0.25);
        const auto box = cfg.get_doubles("pde.init.box", {-1.0, 1.0, -1.0, 1.0});
        if (box.size() != 4) throw ConfigError("pde.init.box wants 4 numbers");
        auto stream =
            rng::make_stream(cfg.get_u64("seed", 0), rng::kTagMixture);
        for (long i = 0; i < k; ++i) {
            MixtureComponent c;
            c.mean_pos = box[0] + (box[1] - box[0]) * stream.u01();
            c.mean_op = box[2] + (box[3] - box[2]) * stream.u01();
            c.stddev = std;
            c.weight = 1.0;
            pc.components.push_back(c);
        }
    }
    if (pc.noise.kind == NoiseKind::MultiplicativeMin)
        throw ConfigError(
            "the PDE solver supports additive and kernel-averaged noise only");
    return pc;
}

int run_abm(const ExperimentContext& ctx) {
    const auto t0 = clock_type::now();
    const SimConfig cfg = sim_config_from(ctx.cfg);
    const Trajectory traj = simulate(cfg, ctx.threads);
    RunOutputs outs;
    if (ctx.formats.count("csv")) {
        write_trajectory_csv(ctx.output_dir / "trajectory.csv", traj);
        outs.add("trajectory.csv");
        write_cluster_series(ctx.output_dir / "clusters.csv", traj,
                             cfg.model.radius);
        outs.add("clusters.csv");
        write_opinion_hist(ctx.output_dir / "opinion_hist.csv", traj);
        outs.add("opinion_hist.csv");
    }
    if (ctx.formats.count("ndjson")) {
        write_snapshots_ndjson(ctx.output_dir / "snapshots.ndjson", traj);
        outs.add("snapshots.ndjson");
    }
    if (ctx.formats.count("svg")) {
        write_scatter_svg(ctx.output_dir / "final.svg", traj.snapshots.back());
        outs.add("final.svg");
    }
    finish_manifest(ctx, outs, cfg.seed, t0);
    return exit_code::kOk;
}

int run_pde(const ExperimentContext& ctx) {
    const auto t0 = clock_type::now();
    const PdeConfig pc = pde_config_from(ctx.cfg);
    const DensityField rho0 = init_gaussian_mixture(pc.grid, pc.components);
    const PdeResult res = pde_integrate(rho0, pc.t_end, pc.dt, pc.model,
                                        pc.noise, pc.coeff_stride,
                                        pc.snapshot_stride);
    auto nearest = [&](double t) -> const DensityField& {
        const DensityField* best = &res.snapshots.front();
        for (const auto& s : res.snapshots)
            if (std::abs(s.time - t) < std::abs(best->time - t)) best = &s;
        return *best;
    };
    RunOutputs outs;
    const struct {
        const char* tag;
        double t;
    } picks[] = {{"t0", 0.0}, {"tmid", pc.t_end / 2}, {"tfinal", pc.t_end}};
    for (const auto& pk : picks) {
        const DensityField& f = nearest(pk.t);
        if (ctx.formats.count("csv")) {
            const std::string name = std::string("density_") + pk.tag + ".csv";
            write_density_csv(ctx.output_dir / name, f);
            outs.add(name);
        }
        if (ctx.formats.count("svg")) {
            const std::string name = std::string("heatmap_") + pk.tag + ".svg";
            write_heatmap_svg(ctx.output_dir / name, f);
            outs.add(name);
        }
    }
    if (ctx.formats.count("csv")) {
        {
            std::ofstream out(ctx.output_dir / "conservation.csv");
            out << "t,mass\n";
            for (std::size_t i = 0; i < res.snapshots.size(); ++i)
                out << fmt_double(res.snapshots[i].time) << ','
                    << fmt_double(res.mass_history[i]) << '\n';
        }
        outs.add("conservation.csv");
        {
            std::ofstream out(ctx.output_dir / "pde_summary.csv");
            out << "key,value\n";
            out << "clipped_mass," << fmt_double(res.clipped_mass) << '\n';
            out << "final_max_density,"
                << fmt_double(res.snapshots.back().max_value()) << '\n';
            out << "n_snapshots," << res.snapshots.size() << '\n';
        }
        outs.add("pde_summary.csv");
    }
    finish_manifest(ctx, outs, 0, t0);
    return exit_code::kOk;
}

int noise_sweep(const ExperimentContext& ctx) {
    const auto t0 = clock_type::now();
    const auto sigmas = ctx.cfg.get_doubles("sweep.sigmas", {0.01, 0.05, 0.15});
    const int n_seeds = static_cast<int>(ctx.cfg.get_long("sweep.seeds", 16));
    if (sigmas.empty()) throw ConfigError("sweep.sigmas must be nonempty");
    const SimConfig base = sim_config_from(ctx.cfg);

    struct Row {
        double sigma;
        int seed_index;
        int n_clusters;
        double within_std;
    };
    const int total = static_cast<int>(sigmas.size()) * n_seeds;
    std::vector<Row> rows(total);
    std::vector<SystemState> finals(total);
    parallel_for(total, ctx.threads, [&](int lo, int hi) {
        for (int r = lo; r < hi; ++r) {
            const int si = r / n_seeds, ki = r % n_seeds;
            SimConfig cfg = base;
            cfg.noise.sigma_sp = cfg.noise.sigma_op = sigmas[si];
            cfg.seed = rng::mix({base.seed, 101, static_cast<std::uint64_t>(ki)});
            cfg.snapshot_stride = std::max<long>(1, cfg.n_steps());
            const Trajectory traj = simulate(cfg, 1);
            const auto& fin = traj.snapshots.back();
            const auto labels = cluster_components(fin, cfg.model.radius);
            rows[r] = Row{sigmas[si], ki, labels.n_clusters,
                          within_cluster_opinion_std(fin, labels)};
            finals[r] = fin;
        }
    });

    RunOutputs outs;
    if (ctx.formats.count("csv")) {
        {
            std::ofstream out(ctx.output_dir / "sweep.csv");
            out << "sigma,seed_index,n_clusters,within_cluster_opinion_std\n";
            for (const auto& r : rows)
                out << fmt_double(r.sigma) << ',' << r.seed_index << ','
                    << r.n_clusters << ',' << fmt_double(r.within_std) << '\n';
        }
        outs.add("sweep.csv");
        {
            std::ofstream out(ctx.output_dir / "sweep_summary.csv");
            out << "sigma,median_n_clusters,median_within_std\n";
            for (std::size_t si = 0; si < sigmas.size(); ++si) {
                std::vector<double> cs, ws;
                for (const auto& r : rows)
                    if (r.sigma == sigmas[si]) {
                        cs.push_back(r.n_clusters);
                        ws.push_back(r.within_std);
                    }
                out << fmt_double(sigmas[si]) << ',' << fmt_double(median(cs))
                    << ',' << fmt_double(median(ws)) << '\n';
            }
        }
        outs.add("sweep_summary.csv");
    }
    if (ctx.formats.count("svg")) {
        for (std::size_t si = 0; si < sigmas.size(); ++si) {
            std::ostringstream name;
            name << "sweep_sigma_" << fmt_double(sigmas[si]) << ".svg";
            write_scatter_svg(ctx.output_dir / name.str(),
                              finals[si * n_seeds]);
            outs.add(name.str());
        }
    }
    finish_manifest(ctx, outs, base.seed, t0);
    return exit_code::kOk;
}

namespace {

// Atom replication: repeating every point k times leaves the empirical
// measure (and hence W2) unchanged, and lets unequal sample counts meet the
// equal-size contract of sliced_w2.
EmpiricalMeasure replicate_to(const EmpiricalMeasure& m, int target) {
    const int n = m.size();
    const int k = target / n;
    EmpiricalMeasure out;
    out.dim = m.dim;
    out.points.reserve(static_cast<std::size_t>(n) * k * m.dim);
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < k; ++r)
            out.points.insert(out.points.end(),
                              m.points.begin() + i * m.dim,
                              m.points.begin() + (i + 1) * m.dim);
    return out;
}

}  // namespace

int chaos_study(const ExperimentContext& ctx) {
    const auto t0 = clock_type::now();
    const SimConfig base = sim_config_from(ctx.cfg);
    if (base.model.dim != 1)
        throw ConfigError("chaos-study requires abm.dim = 1");
    const PdeConfig pc = pde_config_from(ctx.cfg);
    const auto n_list = ctx.cfg.get_longs("chaos.n_list", {50, 100, 200, 400});
    const int n_seeds = static_cast<int>(ctx.cfg.get_long("chaos.seeds", 8));
    const int n_proj = static_cast<int>(ctx.cfg.get_long("chaos.n_proj", 100));
    long pde_samples = ctx.cfg.get_long("chaos.pde_samples", 10000);
    // equal-size contract: make the sample count a common multiple
    for (long n : n_list) pde_samples -= pde_samples % n;
    if (pde_samples <= 0) throw ConfigError("chaos.pde_samples too small");

    const DensityField rho0 = init_gaussian_mixture(pc.grid, pc.components);
    const PdeResult res = pde_integrate(rho0, pc.t_end, pc.dt, pc.model,
                                        pc.noise, pc.coeff_stride,
                                        pc.snapshot_stride);
    const EmpiricalMeasure pde_cloud = sample_from_density(
        res.snapshots.back(), static_cast<int>(pde_samples), base.seed);

    const int total = static_cast<int>(n_list.size()) * n_seeds;
    std::vector<double> dist(total, 0.0);
    parallel_for(total, ctx.threads, [&](int lo, int hi) {
        for (int r = lo; r < hi; ++r) {
            const int ni = r / n_seeds, ki = r % n_seeds;
            SimConfig cfg = base;
            cfg.n_agents = static_cast<int>(n_list[ni]);
            cfg.t_end = pc.t_end;
            cfg.init.kind = InitKind::GaussianMixture;
            cfg.init.components = pc.components;
            cfg.seed = rng::mix({base.seed, 202,
                                 static_cast<std::uint64_t>(n_list[ni]),
                                 static_cast<std::uint64_t>(ki)});
            cfg.snapshot_stride = std::max<long>(1, cfg.n_steps());
            const Trajectory traj = simulate(cfg, 1);
            const auto emp = empirical_measure(traj.snapshots.back());
            dist[r] = sliced_w2(replicate_to(emp, static_cast<int>(pde_samples)),
                                pde_cloud, n_proj, base.seed)
                          .value;
        }
    });

    RunOutputs outs;
    std::vector<double> means(n_list.size()), stderrs(n_list.size());
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        double m = 0.0, ss = 0.0;
        for (int ki = 0; ki < n_seeds; ++ki) m += dist[ni * n_seeds + ki];
        m /= n_seeds;
        for (int ki = 0; ki < n_seeds; ++ki) {
            const double d = dist[ni * n_seeds + ki] - m;
            ss += d * d;
        }
        means[ni] = m;
        stderrs[ni] = n_seeds > 1 ? std::sqrt(ss / (n_seeds - 1) / n_seeds)
                                  : 0.0;
    }
    int inversions = 0;
    for (std::size_t ni = 0; ni + 1 < n_list.size(); ++ni)
        if (means[ni + 1] > means[ni]) ++inversions;

    if (ctx.formats.count("csv")) {
        {
            std::ofstream out(ctx.output_dir / "chaos.csv");
            out << "n_agents,seed_index,sliced_w2\n";
            for (std::size_t ni = 0; ni < n_list.size(); ++ni)
                for (int ki = 0; ki < n_seeds; ++ki)
                    out << n_list[ni] << ',' << ki << ','
                        << fmt_double(dist[ni * n_seeds + ki]) << '\n';
        }
        outs.add("chaos.csv");
        {
            std::ofstream out(ctx.output_dir / "chaos_summary.csv");
            out << "n_agents,mean_sliced_w2,stderr\n";
            for (std::size_t ni = 0; ni < n_list.size(); ++ni)
                out << n_list[ni] << ',' << fmt_double(means[ni]) << ','
                    << fmt_double(stderrs[ni]) << '\n';
            out << "# adjacent_inversions=" << inversions << '\n';
        }
        outs.add("chaos_summary.csv");
    }
    finish_manifest(ctx, outs, base.seed, t0);
    return exit_code::kOk;
}

int fluctuation_study(const ExperimentContext& ctx) {
    const auto t0 = clock_type::now();
    const SimConfig base = sim_config_from(ctx.cfg);
    const auto n_list = ctx.cfg.get_longs("fluct.n_list", {50, 100, 200, 400});
    const int n_seeds = static_cast<int>(ctx.cfg.get_long("fluct.seeds", 32));

    const int total = static_cast<int>(n_list.size()) * n_seeds;
    std::vector<double> obs(total, 0.0);
    parallel_for(total, ctx.threads, [&](int lo, int hi) {
        for (int r = lo; r < hi; ++r) {
            const int ni = r / n_seeds, ki = r % n_seeds;
            SimConfig cfg = base;
            cfg.n_agents = static_cast<int>(n_list[ni]);
            cfg.seed = rng::mix({base.seed, 303,
                                 static_cast<std::uint64_t>(n_list[ni]),
                                 static_cast<std::uint64_t>(ki)});
            cfg.snapshot_stride = std::max<long>(1, cfg.n_steps());
            const Trajectory traj = simulate(cfg, 1);
            const auto& fin = traj.snapshots.back();
            obs[r] = std::accumulate(fin.opinions.begin(), fin.opinions.end(),
                                     0.0) /
                     fin.n_agents();
        }
    });

    std::map<int, std::vector<double>> groups;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni)
        for (int ki = 0; ki < n_seeds; ++ki)
            groups[static_cast<int>(n_list[ni])].push_back(
                obs[ni * n_seeds + ki]);
    const double slope = fluctuation_slope(groups);

    RunOutputs outs;
    if (ctx.formats.count("csv")) {
        {
            std::ofstream out(ctx.output_dir / "fluct.csv");
            out << "n_agents,seed_index,mean_opinion\n";
            for (std::size_t ni = 0; ni < n_list.size(); ++ni)
                for (int ki = 0; ki < n_seeds; ++ki)
                    out << n_list[ni] << ',' << ki << ','
                        << fmt_double(obs[ni * n_seeds + ki]) << '\n';
        }
        outs.add("fluct.csv");
        {
            std::ofstream out(ctx.output_dir / "fluct_summary.csv");
            out << "key,value\n";
            out << "log_var_slope," << fmt_double(slope) << '\n';
        }
        outs.add("fluct_summary.csv");
    }
    finish_manifest(ctx, outs, base.seed, t0);
    return exit_code::kOk;
}

int compare_limits(const ExperimentContext& ctx) {
    const auto t0 = clock_type::now();
    SimConfig cfg = sim_config_from(ctx.cfg);
    if (cfg.model.dim != 1)
        throw ConfigError("compare-limits requires abm.dim = 1");
    const PdeConfig pc = pde_config_from(ctx.cfg);
    cfg.t_end = pc.t_end;
    cfg.init.kind = InitKind::GaussianMixture;
    cfg.init.components = pc.components;
    cfg.snapshot_stride = std::max<long>(1, cfg.n_steps());

    const DensityField rho0 = init_gaussian_mixture(pc.grid, pc.components);
    const PdeResult res = pde_integrate(rho0, pc.t_end, pc.dt, pc.model,
                                        pc.noise, pc.coeff_stride,
                                        pc.snapshot_stride);
    const Trajectory traj = simulate(cfg, ctx.threads);

    long samples = ctx.cfg.get_long("chaos.pde_samples", 10000);
    samples -= samples % cfg.n_agents;
    const auto pde_cloud = sample_from_density(
        res.snapshots.back(), static_cast<int>(samples), cfg.seed);
    const auto emp = empirical_measure(traj.snapshots.back());
    const auto report =
        sliced_w2(replicate_to(emp, static_cast<int>(samples)), pde_cloud,
                  static_cast<int>(ctx.cfg.get_long("chaos.n_proj", 100)),
                  cfg.seed);

    RunOutputs outs;
    if (ctx.formats.count("csv")) {
        std::ofstream out(ctx.output_dir / "compare.csv");
        out << "key,value\n";
        out << "sliced_w2," << fmt_double(report.value) << '\n';
        out << "n_projections," << report.n_projections << '\n';
        out << "abm_n_agents," << cfg.n_agents << '\n';
        outs.add("compare.csv");
    }
    if (ctx.formats.count("svg")) {
        write_heatmap_svg(ctx.output_dir / "pde_final.svg",
                          res.snapshots.back());
        outs.add("pde_final.svg");
        write_scatter_svg(ctx.output_dir / "abm_final.svg",
                          traj.snapshots.back());
        outs.add("abm_final.svg");
    }
    finish_manifest(ctx, outs, cfg.seed, t0);
    return exit_code::kOk;
}

int render(const ExperimentContext& ctx) {
    const auto t0 = clock_type::now();
    const std::string input = ctx.cfg.get_string("render.input", "");
    if (input.empty()) throw ConfigError("render.input must name an NDJSON file");
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot open " + input);
    std::string line, last;
    long want = ctx.cfg.get_long("render.snapshot", -1);
    long idx = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (want < 0 || idx == want) last = line;
        ++idx;
    }
    if (last.empty()) throw ConfigError("no snapshot found in " + input);
    const auto j = nlohmann::json::parse(last);
    SystemState s;
    s.time = j.at("t").get<double>();
    s.positions = j.at("positions").get<std::vector<double>>();
    s.opinions = j.at("opinions").get<std::vector<double>>();
    if (s.opinions.empty() || s.positions.size() % s.opinions.size() != 0)
        throw ConfigError("malformed snapshot in " + input);
    s.dim = static_cast<int>(s.positions.size() / s.opinions.size());

    RunOutputs outs;
    write_scatter_svg(ctx.output_dir / "render.svg", s);
    outs.add("render.svg");
    finish_manifest(ctx, outs, 0, t0);
    return exit_code::kOk;
}

int run_mode(const std::string& mode, const ExperimentContext& ctx) {
    try {
        std::filesystem::create_directories(ctx.output_dir);
        if (mode == "run-abm") return run_abm(ctx);
        if (mode == "run-pde") return run_pde(ctx);
        if (mode == "noise-sweep") return noise_sweep(ctx);
        if (mode == "chaos-study") return chaos_study(ctx);
        if (mode == "fluctuation-study") return fluctuation_study(ctx);
        if (mode == "compare-limits") return compare_limits(ctx);
        if (mode == "render") return render(ctx);
        std::cerr << "unknown mode: " << mode << '\n';
        return exit_code::kConfig;
    } catch (const StabilityError& e) {
        std::cerr << "stability refusal: " << e.what() << '\n';
        return exit_code::kStability;
    } catch (const BlowUpError& e) {
        std::cerr << "numerical blow-up: " << e.what() << '\n';
        return exit_code::kBlowUp;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    }
}

}  // namespace opdyn
