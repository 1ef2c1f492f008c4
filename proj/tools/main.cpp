#include <cstdint>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opdyn/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Coupled opinion-position dynamics: agent-based and "
                 "mean-field experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir = "out";
    std::string formats = "csv,ndjson,svg";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::vector<std::string> overrides;

    for (const char* name :
         {"run-abm", "run-pde", "compare-limits", "noise-sweep", "chaos-study",
          "fluctuation-study", "render"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--output", output_dir, "output directory");
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--threads", threads, "worker thread count")
            ->check(CLI::PositiveNumber);
        sub->add_option("--format", formats,
                        "comma-separated subset of csv,ndjson,svg");
        sub->add_option("--set", overrides, "extra key=value override")
            ->take_all();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : opdyn::exit_code::kConfig;
    }

    opdyn::ExperimentContext ctx;
    try {
        if (!config_path.empty())
            ctx.cfg = opdyn::KeyValueConfig::from_file(config_path);
        for (const auto& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos)
                throw opdyn::ConfigError("--set wants key=value, got '" + ov +
                                         "'");
            ctx.cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
        }
        ctx.cfg.apply_env_overrides();
        if (seed_set) ctx.cfg.set("seed", std::to_string(seed));
    } catch (const opdyn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return opdyn::exit_code::kConfig;
    }

    ctx.output_dir = output_dir;
    ctx.threads = threads;
    ctx.formats.clear();
    std::istringstream fss(formats);
    std::string f;
    while (std::getline(fss, f, ',')) {
        if (f != "csv" && f != "ndjson" && f != "svg") {
            std::cerr << "config error: unknown format '" << f << "'\n";
            return opdyn::exit_code::kConfig;
        }
        ctx.formats.insert(f);
    }

    return opdyn::run_mode(app.get_subcommands().front()->get_name(), ctx);
}
