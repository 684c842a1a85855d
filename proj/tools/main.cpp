#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pipeline.hpp"
#include "sbench/config.hpp"

namespace {

using sbench::Config;
using namespace sbench::pipeline;

int dispatch(const std::string& cmd, const std::string& config_path, const Options& opt) {
    try {
        const Config cfg = Config::load(config_path);
        if (cmd == "gen") return cmd_gen(cfg, opt);
        if (cmd == "run") return cmd_run(cfg, opt);
        if (cmd == "profile") return cmd_profile(cfg, opt);
        if (cmd == "strategies") return cmd_strategies(cfg, opt);
        if (cmd == "report") return cmd_report(cfg, opt);
        std::cerr << "unknown subcommand: " << cmd << "\n";
        return kConfigError;
    } catch (const sbench::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const missing_artifact_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMissingStage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sbench - stochastic Ising solver benchmarking pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    Options opt;
    std::uint64_t seed_value = 0;
    bool seed_given = false;

    std::vector<CLI::App*> subs;
    for (const char* name : {"gen", "run", "profile", "strategies", "report"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the run configuration file")->required();
        sub->add_flag("--force", opt.force, "overwrite existing outputs");
        sub->add_option("--jobs", opt.jobs, "worker threads for independent jobs");
        sub->add_option("--seed", seed_value, "override the master seed")
            ->each([&](const std::string&) { seed_given = true; });
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_given) opt.seed_override = seed_value;

    for (const auto* sub : subs)
        if (sub->parsed()) return dispatch(sub->get_name(), config_path, opt);
    return kConfigError;
}
