#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowmut/harness.hpp"
#include "flowmut/version.hpp"
#include "flowmut/workflow.hpp"

namespace {

struct CommonOpts {
    std::string config_path = "./flowmut.json";
    std::string out_dir;
    int workers = 0;
    std::vector<int> force_mutants;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Path to flowmut.json")
        ->capture_default_str();
    cmd->add_option("--out", opts.out_dir, "Output directory (overrides the config)");
    cmd->add_option("--workers", opts.workers, "Worker threads for mutant execution");
    cmd->add_option("--force-mutants", opts.force_mutants,
                    "Mutant ids to execute even if the reducer removed them")
        ->delimiter(',');
}

int load_and_override(const CommonOpts& opts, flowmut::RunConfig& cfg) {
    try {
        cfg = flowmut::load_config_file(opts.config_path);
    } catch (const flowmut::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return flowmut::kExitConfigError;
    }
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.workers > 0) cfg.workers = opts.workers;
    if (!opts.force_mutants.empty()) {
        if (cfg.programs.size() != 1) {
            std::cerr << "error: --force-mutants needs a single configured program; "
                         "use the config file's per-program form instead\n";
            return flowmut::kExitConfigError;
        }
        for (int id : opts.force_mutants) cfg.force_mutants[cfg.programs[0]].insert(id);
    }
    return flowmut::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowmut - mutation testing for dataflow pipelines"};
    app.set_version_flag("--version", std::string("flowmut ") + flowmut::kToolVersion);
    app.require_subcommand(1);

    CommonOpts run_opts, alive_opts, exec_opts;
    int exec_mutant = 0;
    std::string exec_test;

    CLI::App* run = app.add_subcommand("run", "Run the full mutation testing workflow");
    add_common(run, run_opts);

    CLI::App* alive = app.add_subcommand(
        "alive", "Re-run only the mutants that survived the previous run");
    add_common(alive, alive_opts);

    CLI::App* exec = app.add_subcommand(
        "exec", "Execute the original program or one mutant on the tests");
    add_common(exec, exec_opts);
    CLI::Option* mutant_opt =
        exec->add_option("--mutant", exec_mutant, "Mutant id to activate (default: original)");
    CLI::Option* test_opt =
        exec->add_option("--test", exec_test, "Run a single named test (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return flowmut::kExitConfigError;
    }

    flowmut::RunConfig cfg;
    if (run->parsed()) {
        int rc = load_and_override(run_opts, cfg);
        if (rc != flowmut::kExitOk) return rc;
        return flowmut::cmd_run(cfg, std::cout);
    }
    if (alive->parsed()) {
        int rc = load_and_override(alive_opts, cfg);
        if (rc != flowmut::kExitOk) return rc;
        return flowmut::cmd_alive(cfg, std::cout);
    }
    if (exec->parsed()) {
        int rc = load_and_override(exec_opts, cfg);
        if (rc != flowmut::kExitOk) return rc;
        std::optional<int> mutant_id;
        if (mutant_opt->count() > 0) mutant_id = exec_mutant;
        std::optional<std::string> test_name;
        if (test_opt->count() > 0) test_name = exec_test;
        return flowmut::cmd_exec(cfg, mutant_id, test_name, std::cout);
    }
    return flowmut::kExitConfigError;
}
