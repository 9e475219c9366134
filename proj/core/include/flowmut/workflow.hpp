#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowmut/mutation.hpp"

namespace flowmut {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitOriginalFailed = 1,  // the original program failed its tests
    kExitConfigError = 2,     // config / parse / type problems
    kExitStale = 3,           // prior state missing or out of date
};

struct RunConfig {
    std::vector<std::string> sources;   // .dflow paths
    std::vector<std::string> programs;  // program names to mutate
    std::vector<std::string> tests;     // test-suite paths
    std::set<MutationOperatorId> operators;      // default: all fifteen
    std::set<ReductionRuleId> reduction_rules;   // default: all six; empty disables
    /// Mutant ids per program name. A flat list in the config file is
    /// accepted when exactly one program is configured.
    std::map<std::string, std::set<int>> equivalent_mutants;
    std::map<std::string, std::set<int>> force_mutants;
    int workers = 1;
    bool short_circuit = false;
    std::string out_dir = "out";
};

/// Loads flowmut.json. Throws ConfigError on malformed content.
RunConfig load_config_file(const std::string& path);
RunConfig parse_config_json(const std::string& text, const std::string& where,
                            const std::string& base_dir);

/// Content hash of all sources plus the operators/rules configuration;
/// used for stale-report detection.
std::string source_hash(const RunConfig& config, const std::vector<std::string>& source_texts);

/// Full workflow: parse, validate, generate, reduce, build the
/// meta-mutant, run the original, run the mutants, analyze and write
/// report.json / report.html per program under out-dir/<program>/.
/// Survivors are information, not failure.
int cmd_run(const RunConfig& config, std::ostream& log);

/// Re-executes only the surviving mutants of the previous run (minus the
/// ones now tagged equivalent, plus forced ones) and rewrites the reports.
int cmd_alive(const RunConfig& config, std::ostream& log);

/// Debug path: executes the original (or one mutant) on one test (or all)
/// and prints outcomes and verdicts.
int cmd_exec(const RunConfig& config, std::optional<int> mutant_id,
             std::optional<std::string> test_name, std::ostream& log);

}  // namespace flowmut
