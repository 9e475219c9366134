#include "flowmut/workflow.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "flowmut/harness.hpp"
#include "flowmut/parser.hpp"
#include "flowmut/report.hpp"

namespace flowmut {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::set<int> read_id_list(const json& j, const std::string& what) {
    std::set<int> ids;
    if (!j.is_array()) throw ConfigError(what + " must be an array of mutant ids");
    for (const auto& e : j) {
        if (!e.is_number_integer() || e.get<int>() <= 0)
            throw ConfigError(what + " must contain positive mutant ids");
        ids.insert(e.get<int>());
    }
    return ids;
}

std::map<std::string, std::set<int>> read_id_map(const json& j, const std::string& what,
                                                 const std::vector<std::string>& programs) {
    std::map<std::string, std::set<int>> out;
    if (j.is_array()) {
        if (programs.size() != 1)
            throw ConfigError(what + ": a flat id list needs exactly one configured program; "
                                     "use an object keyed by program name");
        out[programs[0]] = read_id_list(j, what);
        return out;
    }
    if (!j.is_object())
        throw ConfigError(what + " must be an id array or an object keyed by program name");
    for (auto it = j.begin(); it != j.end(); ++it)
        out[it.key()] = read_id_list(it.value(), what + "." + it.key());
    return out;
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    fs::path path(p);
    if (path.is_absolute() || base_dir.empty()) return p;
    return (fs::path(base_dir) / path).string();
}

}  // namespace

RunConfig parse_config_json(const std::string& text, const std::string& where,
                            const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(where + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(where + ": config must be a JSON object");

    static const std::set<std::string> kKnown = {
        "sources",        "programs",      "tests",
        "operators",      "reduction-rules", "equivalent-mutants",
        "force-mutants",  "workers",       "short-circuit",
        "out-dir",
    };
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!kKnown.count(it.key()))
            throw ConfigError(where + ": unknown config key '" + it.key() + "'");

    RunConfig cfg;
    if (!doc.contains("sources") || !doc["sources"].is_array() || doc["sources"].empty())
        throw ConfigError(where + ": \"sources\" must list at least one .dflow file");
    for (const auto& s : doc["sources"]) {
        if (!s.is_string()) throw ConfigError(where + ": \"sources\" entries must be strings");
        cfg.sources.push_back(resolve_path(base_dir, s.get<std::string>()));
    }
    if (!doc.contains("programs") || !doc["programs"].is_array() || doc["programs"].empty())
        throw ConfigError(where + ": \"programs\" must list at least one program name");
    for (const auto& p : doc["programs"]) {
        if (!p.is_string()) throw ConfigError(where + ": \"programs\" entries must be strings");
        cfg.programs.push_back(p.get<std::string>());
    }
    if (doc.contains("tests")) {
        if (!doc["tests"].is_array()) throw ConfigError(where + ": \"tests\" must be an array");
        for (const auto& t : doc["tests"]) {
            if (!t.is_string()) throw ConfigError(where + ": \"tests\" entries must be strings");
            cfg.tests.push_back(resolve_path(base_dir, t.get<std::string>()));
        }
    }

    if (doc.contains("operators")) {
        if (!doc["operators"].is_array())
            throw ConfigError(where + ": \"operators\" must be an array");
        for (const auto& o : doc["operators"]) {
            auto op = o.is_string() ? operator_from_name(o.get<std::string>()) : std::nullopt;
            if (!op) throw ConfigError(where + ": unknown mutation operator " + o.dump());
            cfg.operators.insert(*op);
        }
    } else {
        for (auto op : all_operators()) cfg.operators.insert(op);
    }

    if (doc.contains("reduction-rules")) {
        if (!doc["reduction-rules"].is_array())
            throw ConfigError(where + ": \"reduction-rules\" must be an array");
        for (const auto& r : doc["reduction-rules"]) {
            auto rule = r.is_string() ? rule_from_name(r.get<std::string>()) : std::nullopt;
            if (!rule) throw ConfigError(where + ": unknown reduction rule " + r.dump());
            cfg.reduction_rules.insert(*rule);
        }
        // an explicitly empty list disables the reducer
    } else {
        for (auto r : all_rules()) cfg.reduction_rules.insert(r);
    }

    if (doc.contains("equivalent-mutants"))
        cfg.equivalent_mutants =
            read_id_map(doc["equivalent-mutants"], "equivalent-mutants", cfg.programs);
    if (doc.contains("force-mutants"))
        cfg.force_mutants = read_id_map(doc["force-mutants"], "force-mutants", cfg.programs);

    if (doc.contains("workers")) {
        if (!doc["workers"].is_number_integer() || doc["workers"].get<int>() < 1)
            throw ConfigError(where + ": \"workers\" must be a positive integer");
        cfg.workers = doc["workers"].get<int>();
    }
    if (doc.contains("short-circuit")) {
        if (!doc["short-circuit"].is_boolean())
            throw ConfigError(where + ": \"short-circuit\" must be a boolean");
        cfg.short_circuit = doc["short-circuit"].get<bool>();
    }
    if (doc.contains("out-dir")) {
        if (!doc["out-dir"].is_string())
            throw ConfigError(where + ": \"out-dir\" must be a string");
        cfg.out_dir = resolve_path(base_dir, doc["out-dir"].get<std::string>());
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::string base = fs::path(path).parent_path().string();
    return parse_config_json(read_file(path), path, base);
}

std::string source_hash(const RunConfig& config, const std::vector<std::string>& source_texts) {
    // FNV-1a, 64-bit
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    for (const auto& s : source_texts) mix(s);
    for (auto op : all_operators())
        if (config.operators.count(op)) mix(operator_name(op));
    for (auto r : all_rules())
        if (config.reduction_rules.count(r)) mix(rule_name(r));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct LoadedProject {
    std::vector<ProgramGraph> graphs;          // one per requested program
    std::map<std::string, TestSuite> suites;   // merged per program name
    std::string hash;
};

// parses sources and test suites; throws ConfigError with a message that
// already went to the log
LoadedProject load_project(const RunConfig& config, std::ostream& log) {
    LoadedProject project;
    std::vector<std::string> texts;
    std::vector<ProgramGraph> all;
    for (const auto& path : config.sources) {
        std::string text = read_file(path);
        ParseResult res = parse_source(text, path);
        for (const auto& d : res.diagnostics) log << to_string(d) << "\n";
        if (!res.ok()) throw ConfigError("parsing failed: " + path);
        for (auto& g : res.programs) {
            for (const auto& seen : all)
                if (seen.name == g.name)
                    throw ConfigError("program '" + g.name + "' is defined more than once");
            all.push_back(std::move(g));
        }
        texts.push_back(std::move(text));
    }
    project.hash = source_hash(config, texts);

    for (const auto& name : config.programs) {
        const ProgramGraph* found = nullptr;
        for (const auto& g : all)
            if (g.name == name) found = &g;
        if (!found) throw ConfigError("program '" + name + "' is not defined by the sources");
        project.graphs.push_back(*found);
    }

    for (const auto& path : config.tests) {
        std::string text = read_file(path);
        // a suite names its program; find the graph it belongs to
        json probe;
        try {
            probe = json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError(path + ": invalid JSON: " + e.what());
        }
        std::string prog = probe.is_object() && probe.contains("program") &&
                                   probe["program"].is_string()
                               ? probe["program"].get<std::string>()
                               : "";
        const ProgramGraph* graph = nullptr;
        for (const auto& g : project.graphs)
            if (g.name == prog) graph = &g;
        if (!graph)
            throw ConfigError(path + ": suite program '" + prog +
                              "' is not among the configured programs");
        TestSuite suite = load_test_suite(text, *graph, path);
        auto& merged = project.suites[prog];
        merged.program = prog;
        for (auto& t : suite.tests) merged.tests.push_back(std::move(t));
    }
    return project;
}

std::set<int> ids_for(const std::map<std::string, std::set<int>>& m, const std::string& program) {
    auto it = m.find(program);
    return it == m.end() ? std::set<int>{} : it->second;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string score_line(const MutationScore& s) {
    std::ostringstream out;
    out << "killed " << s.killed << "/" << s.total << ", equivalent " << s.equivalent
        << ", removed " << s.removed << ", survived "
        << (s.total - s.killed - s.equivalent) << ", ms=";
    if (s.ms.has_value()) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", s.ms->to_double());
        out << buf;
    } else {
        out << "-";
    }
    return out.str();
}

RunState make_state(const std::string& hash, const std::string& program,
                    const std::vector<Mutant>& mutants, const KillMatrix& matrix) {
    RunState state;
    state.source_hash = hash;
    state.program = program;
    for (const auto& m : mutants) {
        PriorResult r;
        r.status = m.status;
        const MutantRow* row = matrix.row(m.id);
        if (row) {
            r.killed_by = row->killed_by;
            r.executed_tests = row->executed_tests;
            r.killing_tests = row->killing_tests;
        }
        state.results[m.id] = std::move(r);
    }
    return state;
}

// shared tail of run/alive: statuses are assigned, write everything out
void finalize_program(const ProgramGraph& graph, std::vector<Mutant>& mutants,
                      const KillMatrix& matrix, const std::string& hash,
                      const RunConfig& config, const Timings& timings, std::ostream& log) {
    MutationReport report = build_report(graph, mutants, matrix, hash, timings);
    fs::path out_dir = fs::path(config.out_dir) / graph.name;
    emit_reports(report, out_dir.string());
    write_file(out_dir / "state.json", state_json(make_state(hash, graph.name, mutants, matrix)));
    log << graph.name << ": " << score_line(report.score) << "\n";
    log << graph.name << ": reports written to " << out_dir.string() << "\n";
}

int require_original_passes(const ProgramGraph& graph, const std::vector<TestCase>& tests,
                            std::ostream& log) {
    std::vector<CellVerdict> verdicts = run_original(graph, tests);
    bool ok = true;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (verdicts[i] == CellVerdict::Pass) continue;
        ok = false;
        log << graph.name << ": test '" << tests[i].name << "' "
            << (verdicts[i] == CellVerdict::Fail ? "fails" : "hits a runtime error")
            << " on the original program\n";
    }
    if (!ok) log << graph.name << ": fix the program or the tests before mutating\n";
    return ok ? kExitOk : kExitOriginalFailed;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& log) {
    try {
        auto t_start = std::chrono::steady_clock::now();
        LoadedProject project = load_project(config, log);
        for (const auto& graph : project.graphs) {
            auto t_gen = std::chrono::steady_clock::now();
            std::vector<Mutant> mutants = generate_mutants(graph, config.operators);
            mutants = reduce_mutants(std::move(mutants), config.reduction_rules, config.operators);
            MetaMutant meta = build_meta_mutant(graph, std::move(mutants));
            double generation_s = seconds_since(t_gen);
            log << graph.name << ": " << meta.mutants.size() << " mutants generated\n";

            const std::vector<TestCase>& tests = project.suites[graph.name].tests;
            int rc = require_original_passes(graph, tests, log);
            if (rc != kExitOk) return rc;

            RunOptions options;
            options.short_circuit = config.short_circuit;
            options.workers = config.workers;
            options.equivalent_ids = ids_for(config.equivalent_mutants, graph.name);
            options.force_ids = ids_for(config.force_mutants, graph.name);

            auto t_exec = std::chrono::steady_clock::now();
            KillMatrix matrix = run_mutants(meta, tests, options);
            double execution_s = seconds_since(t_exec);

            assign_statuses(meta.mutants, matrix, options.equivalent_ids);
            Timings timings{generation_s, execution_s, seconds_since(t_start)};
            finalize_program(graph, meta.mutants, matrix, project.hash, config, timings, log);
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

int cmd_alive(const RunConfig& config, std::ostream& log) {
    try {
        auto t_start = std::chrono::steady_clock::now();
        LoadedProject project = load_project(config, log);
        for (const auto& graph : project.graphs) {
            fs::path state_path = fs::path(config.out_dir) / graph.name / "state.json";
            if (!fs::exists(state_path)) {
                log << graph.name << ": no prior report at " << state_path.string()
                    << "; run `flowmut run` first\n";
                return kExitStale;
            }
            RunState prior = parse_state_json(read_file(state_path.string()));
            if (prior.source_hash != project.hash) {
                log << graph.name
                    << ": sources or mutation settings changed since the last run; "
                       "rerun `flowmut run`\n";
                return kExitStale;
            }

            auto t_gen = std::chrono::steady_clock::now();
            std::vector<Mutant> mutants = generate_mutants(graph, config.operators);
            mutants = reduce_mutants(std::move(mutants), config.reduction_rules, config.operators);
            MetaMutant meta = build_meta_mutant(graph, std::move(mutants));
            double generation_s = seconds_since(t_gen);

            const std::vector<TestCase>& tests = project.suites[graph.name].tests;
            int rc = require_original_passes(graph, tests, log);
            if (rc != kExitOk) return rc;

            RunOptions options;
            options.short_circuit = config.short_circuit;
            options.workers = config.workers;
            options.equivalent_ids = ids_for(config.equivalent_mutants, graph.name);
            options.force_ids = ids_for(config.force_mutants, graph.name);

            auto t_exec = std::chrono::steady_clock::now();
            KillMatrix matrix;
            try {
                matrix = rerun_alive(prior.results, meta, tests, options);
            } catch (const StaleReportError& e) {
                log << graph.name << ": " << e.what() << "\n";
                return kExitStale;
            }
            double execution_s = seconds_since(t_exec);

            int reran = 0;
            for (const auto& [id, r] : prior.results)
                if (r.status == MutantStatus::Survived && !options.equivalent_ids.count(id))
                    ++reran;
            log << graph.name << ": re-executed " << reran << " surviving mutant(s)\n";

            // statuses start from the prior run so removed/killed stick
            for (auto& m : meta.mutants) {
                auto it = prior.results.find(m.id);
                if (it != prior.results.end() && it->second.status != MutantStatus::Generated)
                    m.status = it->second.status == MutantStatus::Equivalent
                                   ? MutantStatus::Survived  // re-evaluated against current tags
                                   : it->second.status;
            }
            assign_statuses(meta.mutants, matrix, options.equivalent_ids);
            Timings timings{generation_s, execution_s, seconds_since(t_start)};
            finalize_program(graph, meta.mutants, matrix, project.hash, config, timings, log);
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

namespace {

void print_outcome(const ExecutionOutcome& outcome, std::ostream& log) {
    if (!outcome.ok()) {
        log << "runtime error at site " << outcome.error->site << ": " << outcome.error->message
            << "\n";
        return;
    }
    for (const auto& [name, data] : outcome.outputs) {
        log << "  " << name << " = [";
        for (std::size_t i = 0; i < data.elements.size(); ++i) {
            if (i) log << ", ";
            log << data.elements[i].to_string();
        }
        log << "]\n";
    }
}

}  // namespace

int cmd_exec(const RunConfig& config, std::optional<int> mutant_id,
             std::optional<std::string> test_name, std::ostream& log) {
    try {
        LoadedProject project = load_project(config, log);
        for (const auto& graph : project.graphs) {
            std::vector<Mutant> mutants = generate_mutants(graph, config.operators);
            mutants = reduce_mutants(std::move(mutants), config.reduction_rules, config.operators);
            MetaMutant meta = build_meta_mutant(graph, std::move(mutants));

            const Mutant* mutant = nullptr;
            if (mutant_id.has_value()) {
                mutant = meta.find(*mutant_id);
                if (!mutant) {
                    log << "error: program '" << graph.name << "' has no mutant "
                        << *mutant_id << "\n";
                    return kExitConfigError;
                }
                if (mutant->status == MutantStatus::Removed &&
                    !ids_for(config.force_mutants, graph.name).count(mutant->id))
                    log << "warning: mutant " << mutant->id
                        << " was removed by rule "
                        << (mutant->removed_by ? rule_name(*mutant->removed_by) : "?")
                        << "; executing anyway\n";
                log << "mutant " << mutant->id << " (" << operator_name(mutant->op)
                    << "): " << mutant->description << "\n";
                ProgramGraph patched = apply_patch(graph, mutant->patch);
                log << format_program(patched);
            }

            const std::vector<TestCase>& tests = project.suites[graph.name].tests;
            std::vector<const TestCase*> selected;
            for (const auto& t : tests)
                if (!test_name.has_value() || t.name == *test_name) selected.push_back(&t);
            if (test_name.has_value() && selected.empty()) {
                log << "error: program '" << graph.name << "' has no test named '" << *test_name
                    << "'\n";
                return kExitConfigError;
            }
            for (const TestCase* t : selected) {
                ExecutionOutcome outcome =
                    mutant ? execute_with_patch(graph, t->inputs, &mutant->patch)
                           : execute(graph, t->inputs);
                CellVerdict v = judge(outcome, *t);
                log << graph.name << " / " << t->name << ": " << verdict_name(v) << "\n";
                print_outcome(outcome, log);
            }
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace flowmut
