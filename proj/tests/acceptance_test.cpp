// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; run via
// `ctest -R flowmut_acceptance` or the binary directly.
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>
#include <sys/wait.h>

#include "flowmut/report.hpp"
#include "flowmut/workflow.hpp"
#include "support.hpp"

using namespace flowmut;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Criterion {
public:
    Criterion(int number, std::string title)
        : number_(number), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}
    ~Criterion() {
        bool failed = std::uncaught_exceptions() > 0;
        std::printf("[%s] criterion %d: %s (%.2fs)\n", failed ? "FAIL" : "PASS", number_,
                    title_.c_str(), elapsed());
        std::fflush(stdout);
    }
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    int number_;
    std::string title_;
    std::chrono::steady_clock::time_point start_;
};

OperatorSet every_operator() {
    OperatorSet ops;
    for (auto op : all_operators()) ops.insert(op);
    return ops;
}

RuleSet every_rule() {
    RuleSet rules;
    for (auto r : all_rules()) rules.insert(r);
    return rules;
}

std::map<MutationOperatorId, int> count_by_operator(const std::vector<Mutant>& ms) {
    std::map<MutationOperatorId, int> counts;
    for (const auto& m : ms) ++counts[m.op];
    return counts;
}

std::vector<std::string> variants_of(const std::vector<Mutant>& ms, MutationOperatorId op,
                                     int site) {
    std::vector<std::string> out;
    for (const auto& m : ms)
        if (m.op == op && m.sites[0] == site) out.push_back(m.variant);
    return out;
}

const char* kFixturePrograms[] = {
    "word_count",    "log_analysis",  "text_pipeline", "pair_pipeline", "set_pipeline",
    "join_pipeline", "sort_pipeline", "expr_pipeline", "fold_diff",
};

struct Project {
    testsupport::TempDir dir{"acceptance"};
    void add_fixture(const std::string& name) {
        testsupport::write_file(dir.path() / name,
                                testsupport::read_file(testsupport::fixture_path(name)));
    }
    void write(const std::string& name, const std::string& content) {
        testsupport::write_file(dir.path() / name, content);
    }
    std::string path(const std::string& name) const { return (dir.path() / name).string(); }
    ordered_json report(const std::string& program) const {
        return ordered_json::parse(
            testsupport::read_file(path("out/" + program + "/report.json")));
    }
};

RunConfig word_count_config(const Project& p, const std::string& tests_file) {
    RunConfig cfg;
    cfg.sources = {p.path("word_count.dflow")};
    cfg.programs = {"word_count"};
    cfg.tests = {p.path(tests_file)};
    cfg.operators = every_operator();
    cfg.reduction_rules = every_rule();
    cfg.equivalent_mutants["word_count"] = {9};
    cfg.out_dir = p.path("out");
    return cfg;
}

std::set<int> report_survivors(const ordered_json& doc) {
    std::set<int> out;
    for (const auto& m : doc["mutants"])
        if (m["status"] == "survived") out.insert(m["id"].get<int>());
    return out;
}

std::string strip_timings(const std::string& text) {
    auto doc = ordered_json::parse(text);
    doc.erase("timings");
    return doc.dump(2);
}

}  // namespace

TEST_CASE("criterion 1: operator-count oracle on word_count") {
    Criterion c(1, "word_count operator counts (MTR 10, UTD 2, DTI 3, ATR 5; total 20)");
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    auto mutants = generate_mutants(g, every_operator());

    auto counts = count_by_operator(mutants);
    REQUIRE(counts[MutationOperatorId::MTR] == 10);
    REQUIRE(counts[MutationOperatorId::UTD] == 2);
    REQUIRE(counts[MutationOperatorId::DTI] == 3);
    REQUIRE(counts[MutationOperatorId::ATR] == 5);
    REQUIRE(mutants.size() == 20);
    for (auto op : all_operators()) {
        if (op == MutationOperatorId::MTR || op == MutationOperatorId::UTD ||
            op == MutationOperatorId::DTI || op == MutationOperatorId::ATR)
            continue;
        REQUIRE(counts[op] == 0);
    }

    // the flatMap MTR subset: head, tail, reverse, nil, in that order
    REQUIRE(variants_of(mutants, MutationOperatorId::MTR, 0) ==
            std::vector<std::string>{"list_head", "list_tail", "list_reverse", "list_nil"});
    // one distinct insertion after each of the three sites
    std::vector<int> dti_sites;
    for (const auto& m : mutants)
        if (m.op == MutationOperatorId::DTI) dti_sites.push_back(m.sites[0]);
    REQUIRE(dti_sites == std::vector<int>{0, 1, 2});
    // the five aggregation replacements
    REQUIRE(variants_of(mutants, MutationOperatorId::ATR, 2) ==
            std::vector<std::string>{"first_arg", "second_arg", "dup_first", "dup_second",
                                     "swapped"});

    // committed hand enumeration, id for id
    std::istringstream fixture(
        testsupport::read_file(testsupport::fixture_path("word_count.mutants.txt")));
    std::string line;
    std::size_t row = 0;
    while (std::getline(fixture, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int id;
        std::string op, sites, variant;
        ls >> id >> op >> sites >> variant;
        REQUIRE(row < mutants.size());
        REQUIRE(mutants[row].id == id);
        REQUIRE(operator_name(mutants[row].op) == op);
        REQUIRE(std::to_string(mutants[row].sites[0]) == sites);
        REQUIRE(mutants[row].variant == variant);
        ++row;
    }
    REQUIRE(row == mutants.size());
    REQUIRE(c.elapsed() < 1.0);
}

TEST_CASE("criterion 2: operator-count oracle on set operations") {
    Criterion c(2, "subtract yields the 5 STR mutants, union 4");
    ProgramGraph sub = testsupport::load_fixture_program("set_single_subtract.dflow");
    auto ms = generate_mutants(sub, {MutationOperatorId::STR});
    REQUIRE(ms.size() == 5);
    REQUIRE(ms[0].variant == "to_union");
    REQUIRE(ms[1].variant == "to_intersection");
    REQUIRE(ms[2].variant == "keep_left");
    REQUIRE(ms[3].variant == "keep_right");
    REQUIRE(ms[4].variant == "swap_operands");

    ProgramGraph uni = testsupport::load_fixture_program("set_single_union.dflow");
    auto mu = generate_mutants(uni, {MutationOperatorId::STR});
    REQUIRE(mu.size() == 4);
    for (const auto& m : mu) REQUIRE(m.variant != "swap_operands");
}

TEST_CASE("criterion 3: reduction behavior") {
    Criterion c(3, "word_count loses exactly 6 mutants; UTDE/FTDS fire on log_analysis");
    ProgramGraph wc = testsupport::load_fixture_program("word_count.dflow");
    auto mutants =
        reduce_mutants(generate_mutants(wc, every_operator()), every_rule(), every_operator());
    std::map<ReductionRuleId, int> by_rule;
    int removed = 0;
    for (const auto& m : mutants) {
        if (m.status != MutantStatus::Removed) continue;
        ++removed;
        ++by_rule[*m.removed_by];
    }
    REQUIRE(removed == 6);
    REQUIRE(by_rule[ReductionRuleId::MTRR] == 4);
    REQUIRE(by_rule[ReductionRuleId::DTIE] == 1);
    REQUIRE(by_rule[ReductionRuleId::ATRC] == 1);
    REQUIRE(mutants.size() - removed == 14);

    ProgramGraph la = testsupport::load_fixture_program("log_analysis.dflow");
    auto reduced =
        reduce_mutants(generate_mutants(la, every_operator()), every_rule(), every_operator());
    int ftd_by_utde = 0, nftp_by_ftds = 0;
    for (const auto& m : reduced) {
        if (m.op == MutationOperatorId::FTD)
            if (m.status == MutantStatus::Removed && *m.removed_by == ReductionRuleId::UTDE)
                ++ftd_by_utde;
        if (m.op == MutationOperatorId::NFTP)
            if (m.status == MutantStatus::Removed && *m.removed_by == ReductionRuleId::FTDS)
                ++nftp_by_ftds;
    }
    REQUIRE(ftd_by_utde == 2);
    REQUIRE(nftp_by_ftds == 2);
}

TEST_CASE("criterion 4: meta-mutant identity and patch equivalence") {
    Criterion c(4, "meta-mutant == plain execution == apply_patch on 200 random inputs");
    std::mt19937_64 rng(1234);
    for (const char* name : kFixturePrograms) {
        CAPTURE(name);
        ProgramGraph g = testsupport::load_fixture_program(std::string(name) + ".dflow");
        MetaMutant meta = build_meta_mutant(g, generate_mutants(g, every_operator()));
        std::vector<ProgramGraph> patched;
        patched.reserve(meta.mutants.size());
        for (const auto& m : meta.mutants) patched.push_back(apply_patch(g, m.patch));

        for (int round = 0; round < 200; ++round) {
            InputBindings in = testsupport::random_inputs(g, rng);
            ExecutionOutcome none = execute_meta(meta, in, std::nullopt);
            REQUIRE(testsupport::outcomes_equivalent(none, execute(g, in)));
            for (std::size_t i = 0; i < meta.mutants.size(); ++i) {
                ExecutionOutcome via_meta = execute_meta(meta, in, meta.mutants[i].id);
                ExecutionOutcome via_patch = execute(patched[i], in);
                if (!testsupport::outcomes_equivalent(via_meta, via_patch)) {
                    CAPTURE(meta.mutants[i].id);
                    CAPTURE(meta.mutants[i].description);
                    REQUIRE(false);
                }
            }
        }
    }
    REQUIRE(c.elapsed() < 30.0);
}

TEST_CASE("criterion 5: mutation score formula in exact arithmetic") {
    Criterion c(5, "compute_score matches ms = DM / (M - EM) exactly");
    auto score_of = [](int killed, int total, int equivalent) {
        std::vector<Mutant> ms;
        int id = 1;
        for (int i = 0; i < killed; ++i) {
            Mutant m;
            m.id = id++;
            m.status = MutantStatus::Killed;
            ms.push_back(m);
        }
        for (int i = 0; i < equivalent; ++i) {
            Mutant m;
            m.id = id++;
            m.status = MutantStatus::Equivalent;
            ms.push_back(m);
        }
        for (int i = 0; i < total - killed - equivalent; ++i) {
            Mutant m;
            m.id = id++;
            m.status = MutantStatus::Survived;
            ms.push_back(m);
        }
        return compute_score(ms);
    };

    // NGramsCount: DM=22, M=27, EM=5 gives exactly 1.00
    MutationScore ngrams = score_of(22, 27, 5);
    REQUIRE(ngrams.ms.has_value());
    REQUIRE(*ngrams.ms == make_rational(1, 1));

    std::mt19937_64 rng(99);
    for (int i = 0; i < 20; ++i) {
        int m_total = 1 + static_cast<int>(rng() % 60);
        int em = static_cast<int>(rng() % (m_total + 1));
        int dm = em == m_total ? 0 : static_cast<int>(rng() % (m_total - em + 1));
        MutationScore s = score_of(dm, m_total, em);
        REQUIRE(s.ms.has_value());
        if (m_total == em) {
            REQUIRE(*s.ms == make_rational(1, 1));
        } else {
            // cross-multiplication checks the exact value without
            // reusing the implementation's normalization
            REQUIRE(s.ms->num * static_cast<long long>(m_total - em) ==
                    static_cast<long long>(dm) * s.ms->den);
            REQUIRE(s.ms->den > 0);
        }
    }
}

TEST_CASE("criterion 6: end-to-end kill on word_count") {
    Criterion c(6, "committed suite kills all 14 (1 tagged equivalent); one test fewer leaves "
                   "survivors");
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.tests.json");
    RunConfig cfg = word_count_config(p, "word_count.tests.json");

    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == kExitOk);
    auto doc = p.report("word_count");
    REQUIRE(doc["mutation_score"]["ms"] == 1.0);
    REQUIRE(doc["mutation_score"]["killed"] == 13);
    REQUIRE(doc["mutation_score"]["total"] == 14);
    REQUIRE(report_survivors(doc).empty());

    // the flowmut binary agrees end to end
    p.write("flowmut.json",
            "{\"sources\": [\"word_count.dflow\"], \"programs\": [\"word_count\"], "
            "\"tests\": [\"word_count.tests.json\"], \"equivalent-mutants\": [9], "
            "\"out-dir\": \"out_cli\"}");
    std::string command = std::string(FLOWMUT_BIN) + " run --config " + p.path("flowmut.json") +
                          " > " + p.path("cli.log") + " 2>&1";
    int status = std::system(command.c_str());
    REQUIRE(WIFEXITED(status));
    REQUIRE(WEXITSTATUS(status) == 0);
    REQUIRE(fs::exists(p.path("out_cli/word_count/report.json")));

    // drop the last test: the duplicated-fold mutants survive
    auto suite = ordered_json::parse(
        testsupport::read_file(testsupport::fixture_path("word_count.tests.json")));
    REQUIRE(suite["tests"].back()["name"] == "triple");
    suite["tests"].erase(suite["tests"].size() - 1);
    p.write("fewer.tests.json", suite.dump(2));
    RunConfig fewer = word_count_config(p, "fewer.tests.json");
    fewer.out_dir = p.path("out_fewer");
    REQUIRE(cmd_run(fewer, log) == kExitOk);
    auto doc2 = ordered_json::parse(
        testsupport::read_file(p.path("out_fewer/word_count/report.json")));
    REQUIRE(report_survivors(doc2).size() >= 1);
    REQUIRE(doc2["mutation_score"]["ms"].get<double>() < 1.0);
    REQUIRE(c.elapsed() < 10.0);
}

TEST_CASE("criterion 7: determinism across runs and worker counts") {
    Criterion c(7, "byte-identical report.json (minus timings) for workers 1 and 4");
    for (int workers : {1, 4}) {
        CAPTURE(workers);
        Project p;
        p.add_fixture("word_count.dflow");
        p.add_fixture("word_count.tests.json");
        RunConfig cfg = word_count_config(p, "word_count.tests.json");
        cfg.workers = workers;
        std::ostringstream log;
        REQUIRE(cmd_run(cfg, log) == kExitOk);
        std::string first = testsupport::read_file(p.path("out/word_count/report.json"));
        REQUIRE(cmd_run(cfg, log) == kExitOk);
        std::string second = testsupport::read_file(p.path("out/word_count/report.json"));
        REQUIRE(strip_timings(first) == strip_timings(second));
    }
}

TEST_CASE("criterion 8: interpreter semantics") {
    Criterion c(8, "golden files for every kind; fold permutation-invariance; ATR swap shows");
    // hand-computed golden outputs, covering all fifteen transformation
    // kinds including the outer joins' default substitution
    for (const char* name : kFixturePrograms) {
        CAPTURE(name);
        ProgramGraph g = testsupport::load_fixture_program(std::string(name) + ".dflow");
        TestSuite suite =
            testsupport::load_fixture_suite(std::string(name) + ".tests.json", g);
        REQUIRE(!suite.tests.empty());
        for (const auto& t : suite.tests) REQUIRE(judge(execute(g, t.inputs), t) == CellVerdict::Pass);
    }

    // a commutative, associative fold is invariant under input shuffles
    ProgramGraph wc = testsupport::load_fixture_program("word_count.dflow");
    ProgramGraph sums = testsupport::parse_one(
        "program sums\ninput xs: list<(string, int)>\nt = xs.reduceByKey((a, b) -> a + b)\n"
        "output t\n");
    DatasetInstance base;
    base.elem = ValueType::pair_type(ValueType::str_type(), ValueType::int_type());
    std::mt19937_64 rng(5);
    for (int i = 0; i < 24; ++i)
        base.elements.push_back(Value::pair(Value::of_str(std::string(1, 'a' + i % 5)),
                                            Value::of_int(static_cast<int>(rng() % 9) - 4)));
    auto canonical = [](std::vector<Value> vs) {
        std::sort(vs.begin(), vs.end(),
                  [](const Value& a, const Value& b) { return compare_total(a, b) < 0; });
        return vs;
    };
    auto reference = execute(sums, {{"xs", base}});
    REQUIRE(reference.ok());
    auto expected = canonical(reference.outputs.at("t").elements);
    for (int i = 0; i < 100; ++i) {
        DatasetInstance shuffled = base;
        std::shuffle(shuffled.elements.begin(), shuffled.elements.end(), rng);
        auto outcome = execute(sums, {{"xs", shuffled}});
        REQUIRE(outcome.ok());
        REQUIRE(canonical(outcome.outputs.at("t").elements) == expected);
    }

    // the swapped aggregation argument order shows on subtraction
    ProgramGraph fold = testsupport::load_fixture_program("fold_diff.dflow");
    auto mutants = generate_mutants(fold, {MutationOperatorId::ATR});
    const Mutant* swapped = nullptr;
    for (const auto& m : mutants)
        if (m.variant == "swapped") swapped = &m;
    REQUIRE(swapped != nullptr);
    TestSuite fold_suite = testsupport::load_fixture_suite("fold_diff.tests.json", fold);
    const TestCase& t = fold_suite.tests[0];
    auto original = execute(fold, t.inputs);
    auto mutated = execute(apply_patch(fold, swapped->patch), t.inputs);
    REQUIRE(original.ok());
    REQUIRE(mutated.ok());
    REQUIRE(!testsupport::outcomes_equivalent(original, mutated));
}

TEST_CASE("criterion 9: alive workflow") {
    Criterion c(9, "alive reruns exactly the prior survivors and refuses stale sources");
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.partial.tests.json");
    RunConfig cfg = word_count_config(p, "word_count.partial.tests.json");
    cfg.equivalent_mutants.clear();

    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == kExitOk);
    auto first = p.report("word_count");
    REQUIRE(report_survivors(first) == std::set<int>{9, 18, 19});

    // add the killing test and rerun only the survivors
    p.add_fixture("word_count.tests.json");
    RunConfig cfg2 = word_count_config(p, "word_count.tests.json");
    cfg2.equivalent_mutants.clear();
    REQUIRE(cmd_alive(cfg2, log) == kExitOk);
    auto doc = p.report("word_count");
    // survivors shrink exactly by what the new test kills (18 and 19)
    REQUIRE(report_survivors(doc) == std::set<int>{9});
    for (const auto& m : doc["mutants"]) {
        int id = m["id"].get<int>();
        if (id == 18 || id == 19)
            REQUIRE(m["killed_by"] == std::vector<std::string>{"triple"});
        // carried killed_by lists prove the killed mutants were not re-executed
        if (id == 1) REQUIRE(m["killed_by"] == std::vector<std::string>{"basic"});
    }
    REQUIRE(log.str().find("re-executed 3 surviving mutant(s)") != std::string::npos);

    // touching the source makes the prior state stale
    p.write("word_count.dflow",
            testsupport::read_file(testsupport::fixture_path("word_count.dflow")) + "#\n");
    REQUIRE(cmd_alive(cfg2, log) == kExitStale);
}
