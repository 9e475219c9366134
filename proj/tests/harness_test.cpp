#include <doctest.h>

#include "flowmut/harness.hpp"
#include "flowmut/parser.hpp"
#include "support.hpp"

using namespace flowmut;

namespace {

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

MetaMutant word_count_meta(const ProgramGraph& g) {
    auto mutants =
        reduce_mutants(generate_mutants(g, every_operator()), every_rule(), every_operator());
    return build_meta_mutant(g, std::move(mutants));
}

std::set<int> survivors(const std::vector<Mutant>& mutants) {
    std::set<int> out;
    for (const auto& m : mutants)
        if (m.status == MutantStatus::Survived) out.insert(m.id);
    return out;
}

}  // namespace

TEST_CASE("suite decoding is type-directed and strict") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    TestSuite suite = testsupport::load_fixture_suite("word_count.tests.json", g);
    CHECK(suite.program == "word_count");
    REQUIRE(suite.tests.size() == 3);
    CHECK(suite.tests[0].name == "basic");
    CHECK(suite.tests[0].expects[0].mode == CompareMode::UnorderedMultiset);
    CHECK(check_suite(suite, g).empty());

    auto bad = [&](const std::string& json) {
        CHECK_THROWS_AS(load_test_suite(json, g, "inline"), ConfigError);
    };
    bad("{");                                                       // not JSON
    bad("{\"program\": \"other\", \"tests\": []}");                 // wrong program
    bad("{\"program\": \"word_count\"}");                           // no tests
    bad("{\"program\": \"word_count\", \"tests\": [{\"name\": \"t\", "
        "\"inputs\": {\"nope\": []}}]}");                           // unknown input
    bad("{\"program\": \"word_count\", \"tests\": [{\"name\": \"t\", "
        "\"inputs\": {\"lines\": [1]}}]}");                         // int where string expected
    bad("{\"program\": \"word_count\", \"tests\": [{\"name\": \"t\", "
        "\"inputs\": {\"lines\": []}, \"expect\": [{\"output\": \"counts\", "
        "\"mode\": \"sideways\", \"values\": []}]}]}");             // unknown mode
    bad("{\"program\": \"word_count\", \"tests\": [{\"name\": \"t\", "
        "\"inputs\": {\"lines\": []}, \"expect\": [{\"output\": \"counts\", "
        "\"values\": [[\"a\", 1.5]]}]}]}");                         // float where int expected
}

TEST_CASE("ints and floats are distinguished by the decimal point") {
    ProgramGraph g = testsupport::parse_one(
        "program floats\ninput xs: list<float>\noutput xs\n");
    CHECK_THROWS_AS(load_test_suite("{\"program\": \"floats\", \"tests\": [{\"name\": \"t\", "
                                    "\"inputs\": {\"xs\": [1]}}]}",
                                    g, "inline"),
                    ConfigError);
    TestSuite ok = load_test_suite("{\"program\": \"floats\", \"tests\": [{\"name\": \"t\", "
                                   "\"inputs\": {\"xs\": [1.0]}}]}",
                                   g, "inline");
    CHECK(ok.tests[0].inputs.at("xs").elements[0] == Value::of_float(1.0));
}

TEST_CASE("run_original verdicts") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    TestSuite suite = testsupport::load_fixture_suite("word_count.tests.json", g);
    auto verdicts = run_original(g, suite.tests);
    for (auto v : verdicts) CHECK(v == CellVerdict::Pass);

    // same test with a wrong expectation fails
    TestSuite bad = load_test_suite(
        "{\"program\": \"word_count\", \"tests\": [{\"name\": \"wrong\", "
        "\"inputs\": {\"lines\": [\"a b\", \"b\"]}, \"expect\": [{\"output\": \"counts\", "
        "\"values\": [[\"a\", 2]]}]}]}",
        g, "inline");
    CHECK(run_original(g, bad.tests)[0] == CellVerdict::Fail);
}

TEST_CASE("comparison modes: unordered, ordered, size, tolerance") {
    ProgramGraph g = testsupport::parse_one(
        "program p\ninput xs: list<float>\nys = xs.map(x -> x + 0.1)\noutput ys\n");
    DatasetInstance in;
    in.elem = ValueType::float_type();
    in.elements = {Value::of_float(0.2), Value::of_float(0.0)};
    auto outcome = execute(g, {{"xs", in}});
    REQUIRE(outcome.ok());

    TestCase t;
    t.inputs = {{"xs", in}};
    Expectation ex;
    ex.output = "ys";

    ex.mode = CompareMode::UnorderedMultiset;
    ex.values = {Value::of_float(0.1), Value::of_float(0.3)};  // 0.2 + 0.1 != 0.3 exactly
    t.expects = {ex};
    CHECK(judge(outcome, t) == CellVerdict::Pass);

    t.expects[0].tolerance = 1e-18;
    CHECK(judge(outcome, t) == CellVerdict::Fail);

    t.expects[0].tolerance = 1e-9;
    t.expects[0].mode = CompareMode::OrderedSequence;
    CHECK(judge(outcome, t) == CellVerdict::Fail);  // order differs
    t.expects[0].values = {Value::of_float(0.3), Value::of_float(0.1)};
    CHECK(judge(outcome, t) == CellVerdict::Pass);

    t.expects[0].mode = CompareMode::Size;
    t.expects[0].size = 2;
    CHECK(judge(outcome, t) == CellVerdict::Pass);
    t.expects[0].size = 3;
    CHECK(judge(outcome, t) == CellVerdict::Fail);
}

TEST_CASE("the committed word_count suite kills everything but the num_1 mutant") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    MetaMutant meta = word_count_meta(g);
    TestSuite suite = testsupport::load_fixture_suite("word_count.tests.json", g);

    RunOptions options;
    KillMatrix matrix = run_mutants(meta, suite.tests, options);
    assign_statuses(meta.mutants, matrix, {});
    CHECK(survivors(meta.mutants) == std::set<int>{9});  // (w, 1) -> (w, 1)

    // tagging it equivalent empties the survivor set
    assign_statuses(meta.mutants, matrix, {9});
    CHECK(survivors(meta.mutants).empty());
    int equivalent = 0;
    for (const auto& m : meta.mutants)
        if (m.status == MutantStatus::Equivalent) ++equivalent;
    CHECK(equivalent == 1);
}

TEST_CASE("an empty suite leaves every mutant alive with zero executions") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    MetaMutant meta = word_count_meta(g);
    KillMatrix matrix = run_mutants(meta, {}, {});
    assign_statuses(meta.mutants, matrix, {});
    for (const auto& m : meta.mutants) {
        if (m.status == MutantStatus::Removed) continue;
        CHECK(m.status == MutantStatus::Survived);
        CHECK(matrix.row(m.id)->executed_tests == 0);
    }
}

TEST_CASE("short-circuit changes executed counts but never statuses") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    MetaMutant meta = word_count_meta(g);
    TestSuite suite = testsupport::load_fixture_suite("word_count.tests.json", g);

    RunOptions full;
    RunOptions quick;
    quick.short_circuit = true;
    KillMatrix a = run_mutants(meta, suite.tests, full);
    KillMatrix b = run_mutants(meta, suite.tests, quick);

    auto mutants_a = meta.mutants;
    auto mutants_b = meta.mutants;
    assign_statuses(mutants_a, a, {});
    assign_statuses(mutants_b, b, {});
    bool some_shorter = false;
    for (std::size_t i = 0; i < mutants_a.size(); ++i) {
        CHECK(mutants_a[i].status == mutants_b[i].status);
        const auto* ra = a.row(mutants_a[i].id);
        const auto* rb = b.row(mutants_b[i].id);
        CHECK(rb->executed_tests <= ra->executed_tests);
        if (rb->executed_tests < ra->executed_tests) some_shorter = true;
    }
    CHECK(some_shorter);
}

TEST_CASE("kill verdicts are independent of the worker count") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    MetaMutant meta = word_count_meta(g);
    TestSuite suite = testsupport::load_fixture_suite("word_count.tests.json", g);

    RunOptions one;
    RunOptions four;
    four.workers = 4;
    KillMatrix a = run_mutants(meta, suite.tests, one);
    KillMatrix b = run_mutants(meta, suite.tests, four);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].mutant_id == b.rows[i].mutant_id);
        CHECK(a.rows[i].cells == b.rows[i].cells);
        CHECK(a.rows[i].killed_by == b.rows[i].killed_by);
    }
}

TEST_CASE("forced removed mutants execute and rejoin the active set") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    MetaMutant meta = word_count_meta(g);
    TestSuite suite = testsupport::load_fixture_suite("word_count.tests.json", g);

    RunOptions options;
    options.force_ids = {20};  // the ATR swap removed by ATRC; a + b is commutative
    KillMatrix matrix = run_mutants(meta, suite.tests, options);
    assign_statuses(meta.mutants, matrix, {});
    const Mutant* forced = meta.find(20);
    CHECK(forced->status == MutantStatus::Survived);
    CHECK(matrix.row(20)->executed_tests == 3);
}

TEST_CASE("runtime errors in a mutant count as kills") {
    // deleting the ERROR filter lets the tab-less INFO row reach the
    // field extractor, where tail(tail(...)) runs out of elements
    ProgramGraph g = testsupport::load_fixture_program("log_analysis.dflow");
    auto mutants = generate_mutants(g, every_operator());
    MetaMutant meta = build_meta_mutant(g, std::move(mutants));
    TestSuite suite = load_test_suite(
        "{\"program\": \"log_analysis\", \"tests\": [{\"name\": \"tabless_row\", "
        "\"inputs\": {\"logs\": [\"ERROR\\ta\\tfoo\", \"INFO\"]}, "
        "\"expect\": [{\"output\": \"foos\", \"values\": [\"foo\"]}]}]}",
        g, "inline");
    REQUIRE(run_original(g, suite.tests)[0] == CellVerdict::Pass);

    RunOptions options;
    KillMatrix matrix = run_mutants(meta, suite.tests, options);
    const MutantRow* row = matrix.row(10);  // UTD deleting the first filter
    REQUIRE(row != nullptr);
    CHECK(row->cells[0] == CellVerdict::RuntimeError);
    assign_statuses(meta.mutants, matrix, {});
    CHECK(meta.find(10)->status == MutantStatus::Killed);
}

TEST_CASE("rerun_alive bookkeeping") {
    ProgramGraph g = testsupport::load_fixture_program("word_count.dflow");
    MetaMutant meta = word_count_meta(g);
    TestSuite partial = testsupport::load_fixture_suite("word_count.partial.tests.json", g);
    TestSuite full = testsupport::load_fixture_suite("word_count.tests.json", g);

    RunOptions options;
    KillMatrix first = run_mutants(meta, partial.tests, options);
    assign_statuses(meta.mutants, first, {});
    CHECK(survivors(meta.mutants) == std::set<int>{9, 18, 19});

    std::map<int, PriorResult> prior;
    for (const auto& m : meta.mutants) {
        PriorResult p;
        p.status = m.status;
        const MutantRow* row = first.row(m.id);
        p.killed_by = row->killed_by;
        p.executed_tests = row->executed_tests;
        p.killing_tests = row->killing_tests;
        prior[m.id] = p;
    }

    SUBCASE("a new killing test reduces the survivors") {
        KillMatrix second = rerun_alive(prior, meta, full.tests, options);
        auto mutants = meta.mutants;
        assign_statuses(mutants, second, {});
        CHECK(survivors(mutants) == std::set<int>{9});
        // previously killed mutants are carried, not re-executed
        CHECK(second.row(1)->executed_tests == prior.at(1).executed_tests);
        CHECK(second.row(1)->killed_by == prior.at(1).killed_by);
        // survivors were executed against the whole current suite
        CHECK(second.row(18)->executed_tests == 3);
        CHECK(second.row(18)->killed_by == std::vector<std::string>{"triple"});
    }

    SUBCASE("all killed means nothing to execute") {
        for (auto& [id, p] : prior)
            if (p.status == MutantStatus::Survived) p.status = MutantStatus::Killed;
        KillMatrix second = rerun_alive(prior, meta, full.tests, options);
        for (const auto& row : second.rows) CHECK(row.executed_tests <= 2);
    }

    SUBCASE("tagging survivors equivalent skips their execution") {
        RunOptions tagged;
        tagged.equivalent_ids = {9, 18, 19};
        KillMatrix second = rerun_alive(prior, meta, full.tests, tagged);
        CHECK(second.row(18)->executed_tests == prior.at(18).executed_tests);
        auto mutants = meta.mutants;
        assign_statuses(mutants, second, tagged.equivalent_ids);
        CHECK(survivors(mutants).empty());
    }

    SUBCASE("an id mismatch is a stale report") {
        prior.erase(9);
        CHECK_THROWS_AS(rerun_alive(prior, meta, full.tests, options), StaleReportError);
    }
}
