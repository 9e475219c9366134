#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "flowmut/workflow.hpp"
#include "support.hpp"

using namespace flowmut;
namespace fs = std::filesystem;
using nlohmann::ordered_json;
using testsupport::TempDir;

namespace {

struct Project {
    TempDir dir{"workflow"};

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
    for (auto op : all_operators()) cfg.operators.insert(op);
    for (auto r : all_rules()) cfg.reduction_rules.insert(r);
    cfg.out_dir = p.path("out");
    return cfg;
}

std::set<int> report_survivors(const ordered_json& doc) {
    std::set<int> out;
    for (const auto& m : doc["mutants"])
        if (m["status"] == "survived") out.insert(m["id"].get<int>());
    return out;
}

}  // namespace

TEST_CASE("cmd_run: full workflow reaches ms=1.0 with the equivalent mutant tagged") {
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.tests.json");
    RunConfig cfg = word_count_config(p, "word_count.tests.json");
    cfg.equivalent_mutants["word_count"] = {9};

    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kExitOk);
    CHECK(fs::exists(p.path("out/word_count/report.json")));
    CHECK(fs::exists(p.path("out/word_count/report.html")));
    CHECK(fs::exists(p.path("out/word_count/state.json")));

    auto doc = p.report("word_count");
    CHECK(doc["program"] == "word_count");
    CHECK(doc["mutation_score"]["killed"] == 13);
    CHECK(doc["mutation_score"]["total"] == 14);
    CHECK(doc["mutation_score"]["equivalent"] == 1);
    CHECK(doc["mutation_score"]["removed"] == 6);
    CHECK(doc["mutation_score"]["ms"] == 1.0);
    CHECK(report_survivors(doc).empty());
    CHECK(log.str().find("ms=1.00") != std::string::npos);
}

TEST_CASE("cmd_run: config parsing accepts the documented shapes") {
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.tests.json");
    p.write("flowmut.json",
            "{\n"
            "  \"sources\": [\"word_count.dflow\"],\n"
            "  \"programs\": [\"word_count\"],\n"
            "  \"tests\": [\"word_count.tests.json\"],\n"
            "  \"equivalent-mutants\": [9],\n"
            "  \"workers\": 2,\n"
            "  \"out-dir\": \"out\"\n"
            "}\n");
    RunConfig cfg = load_config_file(p.path("flowmut.json"));
    CHECK(cfg.operators.size() == 15);          // defaults to every operator
    CHECK(cfg.reduction_rules.size() == 6);     // and every rule
    CHECK(cfg.equivalent_mutants.at("word_count") == std::set<int>{9});
    CHECK(cfg.workers == 2);

    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kExitOk);
    CHECK(p.report("word_count")["mutation_score"]["ms"] == 1.0);

    CHECK_THROWS_AS(parse_config_json("{\"programs\": []}", "x", ""), ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"sources\": [\"a\"], \"programs\": [\"p\"], "
                                      "\"wat\": 1}",
                                      "x", ""),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_json("{\"sources\": [\"a\"], \"programs\": [\"p\"], "
                                      "\"operators\": [\"XYZ\"]}",
                                      "x", ""),
                    ConfigError);
}

TEST_CASE("cmd_run: unknown program name exits 2 and names it") {
    Project p;
    p.add_fixture("word_count.dflow");
    RunConfig cfg = word_count_config(p, "word_count.tests.json");
    cfg.programs = {"no_such_program"};
    cfg.tests.clear();
    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kExitConfigError);
    CHECK(log.str().find("no_such_program") != std::string::npos);
}

TEST_CASE("cmd_run: a failing original stops before any mutant runs") {
    Project p;
    p.add_fixture("word_count.dflow");
    p.write("bad.tests.json",
            "{\"program\": \"word_count\", \"tests\": [{\"name\": \"wrong\", "
            "\"inputs\": {\"lines\": [\"a\"]}, \"expect\": [{\"output\": \"counts\", "
            "\"values\": [[\"a\", 2]]}]}]}");
    RunConfig cfg = word_count_config(p, "bad.tests.json");
    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kExitOriginalFailed);
    CHECK(!fs::exists(p.path("out/word_count/report.json")));
    CHECK(log.str().find("wrong") != std::string::npos);
}

TEST_CASE("cmd_run: duplicate program definitions exit 2") {
    Project p;
    std::string twice = testsupport::read_file(testsupport::fixture_path("word_count.dflow"));
    p.write("dup.dflow", twice + "\n" + twice);
    RunConfig cfg;
    cfg.sources = {p.path("dup.dflow")};
    cfg.programs = {"word_count"};
    for (auto op : all_operators()) cfg.operators.insert(op);
    cfg.out_dir = p.path("out");
    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kExitConfigError);
    CHECK(log.str().find("more than once") != std::string::npos);
}

TEST_CASE("cmd_run: parse errors exit 2 with diagnostics") {
    Project p;
    p.write("broken.dflow", "program p\ninput a: list<int>\nb = a.map(x -> )\noutput b\n");
    RunConfig cfg;
    cfg.sources = {p.path("broken.dflow")};
    cfg.programs = {"p"};
    for (auto op : all_operators()) cfg.operators.insert(op);
    cfg.out_dir = p.path("out");
    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kExitConfigError);
    CHECK(log.str().find("error") != std::string::npos);
}

TEST_CASE("cmd_run twice is byte-identical apart from timings") {
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

        auto strip = [](const std::string& text) {
            auto doc = ordered_json::parse(text);
            doc.erase("timings");
            return doc.dump(2);
        };
        CHECK(strip(first) == strip(second));
    }
}

TEST_CASE("cmd_run handles several programs in one file") {
    Project p;
    std::string both = testsupport::read_file(testsupport::fixture_path("word_count.dflow")) +
                       "\n" +
                       testsupport::read_file(testsupport::fixture_path("fold_diff.dflow"));
    p.write("both.dflow", both);
    p.add_fixture("word_count.tests.json");
    p.add_fixture("fold_diff.tests.json");

    RunConfig cfg;
    cfg.sources = {p.path("both.dflow")};
    cfg.programs = {"word_count", "fold_diff"};
    cfg.tests = {p.path("word_count.tests.json"), p.path("fold_diff.tests.json")};
    for (auto op : all_operators()) cfg.operators.insert(op);
    for (auto r : all_rules()) cfg.reduction_rules.insert(r);
    cfg.out_dir = p.path("out");

    std::ostringstream log;
    CHECK(cmd_run(cfg, log) == kExitOk);
    CHECK(fs::exists(p.path("out/word_count/report.json")));
    CHECK(fs::exists(p.path("out/fold_diff/report.json")));
    CHECK(p.report("fold_diff")["mutation_score"]["total"].get<int>() > 0);
}

TEST_CASE("alive workflow: reruns survivors only, refuses stale state") {
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.partial.tests.json");
    RunConfig cfg = word_count_config(p, "word_count.partial.tests.json");

    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == kExitOk);
    auto first = p.report("word_count");
    CHECK(report_survivors(first) == std::set<int>{9, 18, 19});
    CHECK(first["mutation_score"]["ms"].get<double>() < 1.0);

    SUBCASE("an added killing test removes exactly the mutants it kills") {
        // the prior kills keep their original killing tests: proof the
        // killed mutants were not re-executed
        p.add_fixture("word_count.tests.json");
        RunConfig cfg2 = word_count_config(p, "word_count.tests.json");
        REQUIRE(cmd_alive(cfg2, log) == kExitOk);
        auto doc = p.report("word_count");
        CHECK(report_survivors(doc) == std::set<int>{9});
        for (const auto& m : doc["mutants"]) {
            if (m["id"] == 1) CHECK(m["killed_by"] == std::vector<std::string>{"basic"});
            if (m["id"] == 18) CHECK(m["killed_by"] == std::vector<std::string>{"triple"});
            if (m["id"] == 19) CHECK(m["killed_by"] == std::vector<std::string>{"triple"});
        }
        CHECK(log.str().find("re-executed 3 surviving mutant(s)") != std::string::npos);
    }

    SUBCASE("tagging the survivors equivalent reaches ms=1.0 with zero executions") {
        RunConfig cfg2 = cfg;
        cfg2.equivalent_mutants["word_count"] = {9, 18, 19};
        REQUIRE(cmd_alive(cfg2, log) == kExitOk);
        auto doc = p.report("word_count");
        CHECK(doc["mutation_score"]["ms"] == 1.0);
        CHECK(doc["mutation_score"]["equivalent"] == 3);
        CHECK(log.str().find("re-executed 0 surviving mutant(s)") != std::string::npos);
    }

    SUBCASE("an unchanged suite changes nothing") {
        std::string before = testsupport::read_file(p.path("out/word_count/report.json"));
        REQUIRE(cmd_alive(cfg, log) == kExitOk);
        std::string after = testsupport::read_file(p.path("out/word_count/report.json"));
        auto strip = [](const std::string& text) {
            auto doc = ordered_json::parse(text);
            doc.erase("timings");
            return doc.dump(2);
        };
        CHECK(strip(before) == strip(after));
    }

    SUBCASE("source changes make the state stale") {
        p.write("word_count.dflow",
                testsupport::read_file(testsupport::fixture_path("word_count.dflow")) +
                    "# touched\n");
        CHECK(cmd_alive(cfg, log) == kExitStale);
    }

    SUBCASE("operator config changes also invalidate the state") {
        RunConfig cfg2 = cfg;
        cfg2.operators.erase(MutationOperatorId::ATR);
        CHECK(cmd_alive(cfg2, log) == kExitStale);
    }
}

TEST_CASE("alive without a prior report exits 3") {
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.tests.json");
    RunConfig cfg = word_count_config(p, "word_count.tests.json");
    std::ostringstream log;
    CHECK(cmd_alive(cfg, log) == kExitStale);
    CHECK(log.str().find("no prior report") != std::string::npos);
}

TEST_CASE("forcing a removed mutant resurrects it into the active set") {
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.tests.json");
    RunConfig cfg = word_count_config(p, "word_count.tests.json");
    cfg.equivalent_mutants["word_count"] = {9};
    cfg.force_mutants["word_count"] = {20};  // ATR swap over commutative +: survives

    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == kExitOk);
    auto doc = p.report("word_count");
    CHECK(doc["mutation_score"]["total"] == 15);
    CHECK(doc["mutation_score"]["removed"] == 5);
    CHECK(report_survivors(doc) == std::set<int>{20});
    CHECK(doc["mutation_score"]["ms"].get<double>() == doctest::Approx(13.0 / 14.0));
}

TEST_CASE("cmd_exec runs the original or one mutant on the tests") {
    Project p;
    p.add_fixture("word_count.dflow");
    p.add_fixture("word_count.tests.json");
    RunConfig cfg = word_count_config(p, "word_count.tests.json");

    std::ostringstream log;
    SUBCASE("original, one named test") {
        CHECK(cmd_exec(cfg, std::nullopt, std::string("basic"), log) == kExitOk);
        CHECK(log.str().find("word_count / basic: pass") != std::string::npos);
        CHECK(log.str().find("counts = [") != std::string::npos);
    }
    SUBCASE("mutant 16 fails the basic test") {
        CHECK(cmd_exec(cfg, 16, std::string("basic"), log) == kExitOk);
        CHECK(log.str().find("mutant 16 (ATR)") != std::string::npos);
        CHECK(log.str().find("word_count / basic: fail") != std::string::npos);
    }
    SUBCASE("removed mutants execute with a warning") {
        CHECK(cmd_exec(cfg, 20, std::string("basic"), log) == kExitOk);
        CHECK(log.str().find("warning: mutant 20 was removed by rule ATRC") !=
              std::string::npos);
    }
    SUBCASE("unknown ids and names exit 2") {
        CHECK(cmd_exec(cfg, 999, std::nullopt, log) == kExitConfigError);
        std::ostringstream log2;
        CHECK(cmd_exec(cfg, std::nullopt, std::string("nope"), log2) == kExitConfigError);
    }
}

TEST_CASE("source_hash tracks sources and mutation settings, not tests") {
    RunConfig a;
    for (auto op : all_operators()) a.operators.insert(op);
    for (auto r : all_rules()) a.reduction_rules.insert(r);
    RunConfig b = a;
    CHECK(source_hash(a, {"src"}) == source_hash(b, {"src"}));
    CHECK(source_hash(a, {"src"}) != source_hash(b, {"src2"}));
    b.operators.erase(MutationOperatorId::ATR);
    CHECK(source_hash(a, {"src"}) != source_hash(b, {"src"}));
    RunConfig c = a;
    c.tests = {"more.tests.json"};
    CHECK(source_hash(a, {"src"}) == source_hash(c, {"src"}));
}
