#include "flowmut/harness.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace flowmut {

namespace {

using nlohmann::json;

Value decode_value(const json& j, const ValueType& type, const std::string& where) {
    switch (type.kind()) {
    case ValueType::Kind::Int:
        if (!j.is_number_integer())
            throw ConfigError(where + ": expected an int (no decimal point), got " + j.dump());
        return Value::of_int(j.get<std::int64_t>());
    case ValueType::Kind::Float:
        if (!j.is_number())
            throw ConfigError(where + ": expected a float, got " + j.dump());
        if (j.is_number_integer())
            throw ConfigError(where + ": expected a float (use a decimal point), got " + j.dump());
        return Value::of_float(j.get<double>());
    case ValueType::Kind::Bool:
        if (!j.is_boolean()) throw ConfigError(where + ": expected a bool, got " + j.dump());
        return Value::of_bool(j.get<bool>());
    case ValueType::Kind::Str:
        if (!j.is_string()) throw ConfigError(where + ": expected a string, got " + j.dump());
        return Value::of_str(j.get<std::string>());
    case ValueType::Kind::Pair: {
        if (!j.is_array() || j.size() != 2)
            throw ConfigError(where + ": expected a pair as a 2-element array, got " + j.dump());
        return Value::pair(decode_value(j[0], type.key(), where),
                           decode_value(j[1], type.value(), where));
    }
    case ValueType::Kind::List: {
        if (!j.is_array())
            throw ConfigError(where + ": expected a list as an array, got " + j.dump());
        std::vector<Value> xs;
        xs.reserve(j.size());
        for (const auto& e : j) xs.push_back(decode_value(e, type.elem(), where));
        return Value::list(std::move(xs));
    }
    }
    throw ConfigError(where + ": bad value type");
}

std::vector<Value> decode_elements(const json& j, const ValueType& elem, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of elements");
    std::vector<Value> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(decode_value(e, elem, where));
    return out;
}

}  // namespace

TestSuite load_test_suite(const std::string& json_text, const ProgramGraph& graph,
                          const std::string& where) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(where + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("program") || !doc["program"].is_string())
        throw ConfigError(where + ": test suite needs a \"program\" name");
    TestSuite suite;
    suite.program = doc["program"].get<std::string>();
    if (suite.program != graph.name)
        throw ConfigError(where + ": suite is for program '" + suite.program +
                          "', not '" + graph.name + "'");
    if (!doc.contains("tests") || !doc["tests"].is_array())
        throw ConfigError(where + ": test suite needs a \"tests\" array");

    for (const auto& jt : doc["tests"]) {
        TestCase tc;
        if (!jt.contains("name") || !jt["name"].is_string())
            throw ConfigError(where + ": every test needs a \"name\"");
        tc.name = jt["name"].get<std::string>();
        const std::string at = where + ", test '" + tc.name + "'";

        if (!jt.contains("inputs") || !jt["inputs"].is_object())
            throw ConfigError(at + ": missing \"inputs\" object");
        for (auto it = jt["inputs"].begin(); it != jt["inputs"].end(); ++it) {
            const DatasetNode* d = graph.find_dataset_by_name(it.key());
            if (!d || !graph.is_input(d->id))
                throw ConfigError(at + ": '" + it.key() + "' is not an input dataset of '" +
                                  graph.name + "'");
            DatasetInstance inst;
            inst.elem = d->elem;
            inst.elements = decode_elements(it.value(), d->elem, at + ", input '" + it.key() + "'");
            tc.inputs[it.key()] = std::move(inst);
        }
        for (int id : graph.input_ids) {
            const DatasetNode& d = graph.dataset(id);
            if (!tc.inputs.count(d.name))
                throw ConfigError(at + ": missing input dataset '" + d.name + "'");
        }

        if (jt.contains("expect")) {
            if (!jt["expect"].is_array()) throw ConfigError(at + ": \"expect\" must be an array");
            for (const auto& je : jt["expect"]) {
                Expectation ex;
                if (!je.contains("output") || !je["output"].is_string())
                    throw ConfigError(at + ": every expectation needs an \"output\" name");
                ex.output = je["output"].get<std::string>();
                const ProgramOutput* out = nullptr;
                for (const auto& o : graph.outputs)
                    if (o.name == ex.output) out = &o;
                if (!out)
                    throw ConfigError(at + ": '" + ex.output + "' is not an output of '" +
                                      graph.name + "'");
                std::string mode = je.value("mode", std::string("unordered"));
                if (mode == "unordered") {
                    ex.mode = CompareMode::UnorderedMultiset;
                } else if (mode == "ordered") {
                    ex.mode = CompareMode::OrderedSequence;
                } else if (mode == "size") {
                    ex.mode = CompareMode::Size;
                } else {
                    throw ConfigError(at + ": unknown mode '" + mode +
                                      "' (use unordered, ordered or size)");
                }
                if (ex.mode == CompareMode::Size) {
                    if (!je.contains("size") || !je["size"].is_number_unsigned())
                        throw ConfigError(at + ": size mode needs a non-negative \"size\"");
                    ex.size = je["size"].get<std::size_t>();
                } else {
                    if (!je.contains("values"))
                        throw ConfigError(at + ": expectation needs \"values\"");
                    ex.values = decode_elements(je["values"], graph.dataset(out->dataset).elem,
                                                at + ", output '" + ex.output + "'");
                }
                if (je.contains("tolerance")) {
                    if (!je["tolerance"].is_number())
                        throw ConfigError(at + ": \"tolerance\" must be a number");
                    ex.tolerance = je["tolerance"].get<double>();
                }
                tc.expects.push_back(std::move(ex));
            }
        }
        suite.tests.push_back(std::move(tc));
    }
    return suite;
}

std::vector<std::string> check_suite(const TestSuite& suite, const ProgramGraph& graph) {
    std::vector<std::string> problems;
    if (suite.program != graph.name)
        problems.push_back("suite is for program '" + suite.program + "'");
    for (const auto& t : suite.tests) {
        for (const auto& [name, inst] : t.inputs) {
            const DatasetNode* d = graph.find_dataset_by_name(name);
            if (!d || !graph.is_input(d->id)) {
                problems.push_back("test '" + t.name + "': unknown input '" + name + "'");
            } else if (!(inst.elem == d->elem)) {
                problems.push_back("test '" + t.name + "': input '" + name + "' has type " +
                                   inst.elem.to_string() + ", expected " + d->elem.to_string());
            }
        }
    }
    return problems;
}

std::string verdict_name(CellVerdict v) {
    switch (v) {
    case CellVerdict::Pass: return "pass";
    case CellVerdict::Fail: return "fail";
    case CellVerdict::RuntimeError: return "runtime-error";
    }
    return "?";
}

namespace {

bool expectation_holds(const Expectation& ex, const DatasetInstance& actual) {
    switch (ex.mode) {
    case CompareMode::Size:
        return actual.elements.size() == ex.size;
    case CompareMode::OrderedSequence: {
        if (actual.elements.size() != ex.values.size()) return false;
        for (std::size_t i = 0; i < ex.values.size(); ++i)
            if (!approx_equal(actual.elements[i], ex.values[i], ex.tolerance)) return false;
        return true;
    }
    case CompareMode::UnorderedMultiset: {
        if (actual.elements.size() != ex.values.size()) return false;
        // canonical sort on both sides, then positional compare
        std::vector<Value> a = actual.elements;
        std::vector<Value> b = ex.values;
        auto less = [](const Value& x, const Value& y) { return compare_total(x, y) < 0; };
        std::sort(a.begin(), a.end(), less);
        std::sort(b.begin(), b.end(), less);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!approx_equal(a[i], b[i], ex.tolerance)) return false;
        return true;
    }
    }
    return false;
}

}  // namespace

CellVerdict judge(const ExecutionOutcome& outcome, const TestCase& test) {
    if (!outcome.ok()) return CellVerdict::RuntimeError;
    for (const auto& ex : test.expects) {
        auto it = outcome.outputs.find(ex.output);
        if (it == outcome.outputs.end()) return CellVerdict::Fail;
        if (!expectation_holds(ex, it->second)) return CellVerdict::Fail;
    }
    return CellVerdict::Pass;
}

std::vector<CellVerdict> run_original(const ProgramGraph& graph,
                                      const std::vector<TestCase>& tests) {
    std::vector<CellVerdict> verdicts;
    verdicts.reserve(tests.size());
    for (const auto& t : tests) verdicts.push_back(judge(execute(graph, t.inputs), t));
    return verdicts;
}

const MutantRow* KillMatrix::row(int mutant_id) const {
    for (const auto& r : rows)
        if (r.mutant_id == mutant_id) return &r;
    return nullptr;
}

namespace {

MutantRow run_one_mutant(const MetaMutant& meta, const Mutant& m,
                         const std::vector<TestCase>& tests, bool short_circuit) {
    MutantRow row;
    row.mutant_id = m.id;
    row.executed_any = true;
    for (const auto& t : tests) {
        ExecutionOutcome outcome = execute_with_patch(meta.original, t.inputs, &m.patch);
        CellVerdict v = judge(outcome, t);
        row.cells.push_back(v);
        ++row.executed_tests;
        if (v != CellVerdict::Pass) {
            ++row.killing_tests;
            row.killed_by.push_back(t.name);
            if (short_circuit) break;
        }
    }
    return row;
}

bool should_execute(const Mutant& m, const RunOptions& options) {
    if (options.equivalent_ids.count(m.id)) return false;
    if (m.status == MutantStatus::Removed)
        return options.force_removed_all || options.force_ids.count(m.id) > 0;
    return true;
}

}  // namespace

KillMatrix run_mutants(const MetaMutant& meta, const std::vector<TestCase>& tests,
                       const RunOptions& options) {
    KillMatrix matrix;
    for (const auto& t : tests) matrix.test_names.push_back(t.name);
    matrix.rows.resize(meta.mutants.size());

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < meta.mutants.size(); ++i) {
        matrix.rows[i].mutant_id = meta.mutants[i].id;
        if (should_execute(meta.mutants[i], options)) todo.push_back(i);
    }

    int workers = std::max(1, options.workers);
    if (workers == 1 || todo.size() <= 1) {
        for (std::size_t i : todo)
            matrix.rows[i] = run_one_mutant(meta, meta.mutants[i], tests, options.short_circuit);
        return matrix;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto work = [&]() {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= todo.size() || failed.load()) return;
            try {
                matrix.rows[todo[k]] =
                    run_one_mutant(meta, meta.mutants[todo[k]], tests, options.short_circuit);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                failure = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < workers - 1; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failed.load()) throw std::runtime_error("mutant execution failed: " + failure);
    return matrix;
}

KillMatrix rerun_alive(const std::map<int, PriorResult>& prior, const MetaMutant& meta,
                       const std::vector<TestCase>& tests, const RunOptions& options) {
    for (const auto& m : meta.mutants)
        if (!prior.count(m.id))
            throw StaleReportError("prior report lacks mutant " + std::to_string(m.id));
    if (prior.size() != meta.mutants.size())
        throw StaleReportError("prior report carries a different mutant set");

    KillMatrix matrix;
    for (const auto& t : tests) matrix.test_names.push_back(t.name);
    matrix.rows.resize(meta.mutants.size());

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < meta.mutants.size(); ++i) {
        const Mutant& m = meta.mutants[i];
        const PriorResult& p = prior.at(m.id);
        MutantRow& row = matrix.rows[i];
        row.mutant_id = m.id;
        bool rerun = p.status == MutantStatus::Survived && !options.equivalent_ids.count(m.id);
        bool forced = (p.status == MutantStatus::Removed) &&
                      (options.force_removed_all || options.force_ids.count(m.id) > 0) &&
                      !options.equivalent_ids.count(m.id);
        if (rerun || forced) {
            todo.push_back(i);
        } else {
            // carry the prior result forward untouched
            row.executed_any = p.status == MutantStatus::Killed ||
                               p.status == MutantStatus::Survived;
            row.killed_by = p.killed_by;
            row.executed_tests = p.executed_tests;
            row.killing_tests = p.killing_tests;
        }
    }
    for (std::size_t i : todo)
        matrix.rows[i] = run_one_mutant(meta, meta.mutants[i], tests, options.short_circuit);
    return matrix;
}

void assign_statuses(std::vector<Mutant>& mutants, const KillMatrix& matrix,
                     const std::set<int>& equivalent_ids) {
    for (auto& m : mutants) {
        const MutantRow* row = matrix.row(m.id);
        bool executed = row && row->executed_any;
        bool killed = executed && row->killing_tests > 0;
        // a kill is proof of non-equivalence; an equivalent tag on a
        // removed (and not resurrected) mutant is ignored
        if (killed) {
            m.status = MutantStatus::Killed;
            continue;
        }
        if (m.status == MutantStatus::Removed && !executed) continue;
        if (equivalent_ids.count(m.id)) {
            m.status = MutantStatus::Equivalent;
            continue;
        }
        m.status = MutantStatus::Survived;
    }
}

}  // namespace flowmut
