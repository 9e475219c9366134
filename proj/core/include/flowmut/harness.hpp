#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmut/interpreter.hpp"
#include "flowmut/mutation.hpp"

namespace flowmut {

/// Raised for malformed configs, test suites and report files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class CompareMode { UnorderedMultiset, OrderedSequence, Size };

struct Expectation {
    std::string output;
    CompareMode mode = CompareMode::UnorderedMultiset;
    std::vector<Value> values;     // unordered / ordered
    std::size_t size = 0;          // size mode
    double tolerance = 1e-9;       // absolute, float leaves
};

struct TestCase {
    std::string name;
    InputBindings inputs;
    std::vector<Expectation> expects;
};

struct TestSuite {
    std::string program;
    std::vector<TestCase> tests;
};

/// Parses a test-suite JSON document. Values are decoded against the
/// program's declared element types: pairs as 2-arrays, lists as arrays,
/// ints and floats distinguished by the presence of a decimal point.
/// Throws ConfigError on malformed input or type mismatches.
TestSuite load_test_suite(const std::string& json_text, const ProgramGraph& graph,
                          const std::string& where = "<suite>");

enum class CellVerdict { Pass, Fail, RuntimeError };

std::string verdict_name(CellVerdict v);

/// Checks one execution outcome against a test's expectations.
CellVerdict judge(const ExecutionOutcome& outcome, const TestCase& test);

struct MutantRow {
    int mutant_id = 0;
    bool executed_any = false;
    std::vector<CellVerdict> cells;      // aligned with the executed tests
    std::vector<std::string> killed_by;  // names of killing tests
    int executed_tests = 0;
    int killing_tests = 0;
};

struct KillMatrix {
    std::vector<std::string> test_names;
    std::vector<MutantRow> rows;  // one per mutant, by mutant order

    const MutantRow* row(int mutant_id) const;
};

struct RunOptions {
    bool short_circuit = false;        // stop a mutant at its first kill
    bool force_removed_all = false;    // execute removed mutants too
    std::set<int> force_ids;           // removed mutants to resurrect
    std::set<int> equivalent_ids;      // skipped, reported as Equivalent
    int workers = 1;
};

/// Runs every test against the original program.
std::vector<CellVerdict> run_original(const ProgramGraph& graph,
                                      const std::vector<TestCase>& tests);

/// Executes the tests for each active mutant via mutation switching and
/// fills the kill matrix. Results are independent of the worker count.
KillMatrix run_mutants(const MetaMutant& meta, const std::vector<TestCase>& tests,
                       const RunOptions& options);

/// Prior results carried between runs for the alive workflow.
struct PriorResult {
    MutantStatus status = MutantStatus::Generated;
    std::vector<std::string> killed_by;
    int executed_tests = 0;
    int killing_tests = 0;
};

/// Raised when a prior report does not match the current sources.
class StaleReportError : public std::runtime_error {
public:
    explicit StaleReportError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Re-executes only the previously surviving mutants (minus the ones now
/// tagged equivalent, plus forced ones) and merges the result with the
/// prior rows. Prior ids must cover the meta-mutant exactly.
KillMatrix rerun_alive(const std::map<int, PriorResult>& prior, const MetaMutant& meta,
                       const std::vector<TestCase>& tests, const RunOptions& options);

/// Derives each mutant's status from the matrix: Killed iff at least one
/// test fails or faults, Survived otherwise; equivalent-tagged mutants
/// stay Equivalent and removed ones stay Removed unless forced.
void assign_statuses(std::vector<Mutant>& mutants, const KillMatrix& matrix,
                     const std::set<int>& equivalent_ids);

/// Checks that a suite's inputs and expectations exist in the program
/// with matching element types; returns problems as messages.
std::vector<std::string> check_suite(const TestSuite& suite, const ProgramGraph& graph);

}  // namespace flowmut
