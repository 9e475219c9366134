#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowmut/harness.hpp"
#include "flowmut/mutation.hpp"

namespace flowmut {

/// Exact mutation-score fraction.
struct Rational {
    long long num = 0;
    long long den = 1;  // normalized, den > 0, gcd(num, den) == 1

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational& other) const {
        return num == other.num && den == other.den;
    }
};

Rational make_rational(long long num, long long den);

struct MutationScore {
    int killed = 0;      // DM
    int total = 0;       // M: active (post-reduction) mutants
    int equivalent = 0;  // EM
    int removed = 0;     // still removed, excluded from M
    /// killed / (total - equivalent); 1 when total == equivalent > 0;
    /// absent when no mutants are active.
    std::optional<Rational> ms;
};

struct OperatorStats {
    MutationOperatorId op = MutationOperatorId::UTS;
    int generated = 0;   // #M: everything the operator produced, removed included
    int equivalent = 0;  // #E
    int removed = 0;     // #R
    /// KR %: pooled kills over executions of the operator's executed
    /// non-equivalent mutants; absent when nothing was executed.
    std::optional<double> killed_ratio;
};

struct MutantRecord {
    int id = 0;
    MutationOperatorId op = MutationOperatorId::UTS;
    std::vector<int> sites;
    std::string description;
    std::string original_render;
    std::string mutated_render;
    MutantStatus status = MutantStatus::Generated;
    std::optional<ReductionRuleId> removed_by;
    std::vector<std::string> killed_by;
};

struct Timings {
    double generation_s = 0.0;
    double execution_s = 0.0;
    double total_s = 0.0;
};

struct MutationReport {
    std::string tool_version;
    std::string source_hash;
    std::string program;
    MutationScore score;
    std::vector<OperatorStats> operators;  // all operators, declaration order
    std::vector<MutantRecord> mutants;     // sorted by id
    Timings timings;
};

/// Score per the ms(P, T) = DM / (M - EM) formula over the mutants'
/// statuses; removed mutants are excluded from M.
MutationScore compute_score(const std::vector<Mutant>& mutants);

/// Per-operator generated/equivalent/removed counts and the pooled
/// Killed Ratio from the kill matrix.
std::vector<OperatorStats> compute_operator_stats(const KillMatrix& matrix,
                                                  const std::vector<Mutant>& mutants);

MutationReport build_report(const ProgramGraph& graph, const std::vector<Mutant>& mutants,
                            const KillMatrix& matrix, const std::string& source_hash,
                            const Timings& timings);

/// Canonical JSON document (stable key order, mutants sorted by id);
/// re-serializing a parsed report is byte-identical.
std::string report_json(const MutationReport& report);

std::string report_html(const MutationReport& report);

/// Writes report.json and report.html into out_dir (created if needed).
void emit_reports(const MutationReport& report, const std::string& out_dir);

/// Tool-internal state carried between `run` and `alive`.
struct RunState {
    std::string source_hash;
    std::string program;
    std::map<int, PriorResult> results;
};

std::string state_json(const RunState& state);
RunState parse_state_json(const std::string& text);  // throws ConfigError

}  // namespace flowmut
