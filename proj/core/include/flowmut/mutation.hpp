#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flowmut/graph.hpp"
#include "flowmut/interpreter.hpp"
#include "flowmut/patch.hpp"

namespace flowmut {

/// The fifteen mutation operators. UTS, BTS, UTR, BTR and UTD mutate the
/// DAG structure; the rest mutate one operation or its function parameter.
enum class MutationOperatorId {
    UTS,
    BTS,
    UTR,
    BTR,
    UTD,
    MTR,
    FTD,
    NFTP,
    STR,
    DTI,
    DTD,
    ATR,
    JTR,
    OTD,
    OTI,
};

constexpr int kOperatorCount = 15;

std::string operator_name(MutationOperatorId op);
std::optional<MutationOperatorId> operator_from_name(const std::string& name);
std::vector<MutationOperatorId> all_operators();

/// The six selective-mutation reduction rules.
enum class ReductionRuleId { UTDE, FTDS, OTDS, MTRR, DTIE, ATRC };

std::string rule_name(ReductionRuleId r);
std::optional<ReductionRuleId> rule_from_name(const std::string& name);
std::vector<ReductionRuleId> all_rules();

enum class MutantStatus { Generated, Removed, Killed, Survived, Equivalent };

std::string status_name(MutantStatus s);

struct Mutant {
    int id = 0;  // canonical enumeration, 1..N, stable across runs
    MutationOperatorId op = MutationOperatorId::UTS;
    std::vector<int> sites;  // 1-2 transformation ids
    /// Kind of sites[0] in the original graph (DTIE matches on it).
    TransformationKind site_kind = TransformationKind::Map;
    GraphPatch patch;
    std::string description;
    /// Stable per-operator variant token used by the enumeration fixtures,
    /// e.g. "tuple_value(num_max)", "keep_left", "from_site_2".
    std::string variant;
    MutantStatus status = MutantStatus::Generated;
    std::optional<ReductionRuleId> removed_by;
};

/// Original graph plus all mutant patches; executable with at most one
/// mutant active (mutation switching). Removed mutants stay addressable
/// so they can be force-executed later.
struct MetaMutant {
    ProgramGraph original;
    std::vector<Mutant> mutants;

    const Mutant* find(int id) const;
};

using OperatorSet = std::set<MutationOperatorId>;
using RuleSet = std::set<ReductionRuleId>;

/// Emits all applicable mutants for the enabled operators, in canonical
/// order: operator order as declared, then ascending site id, then the
/// fixed per-operator variant order. Ids are 1..N.
std::vector<Mutant> generate_mutants(const ProgramGraph& graph, const OperatorSet& operators);

/// Marks mutants Removed per the enabled reduction rules. Removal is
/// monotone in the enabled rule set and never fires when the rule's
/// operator guard is unmet.
std::vector<Mutant> reduce_mutants(std::vector<Mutant> mutants, const RuleSet& rules,
                                   const OperatorSet& enabled_ops);

/// Materializes the patched graph; the result passes validate.
/// Throws std::logic_error when the patch does not apply (generator bug).
ProgramGraph apply_patch(const ProgramGraph& graph, const GraphPatch& patch);

/// Assembles the meta-mutant, checking that every patch applies cleanly.
MetaMutant build_meta_mutant(const ProgramGraph& graph, std::vector<Mutant> mutants);

/// Runs the meta-mutant with no active mutant (identical to the original
/// semantics) or with exactly one mutant's patch active.
ExecutionOutcome execute_meta(const MetaMutant& meta, const InputBindings& inputs,
                              std::optional<int> active_id);

}  // namespace flowmut
