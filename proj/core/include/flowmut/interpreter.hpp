#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowmut/graph.hpp"
#include "flowmut/patch.hpp"

namespace flowmut {

/// One in-memory dataset. Order is significant internally (it feeds fold
/// order) even when tests compare as multisets.
struct DatasetInstance {
    ValueType elem;
    std::vector<Value> elements;
};

struct RuntimeError {
    int site = -1;  // transformation site, -1 when raised outside a site
    std::string message;
};

struct ExecutionOutcome {
    std::map<std::string, DatasetInstance> outputs;
    std::optional<RuntimeError> error;
    bool ok() const { return !error.has_value(); }
};

using InputBindings = std::map<std::string, DatasetInstance>;

/// Eager, deterministic evaluation of a valid graph. Identical inputs
/// always yield identical outputs. Runtime faults (division by zero, head
/// of an empty list, operations on null, NaN where an ordering is
/// required) come back as the outcome's error, naming the site.
/// Throws std::invalid_argument when the inputs do not cover the declared
/// input datasets with matching element types.
ExecutionOutcome execute(const ProgramGraph& graph, const InputBindings& inputs);

/// Mutation-switching execution: runs the original graph with one patch
/// active, without materializing the patched graph.
ExecutionOutcome execute_with_patch(const ProgramGraph& graph, const InputBindings& inputs,
                                    const GraphPatch* active);

/// Pure evaluation of a udf on concrete arguments.
/// Throws EvalError on the runtime faults listed above.
Value eval_udf(const Udf& udf, std::span<const Value> args);

struct EvalError {
    std::string message;
};

}  // namespace flowmut
