#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowmut/graph.hpp"

namespace flowmut {

struct ValidationDiagnostic {
    int site = -1;  // transformation id, -1 for graph-level issues
    std::string message;
};

struct ValidationResult {
    std::vector<ValidationDiagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Syntactic and type analysis of a program graph: arity, signatures,
/// UDF typing, site numbering, acyclicity and single-producer rules.
/// Diagnostics are the result, not failures.
ValidationResult validate(const ProgramGraph& graph);

struct Signature {
    std::vector<ValueType> input_elems;
    ValueType output_elem;
};

/// Element types of a transformation's input and output datasets.
/// Throws std::out_of_range for an unknown transformation id.
Signature signature(const Transformation& t, const ProgramGraph& graph);
Signature signature(int site, const ProgramGraph& graph);

/// Output element type a kind produces from the given inputs and udfs,
/// or nullopt (with a message) when the signature rules are violated.
std::optional<ValueType> infer_output_type(TransformationKind kind,
                                           const std::vector<ValueType>& input_elems,
                                           const std::vector<Udf>& udfs,
                                           std::string* error);

}  // namespace flowmut
