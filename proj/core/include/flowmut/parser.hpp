#pragma once

#include <string>
#include <vector>

#include "flowmut/diagnostics.hpp"
#include "flowmut/graph.hpp"

namespace flowmut {

struct ParseResult {
    std::vector<ProgramGraph> programs;
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const { return !has_errors(diagnostics); }
};

/// Parses `.dflow` source text. A file may contain several `program`
/// blocks; each becomes one validated graph. Transformation order equals
/// textual order. On failure the diagnostics carry spans.
ParseResult parse_source(const std::string& source, const std::string& filename = "<input>");

/// Canonical rendering of an expression; parse(format_expr(e)) is
/// structurally identical to e.
std::string format_expr(const UdfExpr& e);

std::string format_lambda(const Lambda& l);

/// One-line DSL statement for a site, e.g.
/// `counts = pairs.reduceByKey((a, b) -> a + b)`. Wrapped udfs render
/// their mutated form; the result is presentation text in that case.
std::string format_transformation(const Transformation& t, const ProgramGraph& graph);

/// Whole program in canonical DSL text; reparsing it yields a
/// structurally identical graph.
std::string format_program(const ProgramGraph& graph);

}  // namespace flowmut
