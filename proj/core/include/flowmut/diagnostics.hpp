#pragma once

#include <string>
#include <vector>

namespace flowmut {

/// Location of a token or statement inside a source file.
struct SourceSpan {
    std::string file;
    int line = 0;    // 1-based
    int column = 0;  // 1-based
    int length = 0;  // characters
};

enum class DiagnosticCode {
    Lexical,
    Syntax,
    Type,
    UnknownIdentifier,
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
    DiagnosticCode code = DiagnosticCode::Syntax;
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;
};

std::string to_string(const ParseDiagnostic& d);

inline bool has_errors(const std::vector<ParseDiagnostic>& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

}  // namespace flowmut
