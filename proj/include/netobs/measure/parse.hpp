#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "netobs/measure/ast.hpp"

namespace netobs::measure {

/// Lexical or grammatical failure; carries the source position.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(SourcePos pos, const std::string& message)
        : std::runtime_error(message), pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

/// Post-parse reference/uniqueness issue. Collected, not thrown.
struct SemanticError {
    enum class Kind { UnknownMetricRef, UnknownZoneRef, DuplicateName };
    Kind kind;
    std::string name;
    SourcePos pos;
    std::string message() const;
};

struct ParseResult {
    MeasureSpec spec;
    std::vector<SemanticError> errors;
    bool ok() const { return errors.empty(); }
};

/// Parse MEASURE source text. Throws SyntaxError on malformed input;
/// unresolved references and duplicates land in ParseResult::errors.
ParseResult parse(const std::string& text);

/// Canonical re-serialization; parse(serialize(s)).spec == s.
std::string serialize(const MeasureSpec& spec);

/// Duration literal ("5 minutes", "30s", "10ms", "0.5h") to seconds.
/// Throws SyntaxError (with the given position) on unknown units or
/// non-positive values.
double parse_duration(const std::string& text, SourcePos pos);

/// Format file:line:col diagnostics the way the CLI prints them.
std::string format_diagnostic(const std::string& file, SourcePos pos,
                              const std::string& message);

} // namespace netobs::measure
