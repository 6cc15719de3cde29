#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltldec
{

enum class ParseErrorKind
{
    Syntax,
    UndeclaredAtom,
    DuplicateDeclaration,
    EnvSysOverlap,
    ReservedName
};

/// Malformed input. Line and column are 1-based; both are 0 when the error
/// has no meaningful source position.
class ParseError : public std::runtime_error
{
    ParseErrorKind _kind;
    std::size_t _line;
    std::size_t _column;

public:
    ParseError( ParseErrorKind kind, std::size_t line, std::size_t column, const std::string& message )
            : std::runtime_error{ std::to_string( line ) + ":" + std::to_string( column ) + ": " + message },
              _kind{ kind }, _line{ line }, _column{ column }
    {
    }

    [[nodiscard]] ParseErrorKind kind() const { return _kind; }
    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }
};

/// The satisfiability engine ran out of its configured resources. This is
/// never reported as an Unsat answer.
class EngineLimitError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// An external solver process failed or answered something unusable.
class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A property that must hold by construction did not (unsound witness, empty
/// disagreement set on a model, broken partition). Indicates a bug.
class InvariantViolation : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

} // namespace ltldec
