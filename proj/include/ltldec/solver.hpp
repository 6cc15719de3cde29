#pragma once

#include "errors.hpp"
#include "formula.hpp"
#include "gba.hpp"
#include "nnf.hpp"
#include "sat_result.hpp"
#include "trace.hpp"

#include <string>

namespace ltldec
{

/// LTL satisfiability with a lasso model: NNF, tableau automaton, emptiness
/// check. Every Sat answer is re-checked against `f` before it is returned;
/// a model that fails the check raises InvariantViolation.
[[nodiscard]] inline SatResult ltl_sat( const Formula& f, const EngineOptions& options = {} )
{
    SatResult result = find_accepting_lasso( build_gba( to_nnf( f ), options ) );
    if ( result.is_sat() && !eval( *result.witness, f, 0 ) )
        throw InvariantViolation( "engine witness " + serialize_trace( *result.witness ) +
                                  " does not satisfy " + print_formula( f ) );
    return result;
}

/// Source of satisfiability answers for the decomposition algorithms.
class Solver
{
public:
    virtual ~Solver() = default;
    virtual SatResult solve( const Formula& f ) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
};

class InternalSolver final : public Solver
{
    EngineOptions _options;

public:
    explicit InternalSolver( EngineOptions options = {} ) : _options{ options } {}

    SatResult solve( const Formula& f ) override { return ltl_sat( f, _options ); }
    [[nodiscard]] std::string name() const override { return "internal"; }
};

} // namespace ltldec
