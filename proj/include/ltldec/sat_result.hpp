#pragma once

#include "trace.hpp"

#include <optional>
#include <utility>

namespace ltldec
{

/// Answer of a satisfiability query: Unsat, or Sat with a lasso model.
struct SatResult
{
    std::optional<LassoTrace> witness;

    static SatResult unsat() { return {}; }
    static SatResult sat( LassoTrace model ) { return SatResult{ std::move( model ) }; }

    [[nodiscard]] bool is_sat() const { return witness.has_value(); }
};

} // namespace ltldec
