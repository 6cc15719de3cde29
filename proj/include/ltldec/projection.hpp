#pragma once

#include "formula.hpp"
#include "spec.hpp"

#include <set>
#include <stdexcept>
#include <string>

namespace ltldec
{

namespace detail
{
template <class Fn>
Formula map_atoms( const Formula& f, Fn&& fn )
{
    switch ( f.op() )
    {
    case Op::True:
    case Op::False: return f;
    case Op::Atom: return fn( f );
    default: break;
    }
    if ( is_unary( f.op() ) )
    {
        Formula c = map_atoms( f.child(), fn );
        return c.identity() == f.child().identity() ? f : Formula::unary( f.op(), c );
    }
    Formula l = map_atoms( f.lhs(), fn );
    Formula r = map_atoms( f.rhs(), fn );
    if ( l.identity() == f.lhs().identity() && r.identity() == f.rhs().identity() )
        return f;
    return Formula::binary( f.op(), l, r );
}
} // namespace detail

/// The projection formula φ'_W: every unprimed occurrence of a variable in
/// `vars` becomes its primed copy. Tree shape is preserved.
///
/// Throws std::invalid_argument if `f` already contains a primed copy of a
/// variable in `vars`.
[[nodiscard]] inline Formula rename_projection( const Formula& f, const VarList& vars )
{
    if ( vars.empty() )
        return f;
    std::set<std::string> w( vars.begin(), vars.end() );
    for ( const auto& id : atoms( f ) )
        if ( id.primed && w.count( id.base ) )
            throw std::invalid_argument( "rename_projection: '" + id.base + "' is already primed" );
    return detail::map_atoms( f, [ & ]( const Formula& a ) {
        return w.count( a.atom_id().base ) ? atom( primed( a.atom_id().base ) ) : a;
    } );
}

/// Replaces every primed atom by its unprimed base.
[[nodiscard]] inline Formula unprime( const Formula& f )
{
    return detail::map_atoms( f, []( const Formula& a ) {
        return a.atom_id().primed ? atom( unprimed( a.atom_id().base ) ) : a;
    } );
}

/// f ∧ G(z <-> z'). Repeated locks of the same variable are not merged.
[[nodiscard]] inline Formula lock_conjunct( const Formula& f, const std::string& z )
{
    return land( f, always( iff( atom( unprimed( z ) ), atom( primed( z ) ) ) ) );
}

/// (φ'_W ∧ φ'_Y ∧ ¬φ). Satisfiable exactly when W is dependent on Y's side.
[[nodiscard]] inline Formula dependence_query( const Formula& phi, const VarList& w, const VarList& y )
{
    return land( rename_projection( phi, w ), land( rename_projection( phi, y ), lnot( phi ) ) );
}

} // namespace ltldec
