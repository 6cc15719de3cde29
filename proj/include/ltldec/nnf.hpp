#pragma once

#include "formula.hpp"

namespace ltldec
{

namespace detail
{
inline Formula nnf( const Formula& f, bool negate )
{
    switch ( f.op() )
    {
    case Op::True:
    case Op::False: return Formula::constant( ( f.op() == Op::True ) != negate );
    case Op::Atom: return negate ? lnot( f ) : f;
    case Op::Not: return nnf( f.child(), !negate );
    case Op::And:
        return negate ? lor( nnf( f.lhs(), true ), nnf( f.rhs(), true ) )
                      : land( nnf( f.lhs(), false ), nnf( f.rhs(), false ) );
    case Op::Or:
        return negate ? land( nnf( f.lhs(), true ), nnf( f.rhs(), true ) )
                      : lor( nnf( f.lhs(), false ), nnf( f.rhs(), false ) );
    case Op::Implies:
        return negate ? land( nnf( f.lhs(), false ), nnf( f.rhs(), true ) )
                      : lor( nnf( f.lhs(), true ), nnf( f.rhs(), false ) );
    case Op::Iff:
    {
        Formula a = nnf( f.lhs(), false ), na = nnf( f.lhs(), true );
        Formula b = nnf( f.rhs(), false ), nb = nnf( f.rhs(), true );
        return negate ? lor( land( a, nb ), land( na, b ) ) : lor( land( a, b ), land( na, nb ) );
    }
    case Op::Next: return next( nnf( f.child(), negate ) );
    case Op::Eventually:
        return negate ? release( bottom(), nnf( f.child(), true ) ) : until( top(), nnf( f.child(), false ) );
    case Op::Always:
        return negate ? until( top(), nnf( f.child(), true ) ) : release( bottom(), nnf( f.child(), false ) );
    case Op::Until:
        return negate ? release( nnf( f.lhs(), true ), nnf( f.rhs(), true ) )
                      : until( nnf( f.lhs(), false ), nnf( f.rhs(), false ) );
    case Op::Release:
        return negate ? until( nnf( f.lhs(), true ), nnf( f.rhs(), true ) )
                      : release( nnf( f.lhs(), false ), nnf( f.rhs(), false ) );
    }
    return f;
}
} // namespace detail

/// Negation normal form: negation only on atoms, no ->/<->, and F/G written
/// as `true U f` / `false R f`.
[[nodiscard]] inline Formula to_nnf( const Formula& f ) { return detail::nnf( f, false ); }

[[nodiscard]] inline bool is_nnf( const Formula& f )
{
    switch ( f.op() )
    {
    case Op::True:
    case Op::False:
    case Op::Atom: return true;
    case Op::Not: return f.child().op() == Op::Atom;
    case Op::Next: return is_nnf( f.child() );
    case Op::And:
    case Op::Or:
    case Op::Until:
    case Op::Release: return is_nnf( f.lhs() ) && is_nnf( f.rhs() );
    default: return false;
    }
}

} // namespace ltldec
