#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ltldec
{

/// A propositional variable occurrence. Priming is a flag rather than a name
/// suffix, so a primed copy can never collide with a declared variable.
struct AtomId
{
    std::string base;
    bool primed = false;

    friend auto operator<=>( const AtomId&, const AtomId& ) = default;
    friend bool operator==( const AtomId&, const AtomId& ) = default;

    [[nodiscard]] std::string str() const { return primed ? base + "'" : base; }
};

inline AtomId primed( std::string base ) { return AtomId{ std::move( base ), true }; }
inline AtomId unprimed( std::string base ) { return AtomId{ std::move( base ), false }; }

enum class Op
{
    True,
    False,
    Atom,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    Eventually,
    Always,
    Until,
    Release
};

[[nodiscard]] constexpr bool is_unary( Op op )
{
    return op == Op::Not || op == Op::Next || op == Op::Eventually || op == Op::Always;
}

[[nodiscard]] constexpr bool is_binary( Op op )
{
    return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Iff || op == Op::Until ||
           op == Op::Release;
}

/// Immutable LTL syntax tree. Copies share structure; nothing is ever mutated
/// after construction, so values may be shared freely across threads.
class Formula
{
    struct Node
    {
        Op op;
        AtomId atom;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    std::shared_ptr<const Node> _node;

    explicit Formula( std::shared_ptr<const Node> node ) : _node{ std::move( node ) } {}

    static Formula make( Op op, AtomId atom, const Formula* lhs, const Formula* rhs )
    {
        return Formula{ std::make_shared<const Node>( Node{ op, std::move( atom ), lhs ? lhs->_node : nullptr,
                                                            rhs ? rhs->_node : nullptr } ) };
    }

public:
    /// Default-constructed formulas are `true`.
    Formula() : Formula{ make( Op::True, {}, nullptr, nullptr ) } {}

    static Formula constant( bool value ) { return make( value ? Op::True : Op::False, {}, nullptr, nullptr ); }
    static Formula atom( AtomId id ) { return make( Op::Atom, std::move( id ), nullptr, nullptr ); }
    static Formula unary( Op op, const Formula& child ) { return make( op, {}, &child, nullptr ); }
    static Formula binary( Op op, const Formula& lhs, const Formula& rhs ) { return make( op, {}, &lhs, &rhs ); }

    [[nodiscard]] Op op() const { return _node->op; }
    [[nodiscard]] const AtomId& atom_id() const { return _node->atom; }

    /// Operand of a unary node, left operand of a binary node.
    [[nodiscard]] Formula lhs() const { return Formula{ _node->lhs }; }
    [[nodiscard]] Formula rhs() const { return Formula{ _node->rhs }; }
    [[nodiscard]] Formula child() const { return lhs(); }

    /// Address of the shared node; equal identities imply structural equality.
    [[nodiscard]] const void* identity() const { return _node.get(); }

    friend bool operator==( const Formula& a, const Formula& b )
    {
        if ( a._node == b._node )
            return true;
        if ( a.op() != b.op() )
            return false;
        if ( a.op() == Op::Atom )
            return a.atom_id() == b.atom_id();
        if ( is_unary( a.op() ) )
            return a.lhs() == b.lhs();
        if ( is_binary( a.op() ) )
            return a.lhs() == b.lhs() && a.rhs() == b.rhs();
        return true;
    }
};

// Builders.

inline Formula top() { return Formula::constant( true ); }
inline Formula bottom() { return Formula::constant( false ); }
inline Formula atom( std::string name ) { return Formula::atom( unprimed( std::move( name ) ) ); }
inline Formula atom( AtomId id ) { return Formula::atom( std::move( id ) ); }
inline Formula lnot( const Formula& f ) { return Formula::unary( Op::Not, f ); }
inline Formula land( const Formula& a, const Formula& b ) { return Formula::binary( Op::And, a, b ); }
inline Formula lor( const Formula& a, const Formula& b ) { return Formula::binary( Op::Or, a, b ); }
inline Formula implies( const Formula& a, const Formula& b ) { return Formula::binary( Op::Implies, a, b ); }
inline Formula iff( const Formula& a, const Formula& b ) { return Formula::binary( Op::Iff, a, b ); }
inline Formula next( const Formula& f ) { return Formula::unary( Op::Next, f ); }
inline Formula eventually( const Formula& f ) { return Formula::unary( Op::Eventually, f ); }
inline Formula always( const Formula& f ) { return Formula::unary( Op::Always, f ); }
inline Formula until( const Formula& a, const Formula& b ) { return Formula::binary( Op::Until, a, b ); }
inline Formula release( const Formula& a, const Formula& b ) { return Formula::binary( Op::Release, a, b ); }

/// Right-folded conjunction; the empty conjunction is `true`.
inline Formula conjunction( const std::vector<Formula>& parts )
{
    if ( parts.empty() )
        return top();
    Formula acc = parts.back();
    for ( auto it = parts.rbegin() + 1; it != parts.rend(); ++it )
        acc = land( *it, acc );
    return acc;
}

namespace detail
{
inline void collect_atoms( const Formula& f, std::set<AtomId>& out, std::set<const void*>& seen )
{
    if ( !seen.insert( f.identity() ).second )
        return;
    if ( f.op() == Op::Atom )
        out.insert( f.atom_id() );
    else if ( is_unary( f.op() ) )
        collect_atoms( f.lhs(), out, seen );
    else if ( is_binary( f.op() ) )
    {
        collect_atoms( f.lhs(), out, seen );
        collect_atoms( f.rhs(), out, seen );
    }
}
} // namespace detail

[[nodiscard]] inline std::set<AtomId> atoms( const Formula& f )
{
    std::set<AtomId> out;
    std::set<const void*> seen;
    detail::collect_atoms( f, out, seen );
    return out;
}

/// Number of syntax-tree nodes (shared subtrees counted at every occurrence).
[[nodiscard]] inline std::size_t node_count( const Formula& f )
{
    if ( is_unary( f.op() ) )
        return 1 + node_count( f.lhs() );
    if ( is_binary( f.op() ) )
        return 1 + node_count( f.lhs() ) + node_count( f.rhs() );
    return 1;
}

[[nodiscard]] inline std::size_t depth( const Formula& f )
{
    if ( is_unary( f.op() ) )
        return 1 + depth( f.lhs() );
    if ( is_binary( f.op() ) )
        return 1 + std::max( depth( f.lhs() ), depth( f.rhs() ) );
    return 1;
}

namespace detail
{
inline const char* binary_symbol( Op op )
{
    switch ( op )
    {
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Implies: return "->";
    case Op::Iff: return "<->";
    case Op::Until: return "U";
    case Op::Release: return "R";
    default: return "?";
    }
}

inline void print( const Formula& f, std::string& out )
{
    switch ( f.op() )
    {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Atom: out += f.atom_id().str(); return;
    case Op::Not:
        out += '!';
        print( f.child(), out );
        return;
    case Op::Next: out += "X "; break;
    case Op::Eventually: out += "F "; break;
    case Op::Always: out += "G "; break;
    default:
        out += '(';
        print( f.lhs(), out );
        out += ' ';
        out += binary_symbol( f.op() );
        out += ' ';
        print( f.rhs(), out );
        out += ')';
        return;
    }
    print( f.child(), out );
}
} // namespace detail

/// Fully parenthesised ASCII rendering: binary nodes always get parentheses,
/// prefix operators G/F/X are followed by a space, `!` is not.
[[nodiscard]] inline std::string print_formula( const Formula& f )
{
    std::string out;
    detail::print( f, out );
    return out;
}

} // namespace ltldec
