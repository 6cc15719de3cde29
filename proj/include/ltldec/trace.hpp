#pragma once

#include "errors.hpp"
#include "formula.hpp"
#include "spec.hpp"

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace ltldec
{

/// One position of a trace: the atoms that are true there. Absent atoms are false.
using State = std::set<AtomId>;

/// Ultimately periodic word prefix · loop^ω. The loop is never empty.
class LassoTrace
{
    std::vector<State> _prefix;
    std::vector<State> _loop;

public:
    /// {}^ω
    LassoTrace() : _loop( 1 ) {}

    LassoTrace( std::vector<State> prefix, std::vector<State> loop )
            : _prefix{ std::move( prefix ) }, _loop{ std::move( loop ) }
    {
        if ( _loop.empty() )
            throw std::invalid_argument( "LassoTrace: loop must contain at least one state" );
    }

    [[nodiscard]] const std::vector<State>& prefix() const { return _prefix; }
    [[nodiscard]] const std::vector<State>& loop() const { return _loop; }

    /// Number of distinct positions, |prefix| + |loop|.
    [[nodiscard]] std::size_t positions() const { return _prefix.size() + _loop.size(); }
    [[nodiscard]] std::size_t loop_start() const { return _prefix.size(); }

    /// Folds any position onto the distinct range [0, positions()).
    [[nodiscard]] std::size_t canonical( std::size_t i ) const
    {
        if ( i < positions() )
            return i;
        return _prefix.size() + ( i - _prefix.size() ) % _loop.size();
    }

    [[nodiscard]] std::size_t successor( std::size_t i ) const
    {
        i = canonical( i );
        return i + 1 < positions() ? i + 1 : _prefix.size();
    }

    [[nodiscard]] const State& state( std::size_t i ) const
    {
        i = canonical( i );
        return i < _prefix.size() ? _prefix[ i ] : _loop[ i - _prefix.size() ];
    }

    friend auto operator<=>( const LassoTrace&, const LassoTrace& ) = default;
    friend bool operator==( const LassoTrace&, const LassoTrace& ) = default;
};

/// A formula flattened into post-order so it can be evaluated repeatedly over
/// many traces. Atoms are numbered by their position in `atoms()`.
class CompiledFormula
{
    struct Instr
    {
        Op op;
        int lhs = -1;
        int rhs = -1;
        int atom = -1;
    };

    std::vector<Instr> _code;
    std::vector<AtomId> _atoms;

    int compile( const Formula& f, std::unordered_map<const void*, int>& memo, const std::map<AtomId, int>& index )
    {
        if ( auto it = memo.find( f.identity() ); it != memo.end() )
            return it->second;
        Instr ins{ f.op() };
        if ( f.op() == Op::Atom )
            ins.atom = index.at( f.atom_id() );
        else if ( is_unary( f.op() ) )
            ins.lhs = compile( f.child(), memo, index );
        else if ( is_binary( f.op() ) )
        {
            ins.lhs = compile( f.lhs(), memo, index );
            ins.rhs = compile( f.rhs(), memo, index );
        }
        _code.push_back( ins );
        int id = static_cast<int>( _code.size() ) - 1;
        memo.emplace( f.identity(), id );
        return id;
    }

public:
    explicit CompiledFormula( const Formula& f )
    {
        auto ids = ltldec::atoms( f );
        _atoms.assign( ids.begin(), ids.end() );
        std::map<AtomId, int> index;
        for ( std::size_t i = 0; i < _atoms.size(); ++i )
            index.emplace( _atoms[ i ], static_cast<int>( i ) );
        std::unordered_map<const void*, int> memo;
        compile( f, memo, index );
    }

    [[nodiscard]] const std::vector<AtomId>& atoms() const { return _atoms; }

    /// Truth value at position `pos` of a lasso with `n` distinct positions
    /// whose loop starts at `loop_start`. `holds(atom_index, position)` gives
    /// the valuation; `scratch` is reused between calls to avoid allocation.
    template <class Holds>
    bool evaluate( std::size_t n, std::size_t loop_start, std::size_t pos, Holds&& holds,
                   std::vector<char>& scratch ) const
    {
        scratch.assign( _code.size() * n, 0 );
        auto at = [ & ]( int k, std::size_t i ) -> char& { return scratch[ static_cast<std::size_t>( k ) * n + i ]; };
        auto succ = [ & ]( std::size_t i ) { return i + 1 < n ? i + 1 : loop_start; };

        // Least (until) or greatest (release) fixpoint of
        //   x[i] = g[i] op1 (f[i] op2 x[succ i]).
        // Two backward sweeps over the loop reach the fixpoint there; one sweep
        // then settles the prefix.
        auto fixpoint = [ & ]( int k, auto&& step, char init ) {
            for ( std::size_t i = loop_start; i < n; ++i )
                at( k, i ) = init;
            for ( int sweep = 0; sweep < 2; ++sweep )
                for ( std::size_t i = n; i-- > loop_start; )
                    at( k, i ) = step( i, at( k, succ( i ) ) );
            for ( std::size_t i = loop_start; i-- > 0; )
                at( k, i ) = step( i, at( k, succ( i ) ) );
        };

        for ( int k = 0; k < static_cast<int>( _code.size() ); ++k )
        {
            const Instr& c = _code[ static_cast<std::size_t>( k ) ];
            switch ( c.op )
            {
            case Op::True:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = 1;
                break;
            case Op::False: break;
            case Op::Atom:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = holds( c.atom, i ) ? 1 : 0;
                break;
            case Op::Not:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = !at( c.lhs, i );
                break;
            case Op::And:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = at( c.lhs, i ) && at( c.rhs, i );
                break;
            case Op::Or:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = at( c.lhs, i ) || at( c.rhs, i );
                break;
            case Op::Implies:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = !at( c.lhs, i ) || at( c.rhs, i );
                break;
            case Op::Iff:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = at( c.lhs, i ) == at( c.rhs, i );
                break;
            case Op::Next:
                for ( std::size_t i = 0; i < n; ++i )
                    at( k, i ) = at( c.lhs, succ( i ) );
                break;
            case Op::Eventually:
                fixpoint( k, [ & ]( std::size_t i, char later ) -> char { return at( c.lhs, i ) || later; }, 0 );
                break;
            case Op::Always:
                fixpoint( k, [ & ]( std::size_t i, char later ) -> char { return at( c.lhs, i ) && later; }, 1 );
                break;
            case Op::Until:
                fixpoint(
                        k,
                        [ & ]( std::size_t i, char later ) -> char {
                            return at( c.rhs, i ) || ( at( c.lhs, i ) && later );
                        },
                        0 );
                break;
            case Op::Release:
                fixpoint(
                        k,
                        [ & ]( std::size_t i, char later ) -> char {
                            return at( c.rhs, i ) && ( at( c.lhs, i ) || later );
                        },
                        1 );
                break;
            }
        }
        return at( static_cast<int>( _code.size() ) - 1, pos ) != 0;
    }
};

/// τ, i ⊨ f under the usual LTL semantics on infinite words.
[[nodiscard]] inline bool eval( const LassoTrace& trace, const CompiledFormula& f, std::size_t i = 0 )
{
    const std::size_t n = trace.positions();
    const auto& ids = f.atoms();
    std::vector<char> table( ids.size() * n );
    for ( std::size_t a = 0; a < ids.size(); ++a )
        for ( std::size_t p = 0; p < n; ++p )
            table[ a * n + p ] = trace.state( p ).count( ids[ a ] ) ? 1 : 0;
    std::vector<char> scratch;
    return f.evaluate(
            n, trace.loop_start(), trace.canonical( i ),
            [ & ]( int a, std::size_t p ) { return table[ static_cast<std::size_t>( a ) * n + p ] != 0; }, scratch );
}

[[nodiscard]] inline bool eval( const LassoTrace& trace, const Formula& f, std::size_t i = 0 )
{
    return eval( trace, CompiledFormula{ f }, i );
}

namespace detail
{
template <class Keep>
LassoTrace filter_states( const LassoTrace& trace, Keep&& keep )
{
    auto filter = [ & ]( const std::vector<State>& states ) {
        std::vector<State> out;
        out.reserve( states.size() );
        for ( const auto& s : states )
        {
            State t;
            for ( const auto& a : s )
                if ( keep( a ) )
                    t.insert( t.end(), a );
            out.push_back( std::move( t ) );
        }
        return out;
    };
    return LassoTrace{ filter( trace.prefix() ), filter( trace.loop() ) };
}
} // namespace detail

/// α↾W: keeps environment atoms and the system atoms in `w`; primed atoms
/// are dropped. Shape is preserved.
[[nodiscard]] inline LassoTrace project_trace( const LassoTrace& trace, const VarList& env, const VarList& w )
{
    std::set<std::string> keep( env.begin(), env.end() );
    keep.insert( w.begin(), w.end() );
    return detail::filter_states( trace, [ & ]( const AtomId& a ) { return !a.primed && keep.count( a.base ); } );
}

/// Removes every primed atom, leaving the trace over the original alphabet.
[[nodiscard]] inline LassoTrace strip_primes( const LassoTrace& trace )
{
    return detail::filter_states( trace, []( const AtomId& a ) { return !a.primed; } );
}

/// The candidates z whose value differs from z' at some position. Result
/// follows the order of `candidates`.
[[nodiscard]] inline VarList compute_z( const LassoTrace& trace, const VarList& candidates )
{
    VarList out;
    for ( const auto& z : candidates )
    {
        AtomId plain = unprimed( z ), copy = primed( z );
        for ( std::size_t i = 0; i < trace.positions(); ++i )
        {
            const State& s = trace.state( i );
            if ( ( s.count( plain ) > 0 ) != ( s.count( copy ) > 0 ) )
            {
                out.push_back( z );
                break;
            }
        }
    }
    return out;
}

/// `{a, a'} ; {b} | {c}`: prefix states, then `|`, then loop states. Atoms
/// are listed in `order` (unknown names afterwards, alphabetically) with the
/// primed copy right after its base.
[[nodiscard]] inline std::string serialize_trace( const LassoTrace& trace, const VarList& order = {} )
{
    std::map<std::string, std::size_t> rank;
    for ( std::size_t i = 0; i < order.size(); ++i )
        rank.emplace( order[ i ], i );
    auto key = [ & ]( const AtomId& a ) {
        auto it = rank.find( a.base );
        return std::tuple{ it == rank.end() ? order.size() : it->second, a.base, a.primed };
    };
    auto state = [ & ]( const State& s ) {
        std::vector<AtomId> ids( s.begin(), s.end() );
        std::sort( ids.begin(), ids.end(), [ & ]( const AtomId& x, const AtomId& y ) { return key( x ) < key( y ); } );
        std::string out = "{";
        for ( std::size_t i = 0; i < ids.size(); ++i )
        {
            if ( i )
                out += ", ";
            out += ids[ i ].str();
        }
        return out + "}";
    };
    std::string out;
    for ( const auto& s : trace.prefix() )
        out += state( s ) + " ; ";
    if ( !out.empty() )
        out.replace( out.size() - 2, 2, "| " );
    else
        out = "| ";
    for ( std::size_t i = 0; i < trace.loop().size(); ++i )
    {
        if ( i )
            out += " ; ";
        out += state( trace.loop()[ i ] );
    }
    return out;
}

/// Inverse of `serialize_trace`; whitespace is insignificant.
[[nodiscard]] inline LassoTrace parse_trace( std::string_view text )
{
    std::size_t pos = 0;
    auto fail = [ & ]( const std::string& msg ) -> ParseError {
        return ParseError( ParseErrorKind::Syntax, 1, pos + 1, "trace: " + msg );
    };
    auto skip = [ & ] {
        while ( pos < text.size() && std::isspace( static_cast<unsigned char>( text[ pos ] ) ) )
            ++pos;
    };
    auto peek = [ & ]() -> char {
        skip();
        return pos < text.size() ? text[ pos ] : '\0';
    };
    auto parse_state = [ & ] {
        if ( peek() != '{' )
            throw fail( "expected '{'" );
        ++pos;
        State s;
        if ( peek() == '}' )
        {
            ++pos;
            return s;
        }
        while ( true )
        {
            skip();
            std::size_t begin = pos;
            while ( pos < text.size() && ( std::isalnum( static_cast<unsigned char>( text[ pos ] ) ) || text[ pos ] == '_' ) )
                ++pos;
            std::string name( text.substr( begin, pos - begin ) );
            if ( !is_identifier( name ) || is_reserved_word( name ) )
                throw fail( "expected an atom name" );
            bool is_primed = pos < text.size() && text[ pos ] == '\'';
            if ( is_primed )
                ++pos;
            s.insert( AtomId{ name, is_primed } );
            char c = peek();
            ++pos;
            if ( c == '}' )
                return s;
            if ( c != ',' )
                throw fail( "expected ',' or '}'" );
        }
    };

    std::vector<State> prefix, loop;
    bool in_loop = false;
    if ( peek() == '|' )
    {
        ++pos;
        in_loop = true;
    }
    while ( true )
    {
        ( in_loop ? loop : prefix ).push_back( parse_state() );
        char c = peek();
        if ( c == '\0' )
            break;
        ++pos;
        if ( c == '|' && !in_loop )
            in_loop = true;
        else if ( c != ';' )
            throw fail( "expected ';' or '|'" );
    }
    if ( !in_loop )
        throw fail( "missing '|' before the loop" );
    return LassoTrace{ std::move( prefix ), std::move( loop ) };
}

} // namespace ltldec
