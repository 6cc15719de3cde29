#pragma once

#include "errors.hpp"
#include "formula.hpp"
#include "sat_result.hpp"
#include "spec.hpp"
#include "trace.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ltldec
{

/// Largest number of candidate lassos `bounded_sat` will enumerate.
inline constexpr std::uint64_t bounded_sat_budget = std::uint64_t{ 1 } << 22;

/// Exhaustive search over every lasso with exactly `prefix_len` prefix and
/// `loop_len` loop states over the atoms of `f`. Returns the first model in
/// enumeration order (position-major, atom bits in `atoms(f)` order, counting
/// up from the all-false trace), or Unsat if this shape has no model.
[[nodiscard]] inline SatResult bounded_sat( const Formula& f, std::size_t prefix_len, std::size_t loop_len )
{
    if ( loop_len == 0 )
        throw std::invalid_argument( "bounded_sat: loop length must be positive" );
    CompiledFormula compiled{ f };
    const auto& ids = compiled.atoms();
    const std::size_t n = prefix_len + loop_len;
    const std::size_t bits = ids.size() * n;
    if ( bits > 22 )
        throw EngineLimitError( "bounded_sat: " + std::to_string( bits ) +
                                " valuation bits exceed the enumeration budget of 2^22 lassos" );

    std::vector<char> scratch;
    const std::uint64_t total = std::uint64_t{ 1 } << bits;
    for ( std::uint64_t v = 0; v < total; ++v )
    {
        auto holds = [ & ]( int a, std::size_t p ) { return ( ( v >> ( p * ids.size() + a ) ) & 1 ) != 0; };
        if ( !compiled.evaluate( n, prefix_len, 0, holds, scratch ) )
            continue;
        std::vector<State> states( n );
        for ( std::size_t p = 0; p < n; ++p )
            for ( std::size_t a = 0; a < ids.size(); ++a )
                if ( holds( static_cast<int>( a ), p ) )
                    states[ p ].insert( ids[ a ] );
        std::vector<State> loop( states.begin() + static_cast<std::ptrdiff_t>( prefix_len ), states.end() );
        states.resize( prefix_len );
        return SatResult::sat( LassoTrace{ std::move( states ), std::move( loop ) } );
    }
    return SatResult::unsat();
}

/// `bounded_sat` over every shape with prefix ≤ max_prefix and
/// 1 ≤ loop ≤ max_loop, smallest total length first.
[[nodiscard]] inline SatResult bounded_sat_upto( const Formula& f, std::size_t max_prefix, std::size_t max_loop )
{
    for ( std::size_t total = 1; total <= max_prefix + max_loop; ++total )
        for ( std::size_t loop = 1; loop <= std::min( total, max_loop ); ++loop )
        {
            std::size_t prefix = total - loop;
            if ( prefix > max_prefix )
                continue;
            if ( auto r = bounded_sat( f, prefix, loop ); r.is_sat() )
                return r;
        }
    return SatResult::unsat();
}

/// The same ω-word as `trace`, re-expressed with `prefix_len` prefix and
/// `loop_len` loop states. Requires prefix_len ≥ |prefix| and loop_len a
/// multiple of |loop|.
[[nodiscard]] inline LassoTrace unroll( const LassoTrace& trace, std::size_t prefix_len, std::size_t loop_len )
{
    if ( prefix_len < trace.prefix().size() || loop_len == 0 || loop_len % trace.loop().size() != 0 )
        throw std::invalid_argument( "unroll: target shape does not describe the same word" );
    std::vector<State> prefix, loop;
    for ( std::size_t i = 0; i < prefix_len; ++i )
        prefix.push_back( trace.state( i ) );
    for ( std::size_t i = 0; i < loop_len; ++i )
        loop.push_back( trace.state( prefix_len + i ) );
    return LassoTrace{ std::move( prefix ), std::move( loop ) };
}

/// A finite set of lassos over environment atoms `env` and system atoms
/// `sys`, all with the same (prefix, loop) shape.
class TraceSet
{
    VarList _env;
    VarList _sys;
    std::size_t _prefix_len;
    std::size_t _loop_len;
    std::set<LassoTrace> _traces;

public:
    TraceSet( VarList env, VarList sys, std::size_t prefix_len, std::size_t loop_len )
            : _env{ std::move( env ) }, _sys{ std::move( sys ) }, _prefix_len{ prefix_len }, _loop_len{ loop_len }
    {
        if ( loop_len == 0 )
            throw std::invalid_argument( "TraceSet: loop length must be positive" );
    }

    [[nodiscard]] const VarList& env() const { return _env; }
    [[nodiscard]] const VarList& sys() const { return _sys; }
    [[nodiscard]] std::size_t prefix_len() const { return _prefix_len; }
    [[nodiscard]] std::size_t loop_len() const { return _loop_len; }
    [[nodiscard]] const std::set<LassoTrace>& traces() const { return _traces; }
    [[nodiscard]] std::size_t size() const { return _traces.size(); }
    [[nodiscard]] bool empty() const { return _traces.empty(); }
    [[nodiscard]] bool contains( const LassoTrace& t ) const { return _traces.count( t ) > 0; }

    /// Adds `t` after checking its shape and that it only uses unprimed
    /// atoms of the alphabet. Returns false for a duplicate.
    bool insert( LassoTrace t )
    {
        if ( t.prefix().size() != _prefix_len || t.loop().size() != _loop_len )
            throw std::invalid_argument( "TraceSet: trace shape differs from the set's shape" );
        for ( std::size_t i = 0; i < t.positions(); ++i )
            for ( const auto& a : t.state( i ) )
                if ( a.primed || ( !ltldec::contains( _env, a.base ) && !ltldec::contains( _sys, a.base ) ) )
                    throw std::invalid_argument( "TraceSet: atom '" + a.str() + "' is outside the alphabet" );
        return _traces.insert( std::move( t ) ).second;
    }

    /// Equal traces over the same alphabet (as sets) and shape.
    friend bool operator==( const TraceSet& a, const TraceSet& b )
    {
        auto as_set = []( const VarList& v ) { return std::set<std::string>( v.begin(), v.end() ); };
        return a._prefix_len == b._prefix_len && a._loop_len == b._loop_len && as_set( a._env ) == as_set( b._env ) &&
               as_set( a._sys ) == as_set( b._sys ) && a._traces == b._traces;
    }
};

/// Every trace of `a` is in `b`.
[[nodiscard]] inline bool is_subset( const TraceSet& a, const TraceSet& b )
{
    return std::includes( b.traces().begin(), b.traces().end(), a.traces().begin(), a.traces().end() );
}

/// Re-expresses `set` with a larger shape; see `unroll`.
[[nodiscard]] inline TraceSet reshape( const TraceSet& set, std::size_t prefix_len, std::size_t loop_len )
{
    TraceSet out{ set.env(), set.sys(), prefix_len, loop_len };
    for ( const auto& t : set.traces() )
        out.insert( unroll( t, prefix_len, loop_len ) );
    return out;
}

/// Brings both sets to the common shape (max prefix, lcm of loops).
[[nodiscard]] inline std::pair<TraceSet, TraceSet> align( const TraceSet& a, const TraceSet& b )
{
    std::size_t prefix = std::max( a.prefix_len(), b.prefix_len() );
    std::size_t loop = std::lcm( a.loop_len(), b.loop_len() );
    return { reshape( a, prefix, loop ), reshape( b, prefix, loop ) };
}

/// Σ↾W: each trace restricted to the environment atoms and the system atoms
/// in `w`. The result's system alphabet is sys ∩ W.
[[nodiscard]] inline TraceSet set_project( const TraceSet& set, const VarList& w )
{
    VarList kept;
    for ( const auto& v : set.sys() )
        if ( contains( w, v ) )
            kept.push_back( v );
    TraceSet out{ set.env(), kept, set.prefix_len(), set.loop_len() };
    for ( const auto& t : set.traces() )
        out.insert( project_trace( t, set.env(), kept ) );
    return out;
}

/// Σ1 ⋈ Σ2: every trace over E ∪ W1 ∪ W2 whose restriction to E ∪ W1 is in
/// Σ1 and whose restriction to E ∪ W2 is in Σ2.
[[nodiscard]] inline TraceSet set_join( const TraceSet& a, const TraceSet& b )
{
    if ( a.prefix_len() != b.prefix_len() || a.loop_len() != b.loop_len() )
        throw std::invalid_argument( "set_join: trace sets have different shapes; align them first" );
    if ( std::set<std::string>( a.env().begin(), a.env().end() ) !=
         std::set<std::string>( b.env().begin(), b.env().end() ) )
        throw std::invalid_argument( "set_join: trace sets have different environment alphabets" );

    VarList shared, joined = a.sys();
    for ( const auto& v : b.sys() )
    {
        if ( contains( a.sys(), v ) )
            shared.push_back( v );
        else
            joined.push_back( v );
    }

    std::map<LassoTrace, std::vector<const LassoTrace*>> by_key;
    for ( const auto& t : b.traces() )
        by_key[ project_trace( t, a.env(), shared ) ].push_back( &t );

    TraceSet out{ a.env(), joined, a.prefix_len(), a.loop_len() };
    for ( const auto& t : a.traces() )
    {
        auto it = by_key.find( project_trace( t, a.env(), shared ) );
        if ( it == by_key.end() )
            continue;
        for ( const LassoTrace* u : it->second )
        {
            auto merge = [ & ]( const std::vector<State>& x, const std::vector<State>& y ) {
                std::vector<State> m( x );
                for ( std::size_t i = 0; i < m.size(); ++i )
                    m[ i ].insert( y[ i ].begin(), y[ i ].end() );
                return m;
            };
            out.insert( LassoTrace{ merge( t.prefix(), u->prefix() ), merge( t.loop(), u->loop() ) } );
        }
    }
    return out;
}

/// Every lasso of the given shape over env ∪ sys. Exponential; tests only.
[[nodiscard]] inline TraceSet all_traces( const VarList& env, const VarList& sys, std::size_t prefix_len,
                                          std::size_t loop_len )
{
    VarList alphabet = env;
    alphabet.insert( alphabet.end(), sys.begin(), sys.end() );
    const std::size_t n = prefix_len + loop_len;
    const std::size_t bits = alphabet.size() * n;
    if ( bits > 22 )
        throw EngineLimitError( "all_traces: alphabet and shape exceed the enumeration budget" );
    TraceSet out{ env, sys, prefix_len, loop_len };
    for ( std::uint64_t v = 0; v < ( std::uint64_t{ 1 } << bits ); ++v )
    {
        std::vector<State> prefix( prefix_len ), loop( loop_len );
        for ( std::size_t p = 0; p < n; ++p )
        {
            State& s = p < prefix_len ? prefix[ p ] : loop[ p - prefix_len ];
            for ( std::size_t a = 0; a < alphabet.size(); ++a )
                if ( ( v >> ( p * alphabet.size() + a ) ) & 1 )
                    s.insert( unprimed( alphabet[ a ] ) );
        }
        out.insert( LassoTrace{ std::move( prefix ), std::move( loop ) } );
    }
    return out;
}

} // namespace ltldec
