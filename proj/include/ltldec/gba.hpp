#pragma once

#include "errors.hpp"
#include "formula.hpp"
#include "nnf.hpp"
#include "sat_result.hpp"
#include "trace.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ltldec
{

struct EngineOptions
{
    /// Upper bound on automaton states; exceeding it raises EngineLimitError.
    std::size_t state_cap = 200'000;
};

/// Literal constraint read at a state. Atoms in neither list are don't-care.
struct Guard
{
    std::vector<AtomId> positive;
    std::vector<AtomId> negative;
};

struct GbaState
{
    /// Node ids (in the automaton's formula table) that must hold from the
    /// next position on. Together with `guard` and `pending` this identifies
    /// the state.
    std::vector<int> obligations;
    /// Until nodes whose eventuality was postponed at this state.
    std::vector<int> pending;
    Guard guard;
    std::vector<std::size_t> successors;
};

/// State-labelled generalized Büchi automaton. A run s0 s1 s2 ... reads at
/// position i a letter satisfying `states[s_i].guard`, i.e. every edge s → t
/// carries t's guard, and the initial states' guards apply to position 0.
/// A run is accepting when it visits every acceptance set infinitely often.
struct Gba
{
    std::vector<AtomId> alphabet;
    std::vector<GbaState> states;
    std::vector<std::size_t> initial;
    /// One entry per Until subformula: acceptance[k][s] != 0 iff s is in set k.
    std::vector<std::vector<char>> acceptance;
    /// Printed Until subformula behind each acceptance set.
    std::vector<std::string> acceptance_labels;
};

namespace detail
{

enum class NKind : std::uint8_t
{
    True,
    False,
    Lit,
    And,
    Or,
    Next,
    Until,
    Release
};

struct NNode
{
    NKind kind;
    bool positive = true;
    int atom = -1;
    int lhs = -1;
    int rhs = -1;
};

// Hash-consed table of NNF subformulas; structurally equal subformulas share
// one id.
class NodeTable
{
    std::vector<NNode> _nodes;
    std::vector<Formula> _source;
    std::map<std::tuple<int, bool, int, int, int>, int> _index;
    std::map<AtomId, int> _atom_index;
    std::vector<AtomId> _atoms;
    std::unordered_map<const void*, int> _memo;
    int _root = -1;

    int intern( NNode n, const Formula& source )
    {
        auto key = std::tuple{ static_cast<int>( n.kind ), n.positive, n.atom, n.lhs, n.rhs };
        if ( auto it = _index.find( key ); it != _index.end() )
            return it->second;
        _nodes.push_back( n );
        _source.push_back( source );
        int id = static_cast<int>( _nodes.size() ) - 1;
        _index.emplace( key, id );
        return id;
    }

    int build( const Formula& f )
    {
        if ( auto it = _memo.find( f.identity() ); it != _memo.end() )
            return it->second;
        NNode n{ NKind::True };
        switch ( f.op() )
        {
        case Op::True: n.kind = NKind::True; break;
        case Op::False: n.kind = NKind::False; break;
        case Op::Atom:
            n.kind = NKind::Lit;
            n.atom = _atom_index.at( f.atom_id() );
            break;
        case Op::Not:
            n.kind = NKind::Lit;
            n.positive = false;
            n.atom = _atom_index.at( f.child().atom_id() );
            break;
        case Op::Next:
            n.kind = NKind::Next;
            n.lhs = build( f.child() );
            break;
        case Op::And:
        case Op::Or:
        case Op::Until:
        case Op::Release:
            n.kind = f.op() == Op::And ? NKind::And
                   : f.op() == Op::Or  ? NKind::Or
                   : f.op() == Op::Until ? NKind::Until
                                         : NKind::Release;
            n.lhs = build( f.lhs() );
            n.rhs = build( f.rhs() );
            break;
        default: throw std::invalid_argument( "build_gba: formula is not in negation normal form" );
        }
        int id = intern( n, f );
        _memo.emplace( f.identity(), id );
        return id;
    }

public:
    explicit NodeTable( const Formula& nnf )
    {
        auto ids = ltldec::atoms( nnf );
        _atoms.assign( ids.begin(), ids.end() );
        for ( std::size_t i = 0; i < _atoms.size(); ++i )
            _atom_index.emplace( _atoms[ i ], static_cast<int>( i ) );
        _root = build( nnf );
    }

    [[nodiscard]] int root() const { return _root; }
    [[nodiscard]] const NNode& operator[]( int id ) const { return _nodes[ static_cast<std::size_t>( id ) ]; }
    [[nodiscard]] std::size_t size() const { return _nodes.size(); }
    [[nodiscard]] const std::vector<AtomId>& atoms() const { return _atoms; }
    [[nodiscard]] const Formula& source( int id ) const { return _source[ static_cast<std::size_t>( id ) ]; }
};

// A fully expanded tableau node: literal constraints for the current
// position (+1 / -1 / 0 don't-care per atom), obligations for the next
// position, and the Until nodes postponed here.
struct Term
{
    std::vector<signed char> lits;
    std::vector<int> next;
    std::vector<int> pending;

    friend bool operator<( const Term& a, const Term& b )
    {
        return std::tie( a.lits, a.next, a.pending ) < std::tie( b.lits, b.next, b.pending );
    }
    friend bool operator==( const Term&, const Term& ) = default;
};

struct SequenceHash
{
    template <class T>
    std::size_t operator()( const std::vector<T>& v ) const
    {
        std::size_t h = v.size();
        for ( const auto& x : v )
            h ^= static_cast<std::size_t>( x ) + 0x9e3779b97f4a7c15ULL + ( h << 6 ) + ( h >> 2 );
        return h;
    }
};

struct TermHash
{
    std::size_t operator()( const Term& t ) const
    {
        SequenceHash h;
        return h( t.lits ) * 31 + h( t.next ) * 17 + h( t.pending );
    }
};

inline void insert_sorted( std::vector<int>& v, int x )
{
    auto it = std::lower_bound( v.begin(), v.end(), x );
    if ( it == v.end() || *it != x )
        v.insert( it, x );
}

inline bool has_sorted( const std::vector<int>& v, int x ) { return std::binary_search( v.begin(), v.end(), x ); }

// Splits a set of obligations into its disjunctive normal form using the
// one-step unfoldings
//   g U h = h | (g & X(g U h))      g R h = h & (g | X(g R h)).
class Expander
{
    const NodeTable& _table;
    std::vector<Term> _out;
    std::unordered_set<Term, TermHash> _seen;

    struct Partial
    {
        std::vector<signed char> lits;
        std::vector<char> done;
        std::vector<int> next;
        std::vector<int> pending;
    };

    // True when `id` is already enforced by the partial term; branching on a
    // disjunction with such a disjunct cannot yield a weaker term.
    bool satisfied( const Partial& p, int id ) const
    {
        const NNode& n = _table[ id ];
        switch ( n.kind )
        {
        case NKind::True: return true;
        case NKind::Lit: return p.lits[ static_cast<std::size_t>( n.atom ) ] == ( n.positive ? 1 : -1 );
        case NKind::Next: return has_sorted( p.next, n.lhs );
        default: return p.done[ static_cast<std::size_t>( id ) ] != 0;
        }
    }

    void run( Partial p, std::vector<int> work, std::vector<int> branch )
    {
        while ( true )
        {
            while ( !work.empty() )
            {
                int id = work.back();
                work.pop_back();
                auto& done = p.done[ static_cast<std::size_t>( id ) ];
                if ( done )
                    continue;
                done = 1;
                const NNode& n = _table[ id ];
                switch ( n.kind )
                {
                case NKind::True: break;
                case NKind::False: return;
                case NKind::Lit:
                {
                    signed char want = n.positive ? 1 : -1;
                    auto& cur = p.lits[ static_cast<std::size_t>( n.atom ) ];
                    if ( cur == -want )
                        return;
                    cur = want;
                    break;
                }
                case NKind::And:
                    work.push_back( n.rhs );
                    work.push_back( n.lhs );
                    break;
                case NKind::Next: insert_sorted( p.next, n.lhs ); break;
                case NKind::Or:
                case NKind::Until:
                case NKind::Release: branch.push_back( id ); break;
                }
            }

            if ( branch.empty() )
            {
                Term t{ std::move( p.lits ), std::move( p.next ), std::move( p.pending ) };
                if ( _seen.insert( t ).second )
                    _out.push_back( std::move( t ) );
                return;
            }

            int id = branch.back();
            branch.pop_back();
            const NNode& n = _table[ id ];
            switch ( n.kind )
            {
            case NKind::Or:
                if ( satisfied( p, n.lhs ) || satisfied( p, n.rhs ) )
                    break;
                {
                    auto w = work;
                    w.push_back( n.lhs );
                    run( p, std::move( w ), branch );
                }
                work.push_back( n.rhs );
                break;
            case NKind::Until:
                if ( satisfied( p, n.rhs ) )
                    break;
                {
                    auto w = work;
                    w.push_back( n.rhs );
                    run( p, std::move( w ), branch );
                }
                work.push_back( n.lhs );
                insert_sorted( p.next, id );
                insert_sorted( p.pending, id );
                break;
            case NKind::Release:
                if ( satisfied( p, n.lhs ) && satisfied( p, n.rhs ) )
                    break;
                if ( !has_sorted( p.next, id ) )
                {
                    auto w = work;
                    w.push_back( n.rhs );
                    w.push_back( n.lhs );
                    run( p, std::move( w ), branch );
                    insert_sorted( p.next, id );
                }
                work.push_back( n.rhs );
                break;
            default: break;
            }
        }
    }

public:
    explicit Expander( const NodeTable& table ) : _table{ table } {}

    std::vector<Term> expand( const std::vector<int>& obligations )
    {
        _out.clear();
        _seen.clear();
        Partial p{ std::vector<signed char>( _table.atoms().size(), 0 ), std::vector<char>( _table.size(), 0 ), {},
                   {} };
        std::vector<int> work( obligations.rbegin(), obligations.rend() );
        run( std::move( p ), std::move( work ), {} );
        return std::move( _out );
    }
};

} // namespace detail

/// Tableau construction for an NNF formula. Only states reachable from the
/// initial ones are built, in breadth-first creation order, so the same
/// formula always produces the same automaton.
///
/// Throws std::invalid_argument if `nnf` is not in negation normal form and
/// EngineLimitError if more than `options.state_cap` states are needed.
[[nodiscard]] inline Gba build_gba( const Formula& nnf, const EngineOptions& options = {} )
{
    if ( !is_nnf( nnf ) )
        throw std::invalid_argument( "build_gba: formula is not in negation normal form" );

    detail::NodeTable table{ nnf };
    detail::Expander expander{ table };

    Gba gba;
    gba.alphabet = table.atoms();

    std::vector<int> untils;
    for ( int id = 0; id < static_cast<int>( table.size() ); ++id )
        if ( table[ id ].kind == detail::NKind::Until )
        {
            untils.push_back( id );
            gba.acceptance_labels.push_back( print_formula( table.source( id ) ) );
        }

    std::unordered_map<detail::Term, std::size_t, detail::TermHash> state_of;
    std::unordered_map<std::vector<int>, std::vector<std::size_t>, detail::SequenceHash> expansions;

    auto successors_of = [ & ]( const std::vector<int>& obligations ) -> const std::vector<std::size_t>& {
        if ( auto it = expansions.find( obligations ); it != expansions.end() )
            return it->second;
        std::vector<std::size_t> ids;
        for ( auto& term : expander.expand( obligations ) )
        {
            auto [ it, fresh ] = state_of.try_emplace( term, gba.states.size() );
            if ( fresh )
            {
                if ( gba.states.size() >= options.state_cap )
                    throw EngineLimitError( "automaton exceeds the state cap of " +
                                            std::to_string( options.state_cap ) + " states" );
                GbaState s;
                s.obligations = term.next;
                s.pending = term.pending;
                for ( std::size_t a = 0; a < term.lits.size(); ++a )
                {
                    if ( term.lits[ a ] > 0 )
                        s.guard.positive.push_back( table.atoms()[ a ] );
                    else if ( term.lits[ a ] < 0 )
                        s.guard.negative.push_back( table.atoms()[ a ] );
                }
                gba.states.push_back( std::move( s ) );
            }
            ids.push_back( it->second );
        }
        return expansions.emplace( obligations, std::move( ids ) ).first->second;
    };

    gba.initial = successors_of( { table.root() } );
    for ( std::size_t s = 0; s < gba.states.size(); ++s )
    {
        std::vector<int> obligations = gba.states[ s ].obligations;
        auto succ = successors_of( obligations );
        gba.states[ s ].successors = std::move( succ );
    }

    gba.acceptance.assign( untils.size(), std::vector<char>( gba.states.size(), 0 ) );
    for ( std::size_t k = 0; k < untils.size(); ++k )
        for ( std::size_t s = 0; s < gba.states.size(); ++s )
            gba.acceptance[ k ][ s ] = !detail::has_sorted( gba.states[ s ].pending, untils[ k ] );
    return gba;
}

namespace detail
{

// Iterative Tarjan; returns the SCC index of every state.
inline std::vector<std::size_t> strongly_connected_components( const Gba& gba, std::size_t& count )
{
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    const std::size_t n = gba.states.size();
    std::vector<std::size_t> index( n, none ), low( n, 0 ), comp( n, none );
    std::vector<char> on_stack( n, 0 );
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call; // (state, next successor position)
    std::size_t counter = 0;
    count = 0;

    for ( std::size_t root = 0; root < n; ++root )
    {
        if ( index[ root ] != none )
            continue;
        call.emplace_back( root, 0 );
        while ( !call.empty() )
        {
            auto& [ v, pos ] = call.back();
            if ( pos == 0 && index[ v ] == none )
            {
                index[ v ] = low[ v ] = counter++;
                stack.push_back( v );
                on_stack[ v ] = 1;
            }
            const auto& succ = gba.states[ v ].successors;
            if ( pos < succ.size() )
            {
                std::size_t w = succ[ pos++ ];
                if ( index[ w ] == none )
                    call.emplace_back( w, 0 );
                else if ( on_stack[ w ] )
                    low[ v ] = std::min( low[ v ], index[ w ] );
                continue;
            }
            if ( low[ v ] == index[ v ] )
            {
                std::size_t w;
                do
                {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[ w ] = 0;
                    comp[ w ] = count;
                } while ( w != v );
                ++count;
            }
            std::size_t finished = v;
            call.pop_back();
            if ( !call.empty() )
            {
                std::size_t parent = call.back().first;
                low[ parent ] = std::min( low[ parent ], low[ finished ] );
            }
        }
    }
    return comp;
}

// Shortest path (by BFS, successors in stored order) from `from` to any state
// accepted by `goal`, staying inside `allowed`. With `min_one_step` the empty
// path is not considered. Returns the states after `from`, ending at the goal.
template <class Goal, class Allowed>
std::vector<std::size_t> bfs_path( const Gba& gba, std::size_t from, Goal&& goal, Allowed&& allowed,
                                   bool min_one_step )
{
    if ( !min_one_step && goal( from ) )
        return {};
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent( gba.states.size(), none );
    std::deque<std::size_t> queue;
    auto visit = [ & ]( std::size_t v, std::size_t via ) {
        if ( parent[ v ] != none || !allowed( v ) )
            return false;
        parent[ v ] = via;
        queue.push_back( v );
        return goal( v );
    };
    auto unwind = [ & ]( std::size_t v ) {
        std::vector<std::size_t> path;
        for ( ; v != from || path.empty(); v = parent[ v ] )
        {
            path.push_back( v );
            if ( parent[ v ] == from )
                break;
        }
        std::reverse( path.begin(), path.end() );
        return path;
    };
    for ( std::size_t w : gba.states[ from ].successors )
        if ( visit( w, from ) )
            return unwind( w );
    while ( !queue.empty() )
    {
        std::size_t v = queue.front();
        queue.pop_front();
        for ( std::size_t w : gba.states[ v ].successors )
            if ( visit( w, v ) )
                return unwind( w );
    }
    throw InvariantViolation( "bfs_path: goal unreachable inside its strongly connected component" );
}

inline State complete_guard( const Guard& guard ) { return State( guard.positive.begin(), guard.positive.end() ); }

} // namespace detail

/// GBA emptiness via strongly connected components. Picks the accepting SCC
/// closest to an initial state and returns a lasso through it: the shortest
/// path to its entry state, then a cycle that detours through each
/// acceptance set in turn. Don't-care atoms are set false.
[[nodiscard]] inline SatResult find_accepting_lasso( const Gba& gba )
{
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    const std::size_t n = gba.states.size();
    if ( n == 0 || gba.initial.empty() )
        return SatResult::unsat();

    std::size_t scc_count = 0;
    auto comp = detail::strongly_connected_components( gba, scc_count );

    std::vector<char> nontrivial( scc_count, 0 );
    std::vector<std::vector<char>> hits( scc_count, std::vector<char>( gba.acceptance.size(), 0 ) );
    for ( std::size_t s = 0; s < n; ++s )
    {
        for ( std::size_t w : gba.states[ s ].successors )
            if ( comp[ w ] == comp[ s ] )
                nontrivial[ comp[ s ] ] = 1;
        for ( std::size_t k = 0; k < gba.acceptance.size(); ++k )
            if ( gba.acceptance[ k ][ s ] )
                hits[ comp[ s ] ][ k ] = 1;
    }
    auto accepting = [ & ]( std::size_t c ) {
        return nontrivial[ c ] && std::all_of( hits[ c ].begin(), hits[ c ].end(), []( char h ) { return h != 0; } );
    };

    // Breadth-first distances from the initial states.
    std::vector<std::size_t> dist( n, none ), parent( n, none );
    std::deque<std::size_t> queue;
    for ( std::size_t s : gba.initial )
        if ( dist[ s ] == none )
        {
            dist[ s ] = 0;
            queue.push_back( s );
        }
    std::size_t entry = none;
    while ( !queue.empty() )
    {
        std::size_t v = queue.front();
        queue.pop_front();
        if ( accepting( comp[ v ] ) )
        {
            entry = v;
            break;
        }
        for ( std::size_t w : gba.states[ v ].successors )
            if ( dist[ w ] == none )
            {
                dist[ w ] = dist[ v ] + 1;
                parent[ w ] = v;
                queue.push_back( w );
            }
    }
    if ( entry == none )
        return SatResult::unsat();

    std::vector<std::size_t> stem;
    for ( std::size_t v = entry; parent[ v ] != none; v = parent[ v ] )
        stem.push_back( parent[ v ] );
    std::reverse( stem.begin(), stem.end() );

    const std::size_t scc = comp[ entry ];
    auto inside = [ & ]( std::size_t v ) { return comp[ v ] == scc; };

    std::vector<std::size_t> cycle{ entry };
    std::size_t cur = entry;
    for ( std::size_t k = 0; k < gba.acceptance.size(); ++k )
    {
        const auto& set = gba.acceptance[ k ];
        if ( std::any_of( cycle.begin(), cycle.end(), [ & ]( std::size_t v ) { return set[ v ] != 0; } ) )
            continue;
        auto detour = detail::bfs_path( gba, cur, [ & ]( std::size_t v ) { return set[ v ] != 0; }, inside, false );
        cycle.insert( cycle.end(), detour.begin(), detour.end() );
        cur = cycle.back();
    }
    auto back = detail::bfs_path( gba, cur, [ & ]( std::size_t v ) { return v == entry; }, inside, true );
    back.pop_back(); // the entry itself closes the loop
    cycle.insert( cycle.end(), back.begin(), back.end() );

    std::vector<State> prefix, loop;
    for ( std::size_t v : stem )
        prefix.push_back( detail::complete_guard( gba.states[ v ].guard ) );
    for ( std::size_t v : cycle )
        loop.push_back( detail::complete_guard( gba.states[ v ].guard ) );
    return SatResult::sat( LassoTrace{ std::move( prefix ), std::move( loop ) } );
}

} // namespace ltldec
