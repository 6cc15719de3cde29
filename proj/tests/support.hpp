#pragma once

#include <ltldec/ltldec.hpp>

#include <deque>
#include <random>
#include <string>
#include <vector>

namespace ltldec::testing
{

struct Fixture
{
    const char* name;
    const char* text;
};

inline const Fixture relay_fixture{
        "relay", "env: p\nsys: t v w z\n"
                 "formula: G ((p -> X (v & !t)) & (!p -> X (!v & t)) & (v -> X (!w & z)) & (!v -> X (w & !z)))\n" };
inline const Fixture next_fixture{ "next", "env: p\nsys: a b\nformula: F (p -> X (a & b)) & G !b\n" };
inline const Fixture guard_fixture{ "guard", "env: p\nsys: a b c\nformula: G (p -> (a | (b & c)))\n" };
inline const Fixture until_fixture{ "until",
                                    "env: p\nsys: a d\nformula: G ((!p -> !d) & (p -> ((a U (a & G d)) | G a)))\n" };

inline const char* coupled_formula = "G ((p -> (a | b)) & (!p -> (!a & b)) & c)";
inline const char* chained_formula = "F ((p -> (a | b) & c) & (!p -> !c))";
inline const char* mixed_formula = "G (p -> (a | (b & c))) & F (p -> (d | e)) & F (!p -> !e)";

inline State state( std::initializer_list<const char*> names )
{
    State s;
    for ( const char* n : names )
    {
        std::string name( n );
        if ( !name.empty() && name.back() == '\'' )
            s.insert( primed( name.substr( 0, name.size() - 1 ) ) );
        else
            s.insert( unprimed( name ) );
    }
    return s;
}

/// Random formula over `names` with at most `max_nodes` AST nodes.
inline Formula random_formula( std::mt19937& rng, const VarList& names, std::size_t max_nodes )
{
    auto pick = [ & ]( std::size_t n ) { return std::uniform_int_distribution<std::size_t>( 0, n - 1 )( rng ); };
    if ( max_nodes <= 1 || pick( 4 ) == 0 )
    {
        std::size_t k = pick( names.size() + 1 );
        if ( k == names.size() )
            return pick( 2 ) ? top() : bottom();
        return atom( names[ k ] );
    }
    static constexpr Op unary[] = { Op::Not, Op::Next, Op::Eventually, Op::Always };
    static constexpr Op binary[] = { Op::And, Op::Or, Op::Implies, Op::Iff, Op::Until, Op::Release };
    if ( max_nodes == 2 || pick( 2 ) == 0 )
        return Formula::unary( unary[ pick( 4 ) ], random_formula( rng, names, max_nodes - 1 ) );
    std::size_t left = 1 + pick( max_nodes - 2 );
    Formula l = random_formula( rng, names, left );
    Formula r = random_formula( rng, names, max_nodes - 1 - node_count( l ) );
    return Formula::binary( binary[ pick( 6 ) ], l, r );
}

/// Random formula whose AST depth is at most `depth` (a single atom has depth 1).
inline Formula random_formula_depth( std::mt19937& rng, const VarList& names, std::size_t depth )
{
    auto pick = [ & ]( std::size_t n ) { return std::uniform_int_distribution<std::size_t>( 0, n - 1 )( rng ); };
    if ( depth <= 1 || pick( 3 ) == 0 )
        return atom( names[ pick( names.size() ) ] );
    static constexpr Op unary[] = { Op::Not, Op::Next, Op::Eventually, Op::Always };
    static constexpr Op binary[] = { Op::And, Op::Or, Op::Implies, Op::Iff, Op::Until, Op::Release };
    if ( pick( 5 ) < 2 )
        return Formula::unary( unary[ pick( 4 ) ], random_formula_depth( rng, names, depth - 1 ) );
    return Formula::binary( binary[ pick( 6 ) ], random_formula_depth( rng, names, depth - 1 ),
                            random_formula_depth( rng, names, depth - 1 ) );
}

/// Random spec with |E| ≤ 2, 1 ≤ |S| ≤ 4 and formula depth ≤ 5.
inline Spec random_spec( std::mt19937& rng )
{
    static const VarList env_names{ "p", "q" }, sys_names{ "a", "b", "c", "d" };
    auto pick = [ & ]( std::size_t lo, std::size_t hi ) {
        return std::uniform_int_distribution<std::size_t>( lo, hi )( rng );
    };
    Spec spec;
    spec.env.assign( env_names.begin(), env_names.begin() + static_cast<std::ptrdiff_t>( pick( 0, 2 ) ) );
    spec.sys.assign( sys_names.begin(), sys_names.begin() + static_cast<std::ptrdiff_t>( pick( 1, 4 ) ) );
    VarList all = spec.env;
    all.insert( all.end(), spec.sys.begin(), spec.sys.end() );
    spec.formula = random_formula_depth( rng, all, 5 );
    return spec;
}

inline LassoTrace random_trace( std::mt19937& rng, const VarList& alphabet, std::size_t prefix, std::size_t loop )
{
    std::bernoulli_distribution coin( 0.5 );
    auto states = [ & ]( std::size_t n ) {
        std::vector<State> out( n );
        for ( auto& s : out )
            for ( const auto& a : alphabet )
                if ( coin( rng ) )
                    s.insert( unprimed( a ) );
        return out;
    };
    return LassoTrace{ states( prefix ), states( loop ) };
}

/// Answers from a fixed script and records every query it receives.
class ScriptedSolver final : public Solver
{
    std::deque<SatResult> _answers;

public:
    std::vector<Formula> queries;

    explicit ScriptedSolver( std::vector<SatResult> answers ) : _answers( answers.begin(), answers.end() ) {}

    SatResult solve( const Formula& f ) override
    {
        queries.push_back( f );
        if ( _answers.empty() )
            throw SolverError( "scripted solver ran out of answers" );
        SatResult r = _answers.front();
        _answers.pop_front();
        return r;
    }
    [[nodiscard]] std::string name() const override { return "scripted"; }
};

/// Counts queries while delegating to the internal engine.
class CountingSolver final : public Solver
{
    InternalSolver _inner;

public:
    std::size_t calls = 0;
    SatResult solve( const Formula& f ) override
    {
        ++calls;
        return _inner.solve( f );
    }
    [[nodiscard]] std::string name() const override { return "counting"; }
};

inline std::set<std::set<std::string>> block_set( const PartitionResult& r )
{
    std::set<std::set<std::string>> out;
    for ( const auto& b : r.blocks )
        out.emplace( b.vars.begin(), b.vars.end() );
    return out;
}

} // namespace ltldec::testing
