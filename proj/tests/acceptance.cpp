// Exit criteria: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace ltldec;
using namespace ltldec::testing;

namespace
{

using Blocks = std::set<std::set<std::string>>;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report( const std::string& id, bool ok, const std::string& detail, Clock::time_point start )
{
    double secs = std::chrono::duration<double>( Clock::now() - start ).count();
    std::printf( "%s %-3s %s (%.2fs)\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str(), secs );
    std::fflush( stdout );
    if ( !ok )
        ++failures;
}

std::string show( const Blocks& blocks )
{
    std::string out = "{";
    bool first_block = true;
    for ( const auto& b : blocks )
    {
        out += first_block ? "{" : ", {";
        first_block = false;
        bool first = true;
        for ( const auto& v : b )
        {
            out += ( first ? "" : "," ) + v;
            first = false;
        }
        out += "}";
    }
    return out + "}";
}

// Runs `fn` on every permutation of the system variables under both policies.
void for_each_order( const Spec& spec, const std::function<void( const Spec&, OrderPolicy )>& fn )
{
    VarList order = spec.sys;
    std::sort( order.begin(), order.end() );
    do
    {
        Spec permuted = spec;
        permuted.sys = order;
        fn( permuted, OrderPolicy::Declaration );
    } while ( std::next_permutation( order.begin(), order.end() ) );
    fn( spec, OrderPolicy::Lexicographic );
}

struct CorpusEntry
{
    std::string label;
    Spec spec;
};

std::vector<CorpusEntry> build_corpus()
{
    std::vector<CorpusEntry> corpus;
    for ( const auto* fx : { &relay_fixture, &next_fixture, &guard_fixture, &until_fixture } )
        corpus.push_back( { fx->name, parse_spec( fx->text ) } );
    corpus.push_back( { "coupled", parse_spec( std::string( "env: p\nsys: a b c\nformula: " ) + coupled_formula ) } );
    corpus.push_back( { "chained", parse_spec( std::string( "env: p\nsys: a b c\nformula: " ) + chained_formula ) } );
    std::mt19937 rng( 2024 );
    for ( int i = 0; i < 200; ++i )
        corpus.push_back( { "random#" + std::to_string( i ), random_spec( rng ) } );
    return corpus;
}

void criterion_1_and_9()
{
    struct Case
    {
        std::string id;
        const Fixture* fx;
        Blocks expected;
    };
    const std::vector<Case> cases{
            { "1a", &relay_fixture, { { "v", "w", "z" }, { "t" } } },
            { "1b", &next_fixture, { { "a" }, { "b" } } },
            { "1c", &guard_fixture, { { "a", "b", "c" } } },
            { "1d", &until_fixture, { { "a", "d" } } },
    };
    std::vector<std::pair<std::string, std::size_t>> counts;
    for ( const auto& c : cases )
    {
        auto start = Clock::now();
        Spec spec = parse_spec( c.fx->text );
        bool ok = true;
        std::size_t orders = 0, max_queries = 0;
        std::set<std::string> seen;
        for_each_order( spec, [ & ]( const Spec& s, OrderPolicy policy ) {
            InternalSolver solver;
            PartitionResult r = partition( s, solver, policy );
            Blocks got = block_set( r );
            seen.insert( show( got ) );
            ok = ok && got == c.expected;
            max_queries = std::max( max_queries, r.query_log.size() );
            ++orders;
        } );
        std::string got;
        for ( const auto& g : seen )
            got += ( got.empty() ? "" : " | " ) + g;
        report( c.id, ok,
                std::string( "partition of " ) + c.fx->name + ": expected " + show( c.expected ) + ", got " + got +
                        " over " + std::to_string( orders ) + " orders",
                start );
        counts.emplace_back( c.id, max_queries );
    }

    auto start = Clock::now();
    bool ok = true;
    std::string detail = "solver queries per fixture (max over orders, bound 25):";
    for ( const auto& [ id, n ] : counts )
    {
        ok = ok && n <= 25;
        detail += " " + id + "=" + std::to_string( n );
    }
    report( "9", ok, detail, start );
}

void criterion_2()
{
    auto start = Clock::now();
    InternalSolver solver;
    const VarList s{ "a", "b", "c" };
    Formula coupled = parse_formula( coupled_formula );
    Formula chained = parse_formula( chained_formula );
    bool a = !check_independent( solver, coupled, { "a" }, s ).independent;
    bool bc = !check_independent( solver, coupled, { "b", "c" }, s ).independent;
    bool ab = !check_independent( solver, chained, { "a", "b" }, s ).independent;
    bool c = !check_independent( solver, chained, { "c" }, s ).independent;
    std::ostringstream d;
    d << "dependent: coupled {a}=" << a << " {b,c}=" << bc << "; chained {a,b}=" << ab << " {c}=" << c;
    report( "2", a && bc && ab && c, d.str(), start );
}

void criterion_3()
{
    auto start = Clock::now();
    LassoTrace sigma{ {}, { state( { "p", "a", "d" } ) } };
    bool model = eval( sigma, parse_formula( mixed_formula ), 0 );

    Formula phi = parse_formula( chained_formula );
    LassoTrace alpha{ { state( { "p", "a", "c'" } ), state( { "p", "a'", "c" } ) }, { state( { "p", "c" } ) } };
    bool projections = eval( alpha, land( rename_projection( phi, { "a", "b" } ), rename_projection( phi, { "c" } ) ) );
    bool falsifies = !eval( alpha, phi );
    std::ostringstream d;
    d << "{p,a,d}^w |= phi_mixed: " << model << "; chained trace |= projections: " << projections
      << ", |/= phi: " << falsifies;
    report( "3", model && projections && falsifies, d.str(), start );
}

void criteria_4_5_6( const std::vector<CorpusEntry>& corpus )
{
    InternalSolver solver;
    std::size_t sound_checks = 0, sound_failures = 0, min_checks = 0, min_failures = 0, skipped = 0;
    std::size_t disagreement_checks = 0, invariant_faults = 0, engine_errors = 0;
    std::vector<std::string> notes;
    double soundness_secs = 0, minimality_secs = 0, partition_secs = 0;

    for ( const auto& entry : corpus )
    {
        auto t0 = Clock::now();
        PartitionResult r;
        try
        {
            Decomposer d{ solver, entry.spec.formula, declared_order( entry.spec ) };
            r = d.partition( entry.spec.sys );
            disagreement_checks += r.disagreement_checks;
        }
        catch ( const InvariantViolation& e )
        {
            ++invariant_faults;
            notes.push_back( entry.label + ": " + e.what() );
            continue;
        }
        catch ( const EngineLimitError& e )
        {
            ++engine_errors;
            notes.push_back( entry.label + ": " + e.what() );
            continue;
        }
        auto t1 = Clock::now();
        partition_secs += std::chrono::duration<double>( t1 - t0 ).count();

        AuditOptions sound_only;
        sound_only.certificates = false;
        AuditReport sound = verify_partition( entry.spec, r, solver, sound_only );
        sound_checks += sound.count( AuditKind::Soundness ) + sound.count( AuditKind::Coverage );
        sound_failures += sound.failures( AuditKind::Soundness ) + sound.failures( AuditKind::Coverage );
        auto t2 = Clock::now();
        soundness_secs += std::chrono::duration<double>( t2 - t1 ).count();

        AuditOptions minimal;
        minimal.certificates = false;
        minimal.minimality = true;
        minimal.max_minimality_block = 4;
        PartitionResult multi;
        for ( const auto& b : r.blocks )
            if ( b.vars.size() >= 2 )
                multi.blocks.push_back( b );
        AuditReport mins = verify_partition( entry.spec, multi, solver, minimal );
        min_checks += mins.count( AuditKind::Minimality );
        min_failures += mins.failures( AuditKind::Minimality );
        skipped += mins.skipped_blocks;
        for ( const auto& c : mins.checks )
            if ( c.kind == AuditKind::Minimality && !c.passed )
                notes.push_back( entry.label + ": subset not dependent" );
        minimality_secs += std::chrono::duration<double>( Clock::now() - t2 ).count();
    }

    for ( const auto& n : notes )
        std::printf( "     note: %s\n", n.c_str() );

    auto now = Clock::now();
    auto at = [ & ]( double secs ) {
        return now - std::chrono::duration_cast<Clock::duration>( std::chrono::duration<double>( secs ) );
    };
    std::ostringstream d4;
    d4 << corpus.size() << " specs, " << sound_checks << " soundness/coverage checks, " << sound_failures
       << " failures, " << engine_errors << " engine errors";
    report( "4", sound_failures == 0 && engine_errors == 0 && invariant_faults == 0, d4.str(),
            at( partition_secs + soundness_secs ) );

    std::ostringstream d5;
    d5 << min_checks << " proper-subset checks on blocks of size 2..4, " << min_failures << " failures, " << skipped
       << " larger blocks; " << minimality_secs << "s of 120s budget";
    report( "5", min_failures == 0 && minimality_secs <= 120.0 && engine_errors == 0, d5.str(), at( minimality_secs ) );

    std::ostringstream d6;
    d6 << disagreement_checks << " dependence-query models checked for a disagreeing variable, " << invariant_faults
       << " empty";
    report( "6", invariant_faults == 0 && engine_errors == 0, d6.str(), now );
}

void criterion_7()
{
    auto start = Clock::now();
    std::mt19937 rng( 77 );
    const VarList names{ "a", "b", "c" };
    std::size_t sat = 0, unsat = 0, disagreements = 0, unsound = 0;
    for ( int i = 0; i < 500; ++i )
    {
        Formula f = random_formula( rng, names, 6 );
        SatResult engine = ltl_sat( f );
        SatResult brute = bounded_sat_upto( f, 3, 3 );
        if ( brute.is_sat() && !engine.is_sat() )
        {
            ++disagreements;
            std::printf( "     note: brute-force model for %s missed by the engine\n", print_formula( f ).c_str() );
        }
        if ( brute.is_sat() && !eval( *brute.witness, f ) )
            ++unsound;
        if ( engine.is_sat() )
        {
            ++sat;
            if ( !eval( *engine.witness, f ) )
                ++unsound;
        }
        else
            ++unsat;
    }
    std::ostringstream d;
    d << "500 formulas (" << sat << " sat, " << unsat << " unsat): " << disagreements << " disagreements, " << unsound
      << " unsound witnesses";
    report( "7", disagreements == 0 && unsound == 0, d.str(), start );
}

TraceSet random_set( std::mt19937& rng, const VarList& env, const VarList& sys )
{
    VarList alphabet = env;
    alphabet.insert( alphabet.end(), sys.begin(), sys.end() );
    std::size_t prefix = rng() % 3, loop = 1 + rng() % 2;
    TraceSet out{ env, sys, prefix, loop };
    std::size_t n = rng() % 9;
    for ( std::size_t i = 0; i < n; ++i )
        out.insert( random_trace( rng, alphabet, prefix, loop ) );
    return out;
}

TraceSet join_aligned( const TraceSet& a, const TraceSet& b )
{
    auto [ x, y ] = align( a, b );
    return set_join( x, y );
}

VarList random_subset( std::mt19937& rng, const VarList& vars )
{
    VarList out;
    for ( const auto& v : vars )
        if ( rng() % 2 )
            out.push_back( v );
    return out;
}

void criterion_8()
{
    auto start = Clock::now();
    std::mt19937 rng( 88 );
    const VarList env{ "p" };
    std::size_t violations[ 4 ] = { 0, 0, 0, 0 };
    for ( int i = 0; i < 300; ++i )
    {
        // (a) commutativity, associativity, monotonicity
        TraceSet s1 = random_set( rng, env, { "a", "b" } );
        TraceSet s2 = random_set( rng, env, { "b", "c" } );
        TraceSet s3 = random_set( rng, env, { "a", "c" } );
        bool a_ok = join_aligned( s1, s2 ) == join_aligned( s2, s1 ) &&
                    join_aligned( join_aligned( s1, s2 ), s3 ) == join_aligned( s1, join_aligned( s2, s3 ) );
        TraceSet super = s1;
        for ( int k = 0; k < 3; ++k )
            super.insert( random_trace( rng, { "p", "a", "b" }, s1.prefix_len(), s1.loop_len() ) );
        a_ok = a_ok && is_subset( join_aligned( s1, s2 ), join_aligned( super, s2 ) );
        violations[ 0 ] += !a_ok;

        // (b) idempotency
        TraceSet s = random_set( rng, env, { "a", "b", "c" } );
        VarList w = random_subset( rng, s.sys() );
        bool b_ok = set_join( s, set_project( s, w ) ) == s &&
                    set_join( set_project( s, w ), set_project( s, w ) ) == set_project( s, w );
        violations[ 1 ] += !b_ok;

        // (c) Σ↾(U∪W) ⊆ (Σ↾U) ⋈ (Σ↾W)
        VarList u = random_subset( rng, s.sys() );
        VarList uw = u;
        for ( const auto& v : w )
            if ( !contains( uw, v ) )
                uw.push_back( v );
        violations[ 2 ] += !is_subset( set_project( s, uw ), set_join( set_project( s, u ), set_project( s, w ) ) );

        // (d) (Σ1 ⋈ Σ2)↾(X∪Y) = (Σ1↾X) ⋈ (Σ2↾Y) for disjoint W1, W2
        TraceSet d1 = random_set( rng, env, { "a", "b" } );
        TraceSet d2 = random_set( rng, env, { "c" } );
        auto [ x1, x2 ] = align( d1, d2 );
        VarList xs = random_subset( rng, x1.sys() ), ys = random_subset( rng, x2.sys() );
        VarList xy = xs;
        xy.insert( xy.end(), ys.begin(), ys.end() );
        violations[ 3 ] += !( set_project( set_join( x1, x2 ), xy ) ==
                              set_join( set_project( x1, xs ), set_project( x2, ys ) ) );
    }
    std::ostringstream d;
    d << "300 instances, violations (a)=" << violations[ 0 ] << " (b)=" << violations[ 1 ] << " (c)=" << violations[ 2 ]
      << " (d)=" << violations[ 3 ];
    report( "8", violations[ 0 ] + violations[ 1 ] + violations[ 2 ] + violations[ 3 ] == 0, d.str(), start );
}

} // namespace

int main()
{
    try
    {
        criterion_1_and_9();
        criterion_2();
        criterion_3();
        criteria_4_5_6( build_corpus() );
        criterion_7();
        criterion_8();
    }
    catch ( const std::exception& e )
    {
        std::printf( "FAIL     aborted: %s\n", e.what() );
        return 2;
    }
    std::printf( "%s: %d criterion line(s) failed\n", failures ? "FAILED" : "OK", failures );
    return failures ? 1 : 0;
}
