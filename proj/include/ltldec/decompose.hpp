#pragma once

#include "errors.hpp"
#include "formula.hpp"
#include "projection.hpp"
#include "solver.hpp"
#include "spec.hpp"
#include "trace.hpp"

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltldec
{

/// How "choose a variable" is resolved, both for the next block seed and for
/// the next variable to lock among the disagreeing ones.
enum class OrderPolicy
{
    Declaration,
    Lexicographic
};

[[nodiscard]] inline VarList apply_order( VarList vars, OrderPolicy policy )
{
    if ( policy == OrderPolicy::Lexicographic )
        std::sort( vars.begin(), vars.end() );
    return vars;
}

/// One solver call, kept verbatim so a third party can replay it.
struct QueryRecord
{
    std::string formula;
    bool sat = false;
    std::string witness; // serialized lasso, empty when unsat
    double millis = 0.0;
};

/// A block of the partition together with the Unsat query that closed it.
struct Block
{
    VarList vars;
    Formula certificate;
};

struct PartitionResult
{
    std::vector<Block> blocks;
    std::vector<QueryRecord> query_log;
    /// Number of models whose disagreement set was checked to be non-empty.
    std::size_t disagreement_checks = 0;
};

namespace detail
{
inline VarList without( const VarList& vars, const VarList& removed )
{
    VarList out;
    for ( const auto& v : vars )
        if ( !contains( removed, v ) )
            out.push_back( v );
    return out;
}

inline void sort_by( VarList& vars, const VarList& order )
{
    std::map<std::string, std::size_t> rank;
    for ( std::size_t i = 0; i < order.size(); ++i )
        rank.emplace( order[ i ], i );
    std::sort( vars.begin(), vars.end(),
               [ & ]( const std::string& a, const std::string& b ) { return rank.at( a ) < rank.at( b ); } );
}
} // namespace detail

/// Runs the decomposition for one formula against one solver and records
/// every query it makes.
class Decomposer
{
    Solver& _solver;
    Formula _phi;
    VarList _declared; // serialization order for witnesses and block members
    PartitionResult _result;

    SatResult ask( const Formula& query )
    {
        auto start = std::chrono::steady_clock::now();
        SatResult r = _solver.solve( query );
        auto stop = std::chrono::steady_clock::now();
        _result.query_log.push_back(
                { print_formula( query ), r.is_sat(), r.is_sat() ? serialize_trace( *r.witness, _declared ) : "",
                  std::chrono::duration<double, std::milli>( stop - start ).count() } );
        return r;
    }

    // Variables of `candidates` on which the model's primed and unprimed
    // copies disagree. A model of a dependence query always has one.
    VarList disagreement( const SatResult& model, const VarList& candidates )
    {
        VarList z = compute_z( *model.witness, candidates );
        ++_result.disagreement_checks;
        if ( z.empty() )
            throw InvariantViolation( "model " + serialize_trace( *model.witness, _declared ) +
                                      " of a dependence query has no disagreeing variable" );
        return z;
    }

public:
    /// `declared` lists every variable in declaration order (env then sys).
    Decomposer( Solver& solver, Formula phi, VarList declared )
            : _solver{ solver }, _phi{ std::move( phi ) }, _declared{ std::move( declared ) }
    {
    }

    /// Grows the dependent set `w` until it is independent. `query` must be
    /// the last Sat query, `z` its disagreement set over `y`; `w` must be
    /// dependent with no non-empty proper independent subset.
    ///
    /// Locks variables of `z` one at a time (G(z <-> z')) until the query
    /// becomes Unsat; the last locked variable is the one `w` depends on and
    /// moves from `y` to `w`. Then the dependence query is rebuilt from
    /// scratch for the larger `w` and the process repeats while it is Sat.
    Block look_for_dependent_variables( Formula query, VarList z, VarList w, VarList y )
    {
        while ( true )
        {
            if ( z.empty() )
                throw InvariantViolation( "look_for_dependent_variables called with an empty disagreement set" );
            std::string chosen;
            while ( true )
            {
                chosen = z.front();
                query = lock_conjunct( query, chosen );
                SatResult r = ask( query );
                if ( !r.is_sat() )
                    break;
                z = disagreement( r, y );
            }
            w.push_back( chosen );
            y = detail::without( y, { chosen } );
            query = dependence_query( _phi, w, y );
            SatResult r = ask( query );
            if ( !r.is_sat() )
            {
                detail::sort_by( w, _declared );
                return Block{ std::move( w ), std::move( query ) };
            }
            z = disagreement( r, y );
        }
    }

    /// Splits `sys` (already in choice order) into minimal independent blocks.
    PartitionResult partition( const VarList& sys )
    {
        VarList rest = sys;
        while ( !rest.empty() )
        {
            if ( rest.size() == 1 )
            {
                // A lone variable is trivially independent; no solver call.
                _result.blocks.push_back( Block{ rest, dependence_query( _phi, rest, {} ) } );
                break;
            }
            VarList seed{ rest.front() };
            VarList others( rest.begin() + 1, rest.end() );
            Formula query = dependence_query( _phi, seed, others );
            SatResult r = ask( query );
            Block block = r.is_sat() ? look_for_dependent_variables( query, disagreement( r, others ), seed, others )
                                     : Block{ seed, query };
            rest = detail::without( rest, block.vars );
            _result.blocks.push_back( std::move( block ) );
        }

        std::multiset<std::string> covered, expected( sys.begin(), sys.end() );
        for ( const auto& b : _result.blocks )
            covered.insert( b.vars.begin(), b.vars.end() );
        if ( covered != expected )
            throw InvariantViolation( "partition blocks do not cover the system variables exactly once" );
        return _result;
    }

    [[nodiscard]] const PartitionResult& result() const { return _result; }
};

/// Declaration order of every variable of `spec`, environment first.
[[nodiscard]] inline VarList declared_order( const Spec& spec )
{
    VarList all = spec.env;
    all.insert( all.end(), spec.sys.begin(), spec.sys.end() );
    return all;
}

/// Partitions the system variables of `spec` into independent blocks, none
/// of which has a non-empty proper independent subset.
[[nodiscard]] inline PartitionResult partition( const Spec& spec, Solver& solver,
                                                OrderPolicy order = OrderPolicy::Declaration )
{
    Decomposer d{ solver, spec.formula, declared_order( spec ) };
    return d.partition( apply_order( spec.sys, order ) );
}

struct IndependenceVerdict
{
    bool independent = true;
    /// Model of the dependence query when dependent.
    std::optional<LassoTrace> counterexample;
};

/// W ⊆ S is independent in φ iff (φ'_W ∧ φ'_{S\W} ∧ ¬φ) is unsatisfiable.
[[nodiscard]] inline IndependenceVerdict check_independent( Solver& solver, const Formula& phi, const VarList& w,
                                                            const VarList& s )
{
    for ( const auto& v : w )
        if ( !contains( s, v ) )
            throw std::invalid_argument( "check_independent: '" + v + "' is not a system variable" );
    SatResult r = solver.solve( dependence_query( phi, w, detail::without( s, w ) ) );
    return { !r.is_sat(), r.witness };
}

enum class AuditKind
{
    Coverage,    // blocks are disjoint and cover S
    Certificate, // recorded closing query re-solves to Unsat
    Soundness,   // block is independent with respect to all of S
    Minimality   // every non-empty proper subset is dependent
};

struct AuditCheck
{
    AuditKind kind;
    VarList vars;
    bool passed = false;
    std::optional<LassoTrace> witness;
    std::string error; // engine or solver failure, if any
};

struct AuditOptions
{
    bool certificates = true;
    bool minimality = false;
    /// Blocks larger than this are not subset-audited (2^n queries each).
    std::size_t max_minimality_block = 6;
};

struct AuditReport
{
    std::vector<AuditCheck> checks;
    std::size_t skipped_blocks = 0;

    [[nodiscard]] bool passed() const
    {
        return std::all_of( checks.begin(), checks.end(), []( const AuditCheck& c ) { return c.passed; } );
    }

    [[nodiscard]] std::size_t count( AuditKind kind ) const
    {
        return static_cast<std::size_t>( std::count_if( checks.begin(), checks.end(),
                                                         [ & ]( const AuditCheck& c ) { return c.kind == kind; } ) );
    }

    [[nodiscard]] std::size_t failures( AuditKind kind ) const
    {
        return static_cast<std::size_t>( std::count_if( checks.begin(), checks.end(), [ & ]( const AuditCheck& c ) {
            return c.kind == kind && !c.passed;
        } ) );
    }
};

/// Re-checks a partition independently of how it was computed. Solver
/// failures are recorded on the affected check and do not stop the audit.
[[nodiscard]] inline AuditReport verify_partition( const Spec& spec, const PartitionResult& result, Solver& solver,
                                                   const AuditOptions& options = {} )
{
    AuditReport report;

    {
        std::multiset<std::string> covered, expected( spec.sys.begin(), spec.sys.end() );
        VarList all;
        for ( const auto& b : result.blocks )
        {
            covered.insert( b.vars.begin(), b.vars.end() );
            all.insert( all.end(), b.vars.begin(), b.vars.end() );
        }
        report.checks.push_back( { AuditKind::Coverage, all, covered == expected, std::nullopt, {} } );
    }

    auto run = [ & ]( AuditKind kind, const VarList& vars, const Formula& query, bool expect_sat ) {
        AuditCheck check{ kind, vars, false, std::nullopt, {} };
        try
        {
            SatResult r = solver.solve( query );
            check.passed = r.is_sat() == expect_sat;
            check.witness = r.witness;
        }
        catch ( const EngineLimitError& e )
        {
            check.error = e.what();
        }
        catch ( const SolverError& e )
        {
            check.error = e.what();
        }
        report.checks.push_back( std::move( check ) );
    };

    for ( const auto& block : result.blocks )
    {
        if ( options.certificates )
            run( AuditKind::Certificate, block.vars, block.certificate, false );
        run( AuditKind::Soundness, block.vars,
             dependence_query( spec.formula, block.vars, detail::without( spec.sys, block.vars ) ), false );

        if ( !options.minimality || block.vars.size() < 2 )
            continue;
        if ( block.vars.size() > options.max_minimality_block )
        {
            ++report.skipped_blocks;
            continue;
        }
        const std::size_t n = block.vars.size();
        for ( std::size_t mask = 1; mask + 1 < ( std::size_t{ 1 } << n ); ++mask )
        {
            VarList subset;
            for ( std::size_t i = 0; i < n; ++i )
                if ( mask & ( std::size_t{ 1 } << i ) )
                    subset.push_back( block.vars[ i ] );
            run( AuditKind::Minimality, subset,
                 dependence_query( spec.formula, subset, detail::without( spec.sys, subset ) ), true );
        }
    }
    return report;
}

/// Blocks sorted by their first member's declaration index, members by
/// declaration index.
[[nodiscard]] inline std::vector<VarList> canonical_blocks( const Spec& spec, const PartitionResult& result )
{
    std::vector<VarList> blocks;
    for ( const auto& b : result.blocks )
    {
        VarList vars = b.vars;
        detail::sort_by( vars, spec.sys );
        blocks.push_back( std::move( vars ) );
    }
    std::map<std::string, std::size_t> rank;
    for ( std::size_t i = 0; i < spec.sys.size(); ++i )
        rank.emplace( spec.sys[ i ], i );
    std::sort( blocks.begin(), blocks.end(),
               [ & ]( const VarList& a, const VarList& b ) { return rank.at( a.front() ) < rank.at( b.front() ); } );
    return blocks;
}

} // namespace ltldec
