#include <ltldec/ltldec.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace
{

using json = nlohmann::ordered_json;
using namespace ltldec;

enum Exit : int
{
    Ok = 0,
    InputError = 1,
    EngineFailure = 2,
    AuditFailure = 3
};

struct RunConfig
{
    std::string input;
    std::string format = "text";
    std::string order = "decl";
    std::string engine = "internal";
    std::size_t state_cap = EngineOptions{}.state_cap;
    bool verify = false;
    bool audit_minimality = false;
    bool log_queries = false;
    bool quiet = false;
};

std::unique_ptr<Solver> make_solver( const std::string& engine, std::size_t state_cap )
{
    if ( engine == "internal" )
        return std::make_unique<InternalSolver>( EngineOptions{ state_cap } );
    const std::string prefix = "external:";
    if ( engine.rfind( prefix, 0 ) == 0 )
        return std::make_unique<ExternalSolver>( engine.substr( prefix.size() ) );
    throw std::invalid_argument( "unknown engine '" + engine + "' (expected internal or external:<command>)" );
}

json to_json( const VarList& vars ) { return json( vars ); }

const char* kind_name( AuditKind kind )
{
    switch ( kind )
    {
    case AuditKind::Coverage: return "coverage";
    case AuditKind::Certificate: return "certificates";
    case AuditKind::Soundness: return "soundness";
    case AuditKind::Minimality: return "minimality";
    }
    return "?";
}

json audit_json( const AuditReport& report, const VarList& order )
{
    json out = json::object();
    for ( AuditKind kind : { AuditKind::Coverage, AuditKind::Certificate, AuditKind::Soundness, AuditKind::Minimality } )
    {
        if ( report.count( kind ) == 0 )
            continue;
        json failures = json::array();
        for ( const auto& c : report.checks )
            if ( c.kind == kind && !c.passed )
            {
                json f = { { "vars", to_json( c.vars ) } };
                if ( c.witness )
                    f[ "witness" ] = serialize_trace( *c.witness, order );
                if ( !c.error.empty() )
                    f[ "error" ] = c.error;
                failures.push_back( std::move( f ) );
            }
        out[ kind_name( kind ) ] = { { "checked", report.count( kind ) },
                                     { "failed", report.failures( kind ) },
                                     { "failures", std::move( failures ) } };
    }
    out[ "skipped_blocks" ] = report.skipped_blocks;
    out[ "passed" ] = report.passed();
    return out;
}

void write_evidence( const std::string& path, const std::vector<QueryRecord>& log )
{
    std::ofstream out( path );
    if ( !out )
        throw std::runtime_error( "cannot write evidence file '" + path + "'" );
    for ( const auto& q : log )
        out << json{ { "query", q.formula },
                     { "verdict", q.sat ? "sat" : "unsat" },
                     { "witness", q.sat ? json( q.witness ) : json( nullptr ) },
                     { "millis", q.millis } }
                        .dump()
            << '\n';
}

std::string join( const VarList& vars, const char* sep )
{
    std::string out;
    for ( std::size_t i = 0; i < vars.size(); ++i )
        out += ( i ? sep : "" ) + vars[ i ];
    return out;
}

int run_decompose( const RunConfig& cfg )
{
    std::ifstream in( cfg.input );
    if ( !in )
    {
        std::cerr << "ltldec: cannot read '" << cfg.input << "'\n";
        return InputError;
    }
    std::string text( ( std::istreambuf_iterator<char>( in ) ), std::istreambuf_iterator<char>() );

    Spec spec;
    std::unique_ptr<Solver> solver;
    try
    {
        spec = parse_spec( text );
        solver = make_solver( cfg.engine, cfg.state_cap );
    }
    catch ( const ParseError& e )
    {
        std::cerr << cfg.input << ":" << e.what() << '\n';
        return InputError;
    }
    catch ( const std::invalid_argument& e )
    {
        std::cerr << "ltldec: " << e.what() << '\n';
        return InputError;
    }

    const VarList declared = declared_order( spec );
    const std::string evidence_path = cfg.input + ".evidence.jsonl";
    Decomposer decomposer{ *solver, spec.formula, declared };
    auto flush_evidence = [ & ] {
        if ( cfg.log_queries )
            write_evidence( evidence_path, decomposer.result().query_log );
    };

    PartitionResult result;
    try
    {
        result = decomposer.partition( apply_order( spec.sys, cfg.order == "lex" ? OrderPolicy::Lexicographic
                                                                                 : OrderPolicy::Declaration ) );
    }
    catch ( const EngineLimitError& e )
    {
        flush_evidence();
        std::cerr << "ltldec: engine limit: " << e.what() << '\n';
        return EngineFailure;
    }
    catch ( const SolverError& e )
    {
        flush_evidence();
        std::cerr << "ltldec: solver failure: " << e.what() << '\n';
        return EngineFailure;
    }
    catch ( const InvariantViolation& e )
    {
        flush_evidence();
        std::cerr << "ltldec: internal invariant violated: " << e.what() << '\n';
        return AuditFailure;
    }
    flush_evidence();

    std::optional<AuditReport> report;
    if ( cfg.verify || cfg.audit_minimality )
    {
        AuditOptions options;
        options.minimality = cfg.audit_minimality;
        try
        {
            report = verify_partition( spec, result, *solver, options );
        }
        catch ( const InvariantViolation& e )
        {
            std::cerr << "ltldec: internal invariant violated during audit: " << e.what() << '\n';
            return AuditFailure;
        }
    }

    const auto blocks = canonical_blocks( spec, result );
    if ( !cfg.quiet )
    {
        if ( cfg.format == "json" )
        {
            json out = { { "env", to_json( spec.env ) }, { "sys", to_json( spec.sys ) } };
            json jb = json::array();
            for ( const auto& b : blocks )
                jb.push_back( to_json( b ) );
            out[ "blocks" ] = std::move( jb );
            out[ "queries" ] = result.query_log.size();
            out[ "audits" ] = report ? audit_json( *report, declared ) : json::object();
            if ( cfg.log_queries )
                out[ "evidence_path" ] = evidence_path;
            std::cout << out.dump( 2 ) << '\n';
        }
        else
        {
            std::cout << "env: " << join( spec.env, " " ) << "\nsys: " << join( spec.sys, " " ) << "\nblocks:\n";
            for ( const auto& b : blocks )
                std::cout << "  {" << join( b, ", " ) << "}\n";
            std::cout << "queries: " << result.query_log.size() << '\n';
            if ( report )
            {
                for ( AuditKind kind :
                      { AuditKind::Coverage, AuditKind::Certificate, AuditKind::Soundness, AuditKind::Minimality } )
                    if ( report->count( kind ) )
                        std::cout << "audit " << kind_name( kind ) << ": "
                                  << report->count( kind ) - report->failures( kind ) << "/" << report->count( kind )
                                  << " passed\n";
                if ( report->skipped_blocks )
                    std::cout << "audit minimality: " << report->skipped_blocks << " block(s) too large, skipped\n";
            }
            if ( cfg.log_queries )
                std::cout << "evidence: " << evidence_path << '\n';
        }
    }

    if ( report && !report->passed() )
    {
        for ( const auto& c : report->checks )
            if ( !c.passed )
                std::cerr << "ltldec: " << kind_name( c.kind ) << " audit failed for {" << join( c.vars, ", " ) << "}"
                          << ( c.error.empty() ? "" : ": " + c.error ) << '\n';
        return AuditFailure;
    }
    return Ok;
}

// One query on stdin, answer on stdout in the external solver protocol.
int run_solve( std::size_t state_cap )
{
    std::string text( ( std::istreambuf_iterator<char>( std::cin ) ), std::istreambuf_iterator<char>() );
    try
    {
        std::cout << format_solver_response( ltl_sat( parse_formula( text ), EngineOptions{ state_cap } ) );
        return Ok;
    }
    catch ( const ParseError& e )
    {
        std::cerr << "ltldec solve: " << e.what() << '\n';
        return InputError;
    }
    catch ( const EngineLimitError& e )
    {
        std::cerr << "ltldec solve: engine limit: " << e.what() << '\n';
        return EngineFailure;
    }
}

} // namespace

int main( int argc, char** argv )
{
    RunConfig cfg;
    CLI::App app{ "Decompose an LTL specification into minimal independent blocks of system variables" };
    app.require_subcommand( 0, 1 );
    app.add_option( "input", cfg.input, "Specification file (env:, sys:, formula: sections)" );
    app.add_option( "--format", cfg.format, "Output format" )->check( CLI::IsMember( { "text", "json" } ) );
    app.add_option( "--order", cfg.order, "Variable choice order: declaration or lexicographic" )
            ->check( CLI::IsMember( { "decl", "lex" } ) );
    app.add_option( "--engine", cfg.engine, "internal or external:<shell command>" );
    app.add_option( "--state-cap", cfg.state_cap, "Maximum automaton states per query" )->check( CLI::PositiveNumber );
    app.add_flag( "--verify", cfg.verify, "Re-check every block certificate and soundness query" );
    app.add_flag( "--audit-minimality", cfg.audit_minimality, "Check every proper subset of each block (size <= 6)" );
    app.add_flag( "--log-queries", cfg.log_queries, "Write <input>.evidence.jsonl with every solver query" );
    app.add_flag( "-q,--quiet", cfg.quiet, "Print nothing on success" );

    std::size_t solve_cap = EngineOptions{}.state_cap;
    auto* solve = app.add_subcommand( "solve", "Answer one LTL query from stdin with UNSAT or SAT and a lasso" );
    solve->add_option( "--state-cap", solve_cap, "Maximum automaton states" )->check( CLI::PositiveNumber );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        int code = app.exit( e );
        return code == 0 ? Ok : InputError;
    }

    if ( solve->parsed() )
        return run_solve( solve_cap );
    if ( cfg.input.empty() )
    {
        std::cerr << "ltldec: missing input file\n" << app.help();
        return InputError;
    }
    try
    {
        return run_decompose( cfg );
    }
    catch ( const std::exception& e )
    {
        std::cerr << "ltldec: " << e.what() << '\n';
        return InputError;
    }
}
