#pragma once

#include "errors.hpp"
#include "solver.hpp"
#include "trace.hpp"

#include <cerrno>
#include <cstring>
#include <string>
#include <string_view>

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace ltldec
{

namespace detail
{

struct FdGuard
{
    int fd = -1;
    ~FdGuard() { reset(); }
    void reset()
    {
        if ( fd >= 0 )
            ::close( fd );
        fd = -1;
    }
};

// Runs `sh -c command`, feeds `input` on stdin and collects stdout.
// Stdin is a socket so that a child that never reads cannot kill us with
// SIGPIPE (we write with MSG_NOSIGNAL).
inline std::string run_child( const std::string& command, std::string_view input, int& status )
{
    int in_pair[ 2 ], out_pipe[ 2 ];
    if ( ::socketpair( AF_UNIX, SOCK_STREAM, 0, in_pair ) != 0 )
        throw SolverError( std::string( "socketpair: " ) + std::strerror( errno ) );
    FdGuard in_parent{ in_pair[ 0 ] }, in_child{ in_pair[ 1 ] };
    if ( ::pipe( out_pipe ) != 0 )
        throw SolverError( std::string( "pipe: " ) + std::strerror( errno ) );
    FdGuard out_parent{ out_pipe[ 0 ] }, out_child{ out_pipe[ 1 ] };

    pid_t pid = ::fork();
    if ( pid < 0 )
        throw SolverError( std::string( "fork: " ) + std::strerror( errno ) );
    if ( pid == 0 )
    {
        ::dup2( in_child.fd, STDIN_FILENO );
        ::dup2( out_child.fd, STDOUT_FILENO );
        ::close( in_parent.fd );
        ::close( out_parent.fd );
        ::close( in_child.fd );
        ::close( out_child.fd );
        ::execl( "/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>( nullptr ) );
        ::_exit( 127 );
    }
    in_child.reset();
    out_child.reset();

    std::size_t sent = 0;
    while ( sent < input.size() )
    {
        auto n = ::send( in_parent.fd, input.data() + sent, input.size() - sent, MSG_NOSIGNAL );
        if ( n < 0 )
        {
            if ( errno == EINTR )
                continue;
            break; // child closed its stdin; its answer decides
        }
        sent += static_cast<std::size_t>( n );
    }
    ::shutdown( in_parent.fd, SHUT_WR );

    std::string output;
    char buffer[ 4096 ];
    while ( true )
    {
        auto n = ::read( out_parent.fd, buffer, sizeof buffer );
        if ( n < 0 && errno == EINTR )
            continue;
        if ( n <= 0 )
            break;
        output.append( buffer, static_cast<std::size_t>( n ) );
    }
    while ( ::waitpid( pid, &status, 0 ) < 0 && errno == EINTR )
    {
    }
    return output;
}

inline std::string_view next_line( std::string_view& text )
{
    auto end = text.find( '\n' );
    std::string_view line = text.substr( 0, end );
    text = end == std::string_view::npos ? std::string_view{} : text.substr( end + 1 );
    if ( !line.empty() && line.back() == '\r' )
        line.remove_suffix( 1 );
    return line;
}

} // namespace detail

/// Parses a solver response: `UNSAT` or `SAT` followed by one trace line.
[[nodiscard]] inline SatResult parse_solver_response( std::string_view output )
{
    std::string_view first = detail::next_line( output );
    if ( first == "UNSAT" )
        return SatResult::unsat();
    if ( first != "SAT" )
        throw SolverError( "malformed solver output: expected SAT or UNSAT, got '" + std::string( first ) + "'" );
    std::string_view trace_line = detail::next_line( output );
    try
    {
        return SatResult::sat( parse_trace( trace_line ) );
    }
    catch ( const std::exception& e )
    {
        throw SolverError( std::string( "malformed solver witness: " ) + e.what() );
    }
}

/// Renders a result in the response format read by `parse_solver_response`.
[[nodiscard]] inline std::string format_solver_response( const SatResult& result, const VarList& order = {} )
{
    if ( !result.is_sat() )
        return "UNSAT\n";
    return "SAT\n" + serialize_trace( *result.witness, order ) + "\n";
}

/// Delegates each query to a child process: the formula is written on the
/// child's stdin (one line) and the answer read from its stdout. Witnesses
/// are checked against the query before they are accepted.
class ExternalSolver final : public Solver
{
    std::string _command;

public:
    explicit ExternalSolver( std::string command ) : _command{ std::move( command ) }
    {
        if ( _command.empty() )
            throw std::invalid_argument( "external solver command must not be empty" );
    }

    SatResult solve( const Formula& f ) override
    {
        int status = 0;
        std::string output = detail::run_child( _command, print_formula( f ) + "\n", status );
        if ( !WIFEXITED( status ) || WEXITSTATUS( status ) != 0 )
            throw SolverError( "external solver '" + _command + "' failed (status " + std::to_string( status ) + ")" );
        SatResult result = parse_solver_response( output );
        if ( result.is_sat() && !eval( *result.witness, f, 0 ) )
            throw SolverError( "external solver witness " + serialize_trace( *result.witness ) +
                               " does not satisfy the query" );
        return result;
    }

    [[nodiscard]] std::string name() const override { return "external:" + _command; }
};

} // namespace ltldec
