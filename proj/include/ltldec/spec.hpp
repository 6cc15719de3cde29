#pragma once

#include "errors.hpp"
#include "formula.hpp"
#include "parser.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ltldec
{

/// Ordered list of variable names; order is declaration order unless stated.
using VarList = std::vector<std::string>;

[[nodiscard]] inline bool contains( const VarList& vars, std::string_view name )
{
    return std::find( vars.begin(), vars.end(), name ) != vars.end();
}

/// A reactive specification: environment variables E, system variables S
/// (disjoint) and one LTL formula over E ∪ S.
struct Spec
{
    VarList env;
    VarList sys;
    Formula formula;
};

namespace detail
{

struct SpecLine
{
    std::size_t number;
    std::size_t offset; // of the first character of the line
    std::string_view text;
};

inline std::string_view strip_comment( std::string_view line )
{
    auto hash = line.find( '#' );
    return hash == std::string_view::npos ? line : line.substr( 0, hash );
}

inline std::string_view trim( std::string_view s )
{
    while ( !s.empty() && std::isspace( static_cast<unsigned char>( s.front() ) ) )
        s.remove_prefix( 1 );
    while ( !s.empty() && std::isspace( static_cast<unsigned char>( s.back() ) ) )
        s.remove_suffix( 1 );
    return s;
}

// Splits the names after "env:" / "sys:" and validates each one.
inline VarList parse_declaration( const SpecLine& line, std::size_t names_at, std::set<std::string>& seen_in_list )
{
    VarList names;
    std::string_view body = strip_comment( line.text );
    std::size_t i = names_at;
    while ( i < body.size() )
    {
        while ( i < body.size() && std::isspace( static_cast<unsigned char>( body[ i ] ) ) )
            ++i;
        if ( i >= body.size() )
            break;
        std::size_t begin = i;
        while ( i < body.size() && !std::isspace( static_cast<unsigned char>( body[ i ] ) ) )
            ++i;
        std::string name( body.substr( begin, i - begin ) );
        std::size_t column = begin + 1;
        if ( name.find( '\'' ) != std::string::npos )
            throw ParseError( ParseErrorKind::Syntax, line.number, column,
                              "apostrophe is not allowed in variable names ('" + name + "')" );
        if ( is_reserved_word( name ) )
            throw ParseError( ParseErrorKind::ReservedName, line.number, column,
                              "reserved word '" + name + "' used as a variable name" );
        if ( !is_identifier( name ) )
            throw ParseError( ParseErrorKind::Syntax, line.number, column, "invalid variable name '" + name + "'" );
        if ( !seen_in_list.insert( name ).second )
            throw ParseError( ParseErrorKind::DuplicateDeclaration, line.number, column,
                              "variable '" + name + "' declared twice" );
        names.push_back( std::move( name ) );
    }
    return names;
}

} // namespace detail

/// Reads the line-oriented specification format:
///
///     env: p q          # environment variables (may be empty)
///     sys: a b          # system variables
///     formula: G (p -> a) & F b
///
/// The formula runs from "formula:" to the end of the document and may span
/// several lines. `#` comments are allowed everywhere.
[[nodiscard]] inline Spec parse_spec( std::string_view text )
{
    std::vector<detail::SpecLine> lines;
    {
        std::size_t offset = 0, number = 1;
        while ( offset <= text.size() )
        {
            auto end = text.find( '\n', offset );
            if ( end == std::string_view::npos )
                end = text.size();
            lines.push_back( { number++, offset, text.substr( offset, end - offset ) } );
            offset = end + 1;
        }
    }

    std::optional<VarList> env, sys;
    std::size_t env_line = 0;
    std::set<std::string> env_seen, sys_seen;
    std::optional<Spec> spec;

    for ( const auto& line : lines )
    {
        std::string_view content = detail::trim( detail::strip_comment( line.text ) );
        if ( content.empty() )
            continue;
        std::size_t indent = detail::strip_comment( line.text ).find_first_not_of( " \t\r" );

        auto header = [ & ]( std::string_view key ) { return content.substr( 0, key.size() ) == key; };
        if ( header( "env:" ) )
        {
            if ( env )
                throw ParseError( ParseErrorKind::Syntax, line.number, indent + 1, "duplicate 'env:' line" );
            env = detail::parse_declaration( line, indent + 4, env_seen );
            env_line = line.number;
        }
        else if ( header( "sys:" ) )
        {
            if ( sys )
                throw ParseError( ParseErrorKind::Syntax, line.number, indent + 1, "duplicate 'sys:' line" );
            sys = detail::parse_declaration( line, indent + 4, sys_seen );
            for ( const auto& name : *sys )
                if ( env_seen.count( name ) )
                {
                    auto col = std::string_view( line.text ).find( name, indent + 4 );
                    throw ParseError( ParseErrorKind::EnvSysOverlap, line.number, col + 1,
                                      "variable '" + name + "' is declared both in env (line " +
                                              std::to_string( env_line ) + ") and in sys" );
                }
        }
        else if ( header( "formula:" ) )
        {
            if ( !env )
                throw ParseError( ParseErrorKind::Syntax, line.number, indent + 1, "missing 'env:' line before formula" );
            if ( !sys )
                throw ParseError( ParseErrorKind::Syntax, line.number, indent + 1, "missing 'sys:' line before formula" );

            std::size_t start = line.offset + indent + 8;
            FormulaParseOptions options;
            options.allow_primes = false;
            options.first_line = line.number;
            options.first_column = indent + 9;
            detail::AtomHook check = [ & ]( const AtomId& id, std::size_t l, std::size_t c ) {
                if ( !env_seen.count( id.base ) && !sys_seen.count( id.base ) )
                    throw ParseError( ParseErrorKind::UndeclaredAtom, l, c,
                                      "undeclared variable '" + id.base + "'" );
            };
            spec = Spec{ *env, *sys, parse_formula( text.substr( start ), options, check ) };
            break;
        }
        else
        {
            throw ParseError( ParseErrorKind::Syntax, line.number, indent + 1,
                              "expected 'env:', 'sys:' or 'formula:'" );
        }
    }

    if ( !spec )
        throw ParseError( ParseErrorKind::Syntax, lines.back().number, 1, "missing 'formula:' section" );

    for ( const auto& name : spec->env )
        if ( sys_seen.count( name ) )
            throw ParseError( ParseErrorKind::EnvSysOverlap, env_line, 1,
                              "variable '" + name + "' is declared both in env and in sys" );
    return *spec;
}

/// Renders a spec in the format accepted by `parse_spec`.
[[nodiscard]] inline std::string print_spec( const Spec& spec )
{
    std::ostringstream out;
    out << "env:";
    for ( const auto& v : spec.env )
        out << ' ' << v;
    out << "\nsys:";
    for ( const auto& v : spec.sys )
        out << ' ' << v;
    out << "\nformula: " << print_formula( spec.formula ) << '\n';
    return out.str();
}

} // namespace ltldec
