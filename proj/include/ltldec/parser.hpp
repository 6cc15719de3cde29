#pragma once

#include "errors.hpp"
#include "formula.hpp"

#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace ltldec
{

/// Words that cannot be used as variable names.
[[nodiscard]] inline bool is_reserved_word( std::string_view word )
{
    return word == "G" || word == "F" || word == "X" || word == "U" || word == "R" || word == "true" ||
           word == "false";
}

/// Letters, digits and underscores, not starting with a digit.
[[nodiscard]] inline bool is_identifier( std::string_view word )
{
    if ( word.empty() || std::isdigit( static_cast<unsigned char>( word.front() ) ) )
        return false;
    for ( char c : word )
        if ( !std::isalnum( static_cast<unsigned char>( c ) ) && c != '_' )
            return false;
    return true;
}

namespace detail
{

enum class Tok
{
    End,
    Ident,
    True,
    False,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Always,
    Eventually,
    Next,
    Until,
    Release
};

struct Token
{
    Tok kind;
    std::string text;
    bool primed = false;
    std::size_t line = 1;
    std::size_t column = 1;
};

// Tokenizer over a window of a larger document; positions are reported in
// document coordinates. `#` starts a comment running to the end of the line.
class Lexer
{
    std::string_view _text;
    std::size_t _pos;
    std::size_t _line;
    std::size_t _column;
    bool _allow_primes;

    void advance()
    {
        if ( _text[ _pos ] == '\n' )
        {
            ++_line;
            _column = 1;
        }
        else
            ++_column;
        ++_pos;
    }

    void skip_blank()
    {
        while ( _pos < _text.size() )
        {
            char c = _text[ _pos ];
            if ( c == '#' )
                while ( _pos < _text.size() && _text[ _pos ] != '\n' )
                    advance();
            else if ( std::isspace( static_cast<unsigned char>( c ) ) )
                advance();
            else
                break;
        }
    }

    [[noreturn]] void fail( const std::string& message ) const
    {
        throw ParseError( ParseErrorKind::Syntax, _line, _column, message );
    }

public:
    Lexer( std::string_view text, std::size_t start, std::size_t line, std::size_t column, bool allow_primes )
            : _text{ text }, _pos{ start }, _line{ line }, _column{ column }, _allow_primes{ allow_primes }
    {
    }

    Token next()
    {
        skip_blank();
        Token tok{ Tok::End, {}, false, _line, _column };
        if ( _pos >= _text.size() )
            return tok;

        char c = _text[ _pos ];
        auto take = [ & ]( Tok kind, std::size_t len ) {
            for ( std::size_t i = 0; i < len; ++i )
                advance();
            tok.kind = kind;
            return tok;
        };
        auto starts_with = [ & ]( std::string_view s ) { return _text.substr( _pos, s.size() ) == s; };

        switch ( c )
        {
        case '(': return take( Tok::LParen, 1 );
        case ')': return take( Tok::RParen, 1 );
        case '!': return take( Tok::Not, 1 );
        case '&': return take( Tok::And, 1 );
        case '|': return take( Tok::Or, 1 );
        case '-':
            if ( starts_with( "->" ) )
                return take( Tok::Implies, 2 );
            break;
        case '<':
            if ( starts_with( "<->" ) )
                return take( Tok::Iff, 3 );
            break;
        default: break;
        }

        if ( std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' )
        {
            std::size_t begin = _pos;
            while ( _pos < _text.size() &&
                    ( std::isalnum( static_cast<unsigned char>( _text[ _pos ] ) ) || _text[ _pos ] == '_' ) )
                advance();
            tok.text = std::string( _text.substr( begin, _pos - begin ) );
            if ( tok.text == "G" )
                tok.kind = Tok::Always;
            else if ( tok.text == "F" )
                tok.kind = Tok::Eventually;
            else if ( tok.text == "X" )
                tok.kind = Tok::Next;
            else if ( tok.text == "U" )
                tok.kind = Tok::Until;
            else if ( tok.text == "R" )
                tok.kind = Tok::Release;
            else if ( tok.text == "true" )
                tok.kind = Tok::True;
            else if ( tok.text == "false" )
                tok.kind = Tok::False;
            else
                tok.kind = Tok::Ident;

            if ( _pos < _text.size() && _text[ _pos ] == '\'' )
            {
                if ( tok.kind != Tok::Ident )
                    fail( "prime applied to reserved word '" + tok.text + "'" );
                if ( !_allow_primes )
                    fail( "apostrophe is not allowed in variable names ('" + tok.text + "'')" );
                advance();
                tok.primed = true;
            }
            return tok;
        }
        if ( std::isdigit( static_cast<unsigned char>( c ) ) )
            fail( "identifiers must not start with a digit" );
        fail( std::string( "unexpected character '" ) + c + "'" );
    }
};

/// Called for each atom occurrence with its source position; may throw.
using AtomHook = std::function<void( const AtomId&, std::size_t line, std::size_t column )>;

// Recursive descent, loosest to tightest: <->, ->, |, &, U/R, unary.
// All binary operators associate to the right.
class FormulaParser
{
    Lexer _lexer;
    Token _tok;
    const AtomHook* _hook;

    void shift() { _tok = _lexer.next(); }

    [[noreturn]] void fail( const std::string& message ) const
    {
        throw ParseError( ParseErrorKind::Syntax, _tok.line, _tok.column, message );
    }

    static std::string describe( const Token& tok )
    {
        switch ( tok.kind )
        {
        case Tok::End: return "end of input";
        case Tok::Ident: return "'" + tok.text + "'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Not: return "'!'";
        case Tok::And: return "'&'";
        case Tok::Or: return "'|'";
        case Tok::Implies: return "'->'";
        case Tok::Iff: return "'<->'";
        default: return "'" + tok.text + "'";
        }
    }

    Formula parse_binary_level( int level )
    {
        static constexpr Tok level_tok[] = { Tok::Iff, Tok::Implies, Tok::Or, Tok::And };
        if ( level == 4 )
            return parse_temporal();
        Formula lhs = parse_binary_level( level + 1 );
        if ( _tok.kind != level_tok[ level ] )
            return lhs;
        shift();
        Formula rhs = parse_binary_level( level );
        switch ( level )
        {
        case 0: return iff( lhs, rhs );
        case 1: return implies( lhs, rhs );
        case 2: return lor( lhs, rhs );
        default: return land( lhs, rhs );
        }
    }

    Formula parse_temporal()
    {
        Formula lhs = parse_unary();
        if ( _tok.kind == Tok::Until )
        {
            shift();
            return until( lhs, parse_temporal() );
        }
        if ( _tok.kind == Tok::Release )
        {
            shift();
            return release( lhs, parse_temporal() );
        }
        return lhs;
    }

    Formula parse_unary()
    {
        switch ( _tok.kind )
        {
        case Tok::Not: shift(); return lnot( parse_unary() );
        case Tok::Always: shift(); return always( parse_unary() );
        case Tok::Eventually: shift(); return eventually( parse_unary() );
        case Tok::Next: shift(); return next( parse_unary() );
        default: return parse_primary();
        }
    }

    Formula parse_primary()
    {
        switch ( _tok.kind )
        {
        case Tok::True: shift(); return top();
        case Tok::False: shift(); return bottom();
        case Tok::Ident:
        {
            AtomId id{ _tok.text, _tok.primed };
            if ( _hook && *_hook )
                ( *_hook )( id, _tok.line, _tok.column );
            shift();
            return atom( std::move( id ) );
        }
        case Tok::LParen:
        {
            shift();
            Formula inner = parse_binary_level( 0 );
            if ( _tok.kind != Tok::RParen )
                fail( "expected ')' but found " + describe( _tok ) );
            shift();
            return inner;
        }
        default: fail( "expected a formula but found " + describe( _tok ) );
        }
    }

public:
    FormulaParser( Lexer lexer, const AtomHook* hook ) : _lexer{ std::move( lexer ) }, _hook{ hook } { shift(); }

    Formula parse_all()
    {
        Formula f = parse_binary_level( 0 );
        if ( _tok.kind != Tok::End )
            fail( "unexpected " + describe( _tok ) + " after formula" );
        return f;
    }
};

} // namespace detail

struct FormulaParseOptions
{
    /// Accept `name'` atoms (needed to read back printed projection formulae).
    bool allow_primes = true;
    /// Where `text` begins inside its enclosing document, for diagnostics.
    std::size_t first_line = 1;
    std::size_t first_column = 1;
};

/// Parses the ASCII surface syntax produced by `print_formula`.
[[nodiscard]] inline Formula parse_formula( std::string_view text, const FormulaParseOptions& options = {},
                                            const detail::AtomHook& hook = {} )
{
    detail::Lexer lexer{ text, 0, options.first_line, options.first_column, options.allow_primes };
    detail::FormulaParser parser{ std::move( lexer ), &hook };
    return parser.parse_all();
}

} // namespace ltldec
