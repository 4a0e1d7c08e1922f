#pragma once

#include "bits.hpp"
#include "error.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fsmov
{

/// One KISS2 transition row.  `inputs` is over {0,1,-}; `outputs` is over
/// {0,1,-} until canonicalization replaces '-' with '0'.
struct cube
{
  std::string inputs;
  state_id src = 0;
  state_id dst = 0;
  std::string outputs;

  bool operator==( const cube& ) const = default;
};

struct fsm_ir
{
  std::string name;
  std::size_t num_inputs = 0;
  std::size_t num_outputs = 0;
  std::vector<std::string> states;
  state_id reset_state = 0;
  std::vector<cube> cubes;

  std::size_t num_states() const { return states.size(); }

  bool operator==( const fsm_ir& ) const = default;
};

namespace detail
{

inline std::vector<std::string_view> split_ws( std::string_view line )
{
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while ( i < line.size() )
  {
    while ( i < line.size() && ( line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ) )
    {
      ++i;
    }
    std::size_t j = i;
    while ( j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' )
    {
      ++j;
    }
    if ( j > i )
    {
      tokens.push_back( line.substr( i, j - i ) );
    }
    i = j;
  }
  return tokens;
}

inline std::size_t parse_count( std::string_view tok, std::size_t line_no, std::string_view directive )
{
  std::size_t v = 0;
  if ( tok.empty() )
  {
    throw error( error_kind::parse, "line " + std::to_string( line_no ) + ": missing value for " + std::string( directive ) );
  }
  for ( char c : tok )
  {
    if ( c < '0' || c > '9' )
    {
      throw error( error_kind::parse, "line " + std::to_string( line_no ) + ": malformed directive " + std::string( directive ) + " " + std::string( tok ) );
    }
    v = v * 10 + static_cast<std::size_t>( c - '0' );
  }
  return v;
}

inline bool is_pattern( std::string_view tok, std::string_view alphabet )
{
  return std::all_of( tok.begin(), tok.end(), [&]( char c ) { return alphabet.find( c ) != std::string_view::npos; } );
}

} // namespace detail

/// Parses a KISS2 document.  States are numbered in order of first
/// appearance; the reset state comes from `.r` or else the source state of
/// the first row.  `.s`/`.p` disagreements are appended to `warnings`.
inline fsm_ir parse_kiss( std::string_view text, std::string name = "fsm", std::vector<std::string>* warnings = nullptr )
{
  fsm_ir fsm;
  fsm.name = std::move( name );

  std::optional<std::size_t> num_inputs, num_outputs, declared_states, declared_products;
  std::optional<std::string> reset_name;
  std::unordered_map<std::string, state_id> index;

  auto state_of = [&]( std::string_view n ) {
    auto [it, inserted] = index.try_emplace( std::string( n ), static_cast<state_id>( fsm.states.size() ) );
    if ( inserted )
    {
      fsm.states.emplace_back( n );
    }
    return it->second;
  };

  auto fail = [&]( std::size_t line_no, const std::string& msg ) {
    throw error( error_kind::parse, "line " + std::to_string( line_no ) + ": " + msg );
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while ( pos <= text.size() )
  {
    auto eol = text.find( '\n', pos );
    if ( eol == std::string_view::npos )
    {
      eol = text.size();
    }
    auto line = text.substr( pos, eol - pos );
    pos = eol + 1;
    ++line_no;

    if ( auto hash = line.find( '#' ); hash != std::string_view::npos )
    {
      line = line.substr( 0, hash );
    }
    auto tokens = detail::split_ws( line );
    if ( tokens.empty() )
    {
      continue;
    }

    if ( tokens[0].front() == '.' )
    {
      auto d = tokens[0];
      if ( d == ".e" || d == ".end" )
      {
        break;
      }
      if ( d == ".ilb" || d == ".ob" || d == ".model" )
      {
        continue;
      }
      if ( tokens.size() != 2 )
      {
        fail( line_no, "malformed directive " + std::string( d ) );
      }
      if ( d == ".i" )
      {
        num_inputs = detail::parse_count( tokens[1], line_no, d );
      }
      else if ( d == ".o" )
      {
        num_outputs = detail::parse_count( tokens[1], line_no, d );
      }
      else if ( d == ".s" )
      {
        declared_states = detail::parse_count( tokens[1], line_no, d );
      }
      else if ( d == ".p" )
      {
        declared_products = detail::parse_count( tokens[1], line_no, d );
      }
      else if ( d == ".r" )
      {
        reset_name = std::string( tokens[1] );
      }
      else
      {
        fail( line_no, "unknown directive " + std::string( d ) );
      }
      continue;
    }

    if ( !num_inputs || !num_outputs )
    {
      fail( line_no, "transition row before .i/.o" );
    }
    std::size_t const expected = ( *num_inputs > 0 ? 1u : 0u ) + 2u + ( *num_outputs > 0 ? 1u : 0u );
    if ( tokens.size() != expected )
    {
      fail( line_no, "expected " + std::to_string( expected ) + " tokens, got " + std::to_string( tokens.size() ) );
    }
    std::size_t t = 0;
    cube c;
    if ( *num_inputs > 0 )
    {
      auto in = tokens[t++];
      if ( in.size() != *num_inputs || !detail::is_pattern( in, "01-" ) )
      {
        fail( line_no, "input pattern '" + std::string( in ) + "' does not match .i " + std::to_string( *num_inputs ) );
      }
      c.inputs = std::string( in );
    }
    auto src = tokens[t++];
    auto dst = tokens[t++];
    if ( src == "*" || dst == "*" )
    {
      fail( line_no, "wildcard state '*' is not supported" );
    }
    c.src = state_of( src );
    c.dst = state_of( dst );
    if ( *num_outputs > 0 )
    {
      auto out = tokens[t++];
      if ( out.size() != *num_outputs || !detail::is_pattern( out, "01-" ) )
      {
        fail( line_no, "output pattern '" + std::string( out ) + "' does not match .o " + std::to_string( *num_outputs ) );
      }
      c.outputs = std::string( out );
    }
    fsm.cubes.push_back( std::move( c ) );
  }

  if ( !num_inputs || !num_outputs )
  {
    throw error( error_kind::parse, "missing .i or .o directive" );
  }
  if ( fsm.cubes.empty() )
  {
    throw error( error_kind::parse, "empty machine: no transition rows" );
  }
  fsm.num_inputs = *num_inputs;
  fsm.num_outputs = *num_outputs;

  if ( reset_name )
  {
    auto it = index.find( *reset_name );
    if ( it == index.end() )
    {
      throw error( error_kind::parse, "reset state '" + *reset_name + "' does not appear in any row" );
    }
    fsm.reset_state = it->second;
  }
  else
  {
    fsm.reset_state = fsm.cubes.front().src;
  }

  if ( warnings )
  {
    if ( declared_states && *declared_states != fsm.states.size() )
    {
      warnings->push_back( ".s declares " + std::to_string( *declared_states ) + " states, found " + std::to_string( fsm.states.size() ) );
    }
    if ( declared_products && *declared_products != fsm.cubes.size() )
    {
      warnings->push_back( ".p declares " + std::to_string( *declared_products ) + " rows, found " + std::to_string( fsm.cubes.size() ) );
    }
  }
  return fsm;
}

/// Canonical KISS2 rendering: explicit `.r`, rows in input order.
inline std::string write_kiss( const fsm_ir& fsm )
{
  std::ostringstream os;
  os << ".i " << fsm.num_inputs << '\n'
     << ".o " << fsm.num_outputs << '\n'
     << ".p " << fsm.cubes.size() << '\n'
     << ".s " << fsm.states.size() << '\n'
     << ".r " << fsm.states.at( fsm.reset_state ) << '\n';
  for ( const auto& c : fsm.cubes )
  {
    if ( fsm.num_inputs > 0 )
    {
      os << c.inputs << ' ';
    }
    os << fsm.states[c.src] << ' ' << fsm.states[c.dst];
    if ( fsm.num_outputs > 0 )
    {
      os << ' ' << c.outputs;
    }
    os << '\n';
  }
  os << ".e\n";
  return os.str();
}

} // namespace fsmov
