#pragma once

#include "bits.hpp"
#include "error.hpp"
#include "kiss.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fsmov
{

struct trace_record
{
  std::size_t cycle = 0;
  bit_vector inputs;
  state_id state = 0;
  bit_vector outputs;

  bool operator==( const trace_record& ) const = default;
};

struct trace
{
  std::vector<trace_record> records;

  bool operator==( const trace& ) const = default;
};

struct step_result
{
  state_id next = 0;
  bit_vector outputs;

  bool operator==( const step_result& ) const = default;
};

/// A total, unambiguous machine.  `base` holds the parsed cubes with output
/// don't-cares resolved to '0'.  States whose explicit cubes leave part of
/// the input space uncovered get an implicit default cube: a self-loop with
/// all-zero outputs, matched only when no explicit cube matches.
class canonical_fsm
{
public:
  fsm_ir base;
  std::vector<std::vector<std::size_t>> state_cubes; // explicit cube indices per state, file order
  std::vector<bool> has_default;
  bool coverage_complete = true;

  std::size_t num_states() const { return base.num_states(); }
  std::size_t num_inputs() const { return base.num_inputs; }
  std::size_t num_outputs() const { return base.num_outputs; }

  cube default_cube( state_id s ) const
  {
    return cube{ std::string( base.num_inputs, '-' ), s, s, std::string( base.num_outputs, '0' ) };
  }

  /// The implicit default cubes, one per uncovered state.
  std::vector<cube> default_cubes() const
  {
    std::vector<cube> out;
    for ( state_id s = 0; s < num_states(); ++s )
    {
      if ( has_default[s] )
      {
        out.push_back( default_cube( s ) );
      }
    }
    return out;
  }

  /// Index of the first explicit cube of `s` matching `inputs` (packed,
  /// input j at bit j of limb j/64), or -1 when only the default applies.
  std::ptrdiff_t match( state_id s, std::span<const std::uint64_t> inputs ) const
  {
    for ( auto ci : state_cubes[s] )
    {
      const auto& care = care_[ci];
      const auto& value = value_[ci];
      bool hit = true;
      for ( std::size_t k = 0; k < care.size(); ++k )
      {
        if ( ( inputs[k] & care[k] ) != value[k] )
        {
          hit = false;
          break;
        }
      }
      if ( hit )
      {
        return static_cast<std::ptrdiff_t>( ci );
      }
    }
    return -1;
  }

  std::size_t limbs() const { return ( base.num_inputs + 63 ) / 64; }

  std::vector<std::uint64_t> pack( const bit_vector& inputs ) const
  {
    std::vector<std::uint64_t> p( limbs(), 0 );
    for ( std::size_t j = 0; j < inputs.size(); ++j )
    {
      if ( inputs[j] )
      {
        p[j / 64] |= std::uint64_t{ 1 } << ( j % 64 );
      }
    }
    return p;
  }

private:
  friend canonical_fsm canonicalize( const fsm_ir& fsm );

  std::vector<std::vector<std::uint64_t>> care_;
  std::vector<std::vector<std::uint64_t>> value_;
};

namespace detail
{

inline bool cubes_intersect( const std::string& a, const std::string& b )
{
  for ( std::size_t j = 0; j < a.size(); ++j )
  {
    if ( a[j] != '-' && b[j] != '-' && a[j] != b[j] )
    {
      return false;
    }
  }
  return true;
}

/// Tautology check by Shannon cofactoring: does the union of `patterns`
/// cover every vector over `width` variables?
inline bool covers_all( std::vector<std::string> patterns, std::size_t width )
{
  if ( patterns.empty() )
  {
    return false;
  }
  std::vector<std::size_t> literal_count( width, 0 );
  for ( const auto& p : patterns )
  {
    bool all_dc = true;
    for ( std::size_t j = 0; j < width; ++j )
    {
      if ( p[j] != '-' )
      {
        all_dc = false;
        ++literal_count[j];
      }
    }
    if ( all_dc )
    {
      return true;
    }
  }
  // a variable that appears in every cube with the same polarity makes the
  // opposite cofactor empty
  std::size_t split = 0;
  for ( std::size_t j = 1; j < width; ++j )
  {
    if ( literal_count[j] > literal_count[split] )
    {
      split = j;
    }
  }
  for ( char polarity : { '0', '1' } )
  {
    std::vector<std::string> cofactor;
    for ( const auto& p : patterns )
    {
      if ( p[split] == '-' || p[split] == polarity )
      {
        cofactor.push_back( p );
        cofactor.back()[split] = '-';
      }
    }
    if ( !covers_all( std::move( cofactor ), width ) )
    {
      return false;
    }
  }
  return true;
}

inline std::string describe( const fsm_ir& fsm, const cube& c )
{
  std::string s = c.inputs.empty() ? std::string() : c.inputs + " ";
  s += fsm.states[c.src] + " " + fsm.states[c.dst];
  if ( !c.outputs.empty() )
  {
    s += " " + c.outputs;
  }
  return s;
}

} // namespace detail

/// Resolves output don't-cares, rejects conflicting overlaps and records a
/// default cube for every state whose rows do not cover the input space.
inline canonical_fsm canonicalize( const fsm_ir& fsm )
{
  if ( fsm.states.empty() )
  {
    throw error( error_kind::parse, "machine has no states" );
  }
  if ( fsm.reset_state >= fsm.states.size() )
  {
    throw error( error_kind::parse, "reset state out of range" );
  }

  canonical_fsm c;
  c.base = fsm;
  c.state_cubes.assign( fsm.states.size(), {} );
  c.has_default.assign( fsm.states.size(), false );

  const std::size_t limbs = ( fsm.num_inputs + 63 ) / 64;
  for ( std::size_t ci = 0; ci < c.base.cubes.size(); ++ci )
  {
    auto& cb = c.base.cubes[ci];
    if ( cb.inputs.size() != fsm.num_inputs || cb.outputs.size() != fsm.num_outputs || cb.src >= fsm.states.size() || cb.dst >= fsm.states.size() )
    {
      throw error( error_kind::parse, "cube " + std::to_string( ci ) + " is inconsistent with the machine header" );
    }
    for ( auto& ch : cb.outputs )
    {
      if ( ch == '-' )
      {
        ch = '0';
      }
    }
    std::vector<std::uint64_t> care( limbs, 0 ), value( limbs, 0 );
    for ( std::size_t j = 0; j < fsm.num_inputs; ++j )
    {
      if ( cb.inputs[j] != '-' )
      {
        care[j / 64] |= std::uint64_t{ 1 } << ( j % 64 );
        if ( cb.inputs[j] == '1' )
        {
          value[j / 64] |= std::uint64_t{ 1 } << ( j % 64 );
        }
      }
    }
    c.care_.push_back( std::move( care ) );
    c.value_.push_back( std::move( value ) );
    c.state_cubes[cb.src].push_back( ci );
  }

  for ( state_id s = 0; s < fsm.states.size(); ++s )
  {
    const auto& idx = c.state_cubes[s];
    for ( std::size_t a = 0; a < idx.size(); ++a )
    {
      for ( std::size_t b = a + 1; b < idx.size(); ++b )
      {
        const auto& ca = c.base.cubes[idx[a]];
        const auto& cb = c.base.cubes[idx[b]];
        if ( ( ca.dst != cb.dst || ca.outputs != cb.outputs ) && detail::cubes_intersect( ca.inputs, cb.inputs ) )
        {
          throw error( error_kind::ambiguity, "state " + fsm.states[s] + ": conflicting cubes '" + detail::describe( c.base, ca ) + "' and '" + detail::describe( c.base, cb ) + "'" );
        }
      }
    }
    std::vector<std::string> patterns;
    for ( auto ci : idx )
    {
      patterns.push_back( c.base.cubes[ci].inputs );
    }
    if ( !detail::covers_all( std::move( patterns ), fsm.num_inputs ) )
    {
      c.has_default[s] = true;
      c.coverage_complete = false;
    }
  }
  return c;
}

/// One Mealy step of the reference interpreter.
inline step_result step_reference( const canonical_fsm& fsm, state_id state, const bit_vector& inputs )
{
  if ( inputs.size() != fsm.num_inputs() )
  {
    throw error( error_kind::arity, "input vector has " + std::to_string( inputs.size() ) + " bits, machine has " + std::to_string( fsm.num_inputs() ) + " inputs" );
  }
  if ( state >= fsm.num_states() )
  {
    throw error( error_kind::arity, "state " + std::to_string( state ) + " out of range" );
  }
  auto const packed = fsm.pack( inputs );
  auto const ci = fsm.match( state, packed );
  if ( ci < 0 )
  {
    return { state, bit_vector( fsm.num_outputs(), false ) };
  }
  const auto& c = fsm.base.cubes[static_cast<std::size_t>( ci )];
  return { c.dst, bits_from_string( c.outputs ) };
}

/// Runs `stimulus` from the reset state.  Record i carries the registered
/// state at the start of cycle i and the outputs produced in that cycle.
inline trace simulate_reference( const canonical_fsm& fsm, std::span<const bit_vector> stimulus )
{
  trace t;
  t.records.reserve( stimulus.size() );
  state_id state = fsm.base.reset_state;
  for ( std::size_t i = 0; i < stimulus.size(); ++i )
  {
    auto r = step_reference( fsm, state, stimulus[i] );
    t.records.push_back( { i, stimulus[i], state, r.outputs } );
    state = r.next;
  }
  return t;
}

} // namespace fsmov
