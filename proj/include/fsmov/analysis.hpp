#pragma once

#include "bits.hpp"
#include "reference.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace fsmov
{

struct state_profile
{
  state_id state = 0;
  std::vector<std::size_t> effective_inputs; // ascending
  std::size_t ei_count = 0;

  bool operator==( const state_profile& ) const = default;
};

/// A unique (next state, outputs) pair.
struct transition_code
{
  state_id dst = 0;
  bit_vector outputs;

  bool operator==( const transition_code& ) const = default;
};

/// Everything the sizing formulas need from one machine.  Profiles built by
/// `envelope` are synthetic: they carry scalars and per-state EI counts but
/// no transition list.
struct fsm_profile
{
  std::vector<state_profile> per_state;
  std::size_t ei_max = 0;
  std::vector<transition_code> transitions;
  std::size_t t_max = 0;
  std::vector<std::size_t> per_state_transition_count;
  /// Global transition indices reachable from each state, first-appearance order.
  std::vector<std::vector<std::size_t>> state_transitions;
  std::size_t t_state_max = 0;
  std::size_t s_total = 0;
  std::size_t i_total = 0;
  std::size_t o_total = 0;

  std::vector<std::size_t> ei_multiset() const
  {
    std::vector<std::size_t> m;
    m.reserve( per_state.size() );
    for ( const auto& p : per_state )
    {
      m.push_back( p.ei_count );
    }
    return m;
  }

  bool operator==( const fsm_profile& ) const = default;
};

/// Input positions carrying a literal in any explicit cube of `state`.
inline std::vector<std::size_t> effective_inputs( const canonical_fsm& fsm, state_id state )
{
  std::vector<bool> used( fsm.num_inputs(), false );
  for ( auto ci : fsm.state_cubes.at( state ) )
  {
    const auto& pattern = fsm.base.cubes[ci].inputs;
    for ( std::size_t j = 0; j < pattern.size(); ++j )
    {
      if ( pattern[j] != '-' )
      {
        used[j] = true;
      }
    }
  }
  std::vector<std::size_t> out;
  for ( std::size_t j = 0; j < used.size(); ++j )
  {
    if ( used[j] )
    {
      out.push_back( j );
    }
  }
  return out;
}

namespace detail
{

/// Builds the global transition list and each state's ordered slice of it.
/// Scan order: states ascending, explicit cubes in file order, default last.
inline std::pair<std::vector<transition_code>, std::vector<std::vector<std::size_t>>> collect_transitions( const canonical_fsm& fsm )
{
  std::vector<transition_code> global;
  std::vector<std::vector<std::size_t>> per_state( fsm.num_states() );
  std::map<std::pair<state_id, std::string>, std::size_t> seen;

  auto visit = [&]( state_id s, state_id dst, const std::string& outputs ) {
    auto [it, inserted] = seen.try_emplace( { dst, outputs }, global.size() );
    if ( inserted )
    {
      global.push_back( { dst, bits_from_string( outputs ) } );
    }
    auto& local = per_state[s];
    if ( std::find( local.begin(), local.end(), it->second ) == local.end() )
    {
      local.push_back( it->second );
    }
  };

  for ( state_id s = 0; s < fsm.num_states(); ++s )
  {
    for ( auto ci : fsm.state_cubes[s] )
    {
      const auto& c = fsm.base.cubes[ci];
      visit( s, c.dst, c.outputs );
    }
    if ( fsm.has_default[s] )
    {
      visit( s, s, std::string( fsm.num_outputs(), '0' ) );
    }
  }
  return { std::move( global ), std::move( per_state ) };
}

} // namespace detail

inline std::vector<transition_code> unique_transitions( const canonical_fsm& fsm )
{
  return detail::collect_transitions( fsm ).first;
}

inline fsm_profile profile( const canonical_fsm& fsm )
{
  fsm_profile p;
  p.s_total = fsm.num_states();
  p.i_total = fsm.num_inputs();
  p.o_total = fsm.num_outputs();

  for ( state_id s = 0; s < fsm.num_states(); ++s )
  {
    auto ei = effective_inputs( fsm, s );
    auto const n = ei.size();
    p.per_state.push_back( { s, std::move( ei ), n } );
    p.ei_max = std::max( p.ei_max, n );
  }

  auto [global, per_state] = detail::collect_transitions( fsm );
  p.transitions = std::move( global );
  p.t_max = p.transitions.size();
  p.state_transitions = std::move( per_state );
  for ( const auto& local : p.state_transitions )
  {
    p.per_state_transition_count.push_back( local.size() );
    p.t_state_max = std::max( p.t_state_max, local.size() );
  }
  return p;
}

/// Global index of (dst, outputs) in `prof.transitions`.
inline std::size_t transition_index( const fsm_profile& prof, const step_result& r )
{
  for ( std::size_t t = 0; t < prof.transitions.size(); ++t )
  {
    if ( prof.transitions[t].dst == r.next && prof.transitions[t].outputs == r.outputs )
    {
      return t;
    }
  }
  throw error( error_kind::arity, "transition not present in profile" );
}

} // namespace fsmov
