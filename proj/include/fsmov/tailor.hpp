#pragma once

#include "analysis.hpp"
#include "instance.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

namespace fsmov
{

namespace detail
{

inline std::uint64_t sat_mul( std::uint64_t a, std::uint64_t b )
{
  if ( a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a )
  {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

inline std::uint64_t sat_add( std::uint64_t a, std::uint64_t b )
{
  return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

inline std::uint64_t sat_pow2( std::uint64_t k )
{
  return k >= 64 ? std::numeric_limits<std::uint64_t>::max() : std::uint64_t{ 1 } << k;
}

} // namespace detail

/// Bits of one STE: its state-transition RAM plus its input-selection RAM.
inline std::uint64_t ste_cost( const ste_spec& ste, std::size_t t_max, std::size_t i_total )
{
  using namespace detail;
  const std::uint64_t pbits = clog2( ste.pseudo_states );
  const std::uint64_t tbits = clog2( t_max );
  const std::uint64_t ibits = clog2( std::max<std::size_t>( i_total, 1 ) );
  return sat_add( sat_mul( sat_pow2( pbits + ste.ei ), tbits ), sat_mul( sat_mul( sat_pow2( pbits ), ste.ei ), ibits ) );
}

/// Chooses the STE layout for a multiset of per-state EI counts.
///
/// The distinct EI values are sorted and split into contiguous runs; each run
/// becomes one STE whose width is the run's largest EI and whose depth holds
/// every state in the run (at least two pseudo states).  A STE's cost depends
/// only on its width and state count, so for any non-contiguous grouping,
/// swapping states between two groups so that the narrower group takes the
/// lower EI values keeps both counts and never raises either width; a
/// contiguous optimum therefore always exists.  The best split is found by
/// dynamic programming over run boundaries.  Ties go to fewer STEs, then to
/// the lexicographically smallest list of run start positions.
inline std::vector<ste_spec> optimize_stes( const std::vector<std::size_t>& ei_multiset, std::size_t t_max, std::size_t i_total )
{
  if ( ei_multiset.empty() )
  {
    throw error( error_kind::instance, "optimize_stes needs at least one state" );
  }
  std::map<std::size_t, std::size_t> histogram;
  for ( auto e : ei_multiset )
  {
    ++histogram[e];
  }
  std::vector<std::size_t> values, counts;
  for ( auto [v, c] : histogram )
  {
    values.push_back( v );
    counts.push_back( c );
  }
  const std::size_t d = values.size();

  auto group = [&]( std::size_t first, std::size_t last ) {
    std::size_t n = 0;
    for ( auto k = first; k < last; ++k )
    {
      n += counts[k];
    }
    return ste_spec{ values[last - 1], std::max<std::size_t>( 2, n ) };
  };

  struct best_prefix
  {
    std::uint64_t cost = std::numeric_limits<std::uint64_t>::max();
    std::size_t groups = 0;
    std::vector<std::size_t> starts;
    bool valid = false;

    bool better_than( const best_prefix& o ) const
    {
      if ( !o.valid )
        return true;
      if ( cost != o.cost )
        return cost < o.cost;
      if ( groups != o.groups )
        return groups < o.groups;
      return starts < o.starts;
    }
  };

  std::vector<best_prefix> best( d + 1 );
  best[0] = { 0, 0, {}, true };
  for ( std::size_t j = 1; j <= d; ++j )
  {
    for ( std::size_t i = 0; i < j; ++i )
    {
      best_prefix cand = best[i];
      cand.cost = detail::sat_add( cand.cost, ste_cost( group( i, j ), t_max, i_total ) );
      cand.groups += 1;
      cand.starts.push_back( i );
      if ( cand.better_than( best[j] ) )
      {
        best[j] = std::move( cand );
      }
    }
  }

  std::vector<ste_spec> stes;
  const auto& starts = best[d].starts;
  for ( std::size_t g = 0; g < starts.size(); ++g )
  {
    auto last = g + 1 < starts.size() ? starts[g + 1] : d;
    stes.push_back( group( starts[g], last ) );
  }
  return stes;
}

/// Smallest instance of `kind` that hosts a machine with profile `prof`.
inline instance_spec tailor_single( const fsm_profile& prof, arch kind )
{
  instance_spec inst;
  inst.kind = kind;
  inst.s_total = std::max<std::size_t>( prof.s_total, 1 );
  inst.i_total = prof.i_total;
  inst.o_total = prof.o_total;
  inst.t_max = std::max<std::size_t>( prof.t_max, 1 );
  inst.t_state_max = std::max<std::size_t>( prof.t_state_max, 1 );
  inst.ei_max = prof.ei_max;
  if ( kind == arch::m_ram )
  {
    inst.stes = optimize_stes( prof.ei_multiset(), inst.t_max, inst.i_total );
  }
  return inst;
}

/// Requirement profile covering every member: element-wise maxima of the
/// scalars and the rank-wise maximum of the per-state EI counts.  The result
/// carries no transition list.
inline fsm_profile envelope( const std::vector<fsm_profile>& profiles )
{
  if ( profiles.empty() )
  {
    throw error( error_kind::instance, "envelope of an empty profile list" );
  }
  fsm_profile env;
  std::vector<std::size_t> ranked;
  for ( const auto& p : profiles )
  {
    env.s_total = std::max( env.s_total, p.s_total );
    env.i_total = std::max( env.i_total, p.i_total );
    env.o_total = std::max( env.o_total, p.o_total );
    env.t_max = std::max( env.t_max, p.t_max );
    env.t_state_max = std::max( env.t_state_max, p.t_state_max );
    env.ei_max = std::max( env.ei_max, p.ei_max );

    auto eis = p.ei_multiset();
    std::sort( eis.begin(), eis.end(), std::greater<>() );
    if ( eis.size() > ranked.size() )
    {
      ranked.resize( eis.size(), 0 );
    }
    for ( std::size_t k = 0; k < eis.size(); ++k )
    {
      ranked[k] = std::max( ranked[k], eis[k] );
    }
  }
  for ( std::size_t k = 0; k < ranked.size(); ++k )
  {
    state_profile sp;
    sp.state = static_cast<state_id>( k );
    for ( std::size_t j = 0; j < ranked[k]; ++j )
    {
      sp.effective_inputs.push_back( j );
    }
    sp.ei_count = ranked[k];
    env.per_state.push_back( std::move( sp ) );
  }
  return env;
}

/// Instance of `kind` reconfigurable to any one of the given machines.
inline instance_spec tailor_multi( const std::vector<fsm_profile>& profiles, arch kind )
{
  return tailor_single( envelope( profiles ), kind );
}

} // namespace fsmov
