#pragma once

#include "analysis.hpp"
#include "bitstream.hpp"
#include "instance.hpp"
#include "reference.hpp"
#include "tailor.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fsmov
{

/// Where each machine state lives in an M-RAM instance.
struct assignment
{
  struct slot
  {
    std::size_t ste = 0;
    std::size_t pseudo_state = 0;

    bool operator==( const slot& ) const = default;
  };

  std::vector<slot> slots; // indexed by state
  /// Unused input-selection slots of a pseudo state select this input.
  std::size_t padding_input = 0;

  bool operator==( const assignment& ) const = default;
};

struct map_options
{
  std::uint64_t bit_cap = std::uint64_t{ 1 } << 28;
};

/// Places states into STE pseudo states.  Pseudo states are numbered in
/// placement order within each STE.
inline assignment assign_states( const fsm_profile& prof, const instance_spec& inst )
{
  if ( inst.kind != arch::m_ram )
  {
    throw error( error_kind::instance, "state assignment applies to M-RAM instances only" );
  }
  if ( auto h = hostable( inst, prof ); !h )
  {
    throw error( error_kind::hostability, h.reason );
  }
  auto placed = detail::greedy_assign( prof.ei_multiset(), inst.stes );
  if ( !placed )
  {
    throw error( error_kind::hostability, "no feasible STE assignment" );
  }
  assignment a;
  for ( auto [ste, ps] : *placed )
  {
    a.slots.push_back( { ste, ps } );
  }
  return a;
}

namespace detail
{

/// Precomputed per-cube results so that RAM filling only pays for matching.
class transition_table
{
public:
  transition_table( const canonical_fsm& fsm, const fsm_profile& prof )
      : fsm_( fsm ), prof_( prof )
  {
    std::map<std::pair<state_id, bit_vector>, std::size_t> index;
    for ( std::size_t t = 0; t < prof.transitions.size(); ++t )
    {
      index.emplace( std::pair{ prof.transitions[t].dst, prof.transitions[t].outputs }, t );
    }
    auto lookup = [&]( state_id dst, const bit_vector& out ) {
      auto it = index.find( { dst, out } );
      if ( it == index.end() )
        throw error( error_kind::arity, "profile does not belong to this machine" );
      return it->second;
    };
    for ( const auto& c : fsm.base.cubes )
    {
      cube_index_.push_back( lookup( c.dst, bits_from_string( c.outputs ) ) );
    }
    for ( state_id s = 0; s < fsm.num_states(); ++s )
    {
      default_index_.push_back( fsm.has_default[s] ? lookup( s, bit_vector( fsm.num_outputs(), false ) ) : 0 );
    }
  }

  /// Global transition index taken from `state` under packed `inputs`.
  std::size_t global( state_id state, std::span<const std::uint64_t> inputs ) const
  {
    auto ci = fsm_.match( state, inputs );
    return ci < 0 ? default_index_[state] : cube_index_[static_cast<std::size_t>( ci )];
  }

  /// Position of global transition `t` within `state`'s own transition list.
  std::size_t local( state_id state, std::size_t t ) const
  {
    const auto& list = prof_.state_transitions[state];
    for ( std::size_t k = 0; k < list.size(); ++k )
      if ( list[k] == t )
        return k;
    throw error( error_kind::arity, "transition not reachable from state" );
  }

  const transition_code& code( std::size_t t ) const { return prof_.transitions[t]; }

private:
  const canonical_fsm& fsm_;
  const fsm_profile& prof_;
  std::vector<std::size_t> cube_index_;
  std::vector<std::size_t> default_index_;
};

/// next state in the high bits, output k at bit k.
inline void write_code( ram_section& sec, std::uint64_t addr, const instance_spec& inst, const transition_code& code )
{
  for ( std::size_t k = 0; k < code.outputs.size(); ++k )
  {
    sec.set_bit( addr, k, code.outputs[k] );
  }
  sec.set( addr, inst.o_total, inst.state_bits(), code.dst );
}

/// Packs slot value `v` into the machine's input vector: slot k drives
/// effective input `eis[k]`, every other input is 0.
inline std::vector<std::uint64_t> slot_inputs( const canonical_fsm& fsm, const std::vector<std::size_t>& eis, std::uint64_t v )
{
  std::vector<std::uint64_t> packed( fsm.limbs(), 0 );
  for ( std::size_t k = 0; k < eis.size(); ++k )
  {
    if ( ( v >> k ) & 1u )
    {
      packed[eis[k] / 64] |= std::uint64_t{ 1 } << ( eis[k] % 64 );
    }
  }
  return packed;
}

inline void write_slots( ram_section& sec, std::uint64_t addr, unsigned ibits, const std::vector<std::size_t>& eis )
{
  for ( std::size_t k = 0; k < eis.size(); ++k )
  {
    sec.set( addr, k * ibits, ibits, eis[k] );
  }
}

inline bitstream prepare( const canonical_fsm& fsm, const fsm_profile& prof, const instance_spec& inst, const map_options& opts )
{
  if ( auto h = hostable( inst, prof ); !h )
  {
    throw error( error_kind::hostability, fsm.base.name + " does not fit the " + to_string( inst.kind ) + " instance: " + h.reason );
  }
  auto shapes = ram_shapes( inst );
  std::uint64_t bits = 0;
  for ( const auto& s : shapes )
    bits += s.bits();
  if ( bits > opts.bit_cap )
  {
    throw error( error_kind::capacity, "the " + std::string( to_string( inst.kind ) ) + " instance needs " + std::to_string( bits ) + " RAM bits, above the cap of " + std::to_string( opts.bit_cap ) );
  }
  bitstream b;
  b.fsm_name = fsm.base.name;
  b.inst = inst;
  b.fsm_states = fsm.num_states();
  b.fsm_inputs = fsm.num_inputs();
  b.fsm_outputs = fsm.num_outputs();
  b.reset = fsm.base.reset_state;
  for ( auto& s : shapes )
  {
    b.sections.emplace_back( std::move( s ) );
  }
  return b;
}

} // namespace detail

inline bitstream map_mram( const canonical_fsm& fsm, const fsm_profile& prof, const instance_spec& inst, const map_options& opts = {} )
{
  if ( inst.kind != arch::m_ram )
    throw error( error_kind::instance, "map_mram needs an M-RAM instance" );
  auto b = detail::prepare( fsm, prof, inst, opts );
  auto const placement = assign_states( prof, inst );
  detail::transition_table table( fsm, prof );
  const unsigned ibits = inst.input_bits();

  auto& tcode = b.section( "transition_code" );
  for ( std::size_t t = 0; t < prof.transitions.size(); ++t )
  {
    detail::write_code( tcode, t, inst, table.code( t ) );
  }

  auto& smap = b.section( "state_map" );
  for ( state_id s = 0; s < fsm.num_states(); ++s )
  {
    auto [ste, ps] = placement.slots[s];
    smap.set( s, 0, inst.ps_bits(), ps );
    smap.set( s, inst.ps_bits(), inst.ste_bits(), ste );

    const auto ste_ei = inst.stes[ste].ei;
    const auto& eis = prof.per_state[s].effective_inputs;
    detail::write_slots( b.section( "input_select_" + std::to_string( ste ) ), ps, ibits, eis );

    auto& st = b.section( "state_transition_" + std::to_string( ste ) );
    const std::uint64_t mask = ( std::uint64_t{ 1 } << eis.size() ) - 1;
    for ( std::uint64_t v = 0; v < ( std::uint64_t{ 1 } << ste_ei ); ++v )
    {
      auto t = table.global( s, detail::slot_inputs( fsm, eis, v & mask ) );
      st.set( ( std::uint64_t{ ps } << ste_ei ) | v, 0, inst.transition_bits(), t );
    }
  }
  return b;
}

inline bitstream map_1ram( const canonical_fsm& fsm, const fsm_profile& prof, const instance_spec& inst, const map_options& opts = {} )
{
  if ( inst.kind != arch::one_ram )
    throw error( error_kind::instance, "map_1ram needs a 1-RAM instance" );
  auto b = detail::prepare( fsm, prof, inst, opts );
  detail::transition_table table( fsm, prof );
  auto& st = b.section( "state_transition" );
  const std::uint64_t fsm_mask = fsm.num_inputs() >= 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << fsm.num_inputs() ) - 1;
  std::vector<std::uint64_t> packed( std::max<std::size_t>( fsm.limbs(), 1 ), 0 );
  for ( state_id s = 0; s < fsm.num_states(); ++s )
  {
    for ( std::uint64_t v = 0; v < ( std::uint64_t{ 1 } << inst.i_total ); ++v )
    {
      packed[0] = v & fsm_mask;
      auto t = table.global( s, packed );
      detail::write_code( st, ( std::uint64_t{ s } << inst.i_total ) | v, inst, table.code( t ) );
    }
  }
  return b;
}

inline bitstream map_2ram( const canonical_fsm& fsm, const fsm_profile& prof, const instance_spec& inst, const map_options& opts = {} )
{
  if ( inst.kind != arch::two_ram )
    throw error( error_kind::instance, "map_2ram needs a 2-RAM instance" );
  auto b = detail::prepare( fsm, prof, inst, opts );
  detail::transition_table table( fsm, prof );
  auto& sel = b.section( "input_select" );
  auto& st = b.section( "state_transition" );
  for ( state_id s = 0; s < fsm.num_states(); ++s )
  {
    const auto& eis = prof.per_state[s].effective_inputs;
    detail::write_slots( sel, s, inst.input_bits(), eis );
    const std::uint64_t mask = ( std::uint64_t{ 1 } << eis.size() ) - 1;
    for ( std::uint64_t v = 0; v < ( std::uint64_t{ 1 } << inst.ei_max ); ++v )
    {
      auto t = table.global( s, detail::slot_inputs( fsm, eis, v & mask ) );
      detail::write_code( st, ( std::uint64_t{ s } << inst.ei_max ) | v, inst, table.code( t ) );
    }
  }
  return b;
}

inline bitstream map_3ram( const canonical_fsm& fsm, const fsm_profile& prof, const instance_spec& inst, const map_options& opts = {} )
{
  if ( inst.kind != arch::three_ram )
    throw error( error_kind::instance, "map_3ram needs a 3-RAM instance" );
  auto b = detail::prepare( fsm, prof, inst, opts );
  detail::transition_table table( fsm, prof );
  auto& sel = b.section( "input_select" );
  auto& st = b.section( "state_transition" );
  auto& tcode = b.section( "transition_code" );
  const unsigned lbits = inst.local_transition_bits();
  for ( state_id s = 0; s < fsm.num_states(); ++s )
  {
    const auto& eis = prof.per_state[s].effective_inputs;
    detail::write_slots( sel, s, inst.input_bits(), eis );
    const std::uint64_t mask = ( std::uint64_t{ 1 } << eis.size() ) - 1;
    for ( std::uint64_t v = 0; v < ( std::uint64_t{ 1 } << inst.ei_max ); ++v )
    {
      auto t = table.global( s, detail::slot_inputs( fsm, eis, v & mask ) );
      st.set( ( std::uint64_t{ s } << inst.ei_max ) | v, 0, lbits, table.local( s, t ) );
    }
    const auto& local = prof.state_transitions[s];
    for ( std::size_t k = 0; k < local.size(); ++k )
    {
      detail::write_code( tcode, ( std::uint64_t{ s } << lbits ) | k, inst, table.code( local[k] ) );
    }
  }
  return b;
}

/// Compiles `fsm` onto `inst`, dispatching on the architecture.
inline bitstream map_fsm( const canonical_fsm& fsm, const fsm_profile& prof, const instance_spec& inst, const map_options& opts = {} )
{
  switch ( inst.kind )
  {
  case arch::one_ram: return map_1ram( fsm, prof, inst, opts );
  case arch::two_ram: return map_2ram( fsm, prof, inst, opts );
  case arch::three_ram: return map_3ram( fsm, prof, inst, opts );
  case arch::m_ram: return map_mram( fsm, prof, inst, opts );
  }
  throw error( error_kind::instance, "unknown architecture" );
}

/// Profile, tailor a minimal instance and map, in one call.
inline bitstream compile( const canonical_fsm& fsm, arch kind, const map_options& opts = {} )
{
  auto prof = profile( fsm );
  return map_fsm( fsm, prof, tailor_single( prof, kind ), opts );
}

} // namespace fsmov
