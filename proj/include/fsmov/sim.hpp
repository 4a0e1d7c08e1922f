#pragma once

#include "bitstream.hpp"
#include "reference.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsmov
{

/// One RAM read performed while evaluating the datapath.
struct ram_access
{
  std::size_t section = 0;
  std::uint64_t addr = 0;

  bool operator==( const ram_access& ) const = default;
};

/// Cycle-level model of a loaded overlay.  RAM reads are asynchronous, so
/// the outputs of a cycle are available in that same cycle and the state
/// register takes the next state at the clock edge.
class overlay_sim
{
public:
  explicit overlay_sim( bitstream image )
      : image_( std::move( image ) )
  {
    const auto shapes = ram_shapes( image_.inst );
    if ( shapes.size() != image_.sections.size() )
    {
      throw error( error_kind::bitstream, "bitstream has " + std::to_string( image_.sections.size() ) + " sections, instance needs " + std::to_string( shapes.size() ) );
    }
    for ( std::size_t k = 0; k < shapes.size(); ++k )
    {
      if ( image_.sections[k].shape() != shapes[k] )
      {
        throw error( error_kind::bitstream, "section " + image_.sections[k].name() + " does not match the instance shape of " + shapes[k].name );
      }
    }
    if ( image_.fsm_inputs > image_.inst.i_total || image_.fsm_outputs > image_.inst.o_total || image_.reset >= image_.inst.s_total )
    {
      throw error( error_kind::bitstream, "machine arity exceeds the instance" );
    }
    if ( image_.inst.kind == arch::one_ram && image_.inst.i_total > 63 )
    {
      throw error( error_kind::bitstream, "1-RAM address wider than 64 bits" );
    }
    state_ = image_.reset;
  }

  const bitstream& image() const { return image_; }
  state_id state() const { return state_; }
  void reset() { state_ = image_.reset; }
  std::size_t num_inputs() const { return image_.fsm_inputs; }
  std::size_t num_outputs() const { return image_.fsm_outputs; }

  /// Combinational datapath: (next state, outputs) for `state` and `inputs`.
  /// Appends every RAM read to `log` when given.
  step_result evaluate( state_id state, const bit_vector& inputs, std::vector<ram_access>* log = nullptr ) const
  {
    if ( inputs.size() != image_.fsm_inputs )
    {
      throw error( error_kind::arity, "input vector has " + std::to_string( inputs.size() ) + " bits, overlay expects " + std::to_string( image_.fsm_inputs ) );
    }
    const auto& inst = image_.inst;
    const auto& sec = image_.sections;
    auto read = [&]( std::size_t k, std::uint64_t addr ) -> const ram_section& {
      if ( log )
        log->push_back( { k, addr } );
      return sec[k];
    };
    // inputs the machine does not drive read as 0
    auto input = [&]( std::uint64_t idx ) { return idx < inputs.size() && inputs[idx]; };
    auto select = [&]( std::size_t k, std::uint64_t addr, std::size_t slots ) {
      const auto& s = read( k, addr );
      const unsigned ibits = inst.input_bits();
      std::uint64_t v = 0;
      for ( std::size_t j = 0; j < slots; ++j )
      {
        if ( input( s.get( addr, j * ibits, ibits ) ) )
          v |= std::uint64_t{ 1 } << j;
      }
      return v;
    };
    auto decode = [&]( std::size_t k, std::uint64_t addr ) {
      const auto& s = read( k, addr );
      step_result r;
      r.next = static_cast<state_id>( s.get( addr, inst.o_total, inst.state_bits() ) );
      r.outputs.resize( image_.fsm_outputs );
      for ( std::size_t j = 0; j < image_.fsm_outputs; ++j )
        r.outputs[j] = s.bit( addr, j );
      return r;
    };

    const std::uint64_t st = state;
    switch ( inst.kind )
    {
    case arch::one_ram:
    {
      std::uint64_t v = 0;
      for ( std::size_t j = 0; j < inputs.size(); ++j )
        if ( inputs[j] )
          v |= std::uint64_t{ 1 } << j;
      return decode( 0, ( st << inst.i_total ) | v );
    }
    case arch::two_ram:
    {
      auto v = select( 0, st, inst.ei_max );
      return decode( 1, ( st << inst.ei_max ) | v );
    }
    case arch::three_ram:
    {
      auto v = select( 0, st, inst.ei_max );
      const auto addr = ( st << inst.ei_max ) | v;
      const auto local = read( 1, addr ).get( addr, 0, inst.local_transition_bits() );
      return decode( 2, ( st << inst.local_transition_bits() ) | local );
    }
    case arch::m_ram:
    {
      const auto& smap = read( 0, st );
      const auto ps_field = smap.get( st, 0, inst.ps_bits() );
      const auto ste = smap.get( st, inst.ps_bits(), inst.ste_bits() );
      std::uint64_t t = 0;
      if ( ste < inst.num_ste() )
      {
        const auto& spec = inst.stes[ste];
        // each STE only decodes as many pseudo-state bits as it has
        const auto ps = ps_field & ( ( std::uint64_t{ 1 } << clog2( spec.pseudo_states ) ) - 1 );
        const std::size_t sel_k = 2 + 2 * ste;
        auto v = select( sel_k, ps, spec.ei );
        const auto addr = ( ps << spec.ei ) | v;
        t = read( sel_k + 1, addr ).get( addr, 0, inst.transition_bits() );
      }
      return decode( 1, t );
    }
    }
    throw error( error_kind::instance, "unknown architecture" );
  }

  /// One clock cycle: returns this cycle's outputs and registers the next state.
  bit_vector step( const bit_vector& inputs )
  {
    auto r = evaluate( state_, inputs );
    state_ = r.next;
    return r.outputs;
  }

  /// Runs `stimulus` from reset.
  trace run( std::span<const bit_vector> stimulus )
  {
    reset();
    trace t;
    t.records.reserve( stimulus.size() );
    for ( std::size_t i = 0; i < stimulus.size(); ++i )
    {
      auto const s = state_;
      auto out = step( stimulus[i] );
      t.records.push_back( { i, stimulus[i], s, std::move( out ) } );
    }
    return t;
  }

private:
  bitstream image_;
  state_id state_ = 0;
};

inline overlay_sim load( bitstream b )
{
  return overlay_sim( std::move( b ) );
}

/// Stimulus text: one line per cycle, '0'/'1' per input, input 0 leftmost.
/// Blank lines are skipped.
inline std::vector<bit_vector> parse_stimulus( std::string_view text, std::size_t num_inputs )
{
  std::vector<bit_vector> out;
  std::size_t line_no = 0;
  while ( !text.empty() )
  {
    auto nl = text.find( '\n' );
    auto line = text.substr( 0, nl );
    text = nl == std::string_view::npos ? std::string_view{} : text.substr( nl + 1 );
    ++line_no;
    while ( !line.empty() && ( line.back() == '\r' || line.back() == ' ' || line.back() == '\t' ) )
      line.remove_suffix( 1 );
    if ( line.empty() )
      continue;
    if ( line.size() != num_inputs || line.find_first_not_of( "01" ) != std::string_view::npos )
    {
      throw error( error_kind::parse, "stimulus line " + std::to_string( line_no ) + ": expected " + std::to_string( num_inputs ) + " characters of 0/1" );
    }
    out.push_back( bits_from_string( line ) );
  }
  return out;
}

struct verify_strategy
{
  enum class kind
  {
    exhaustive,
    random
  };

  kind mode = kind::exhaustive;
  std::size_t input_cap = 16; // exhaustive only
  std::uint64_t seed = 1;     // random only
  std::size_t steps = 10000;  // random only

  static verify_strategy exhaustive( std::size_t cap = 16 ) { return { kind::exhaustive, cap, 0, 0 }; }
  static verify_strategy random( std::size_t steps, std::uint64_t seed ) { return { kind::random, 0, seed, steps }; }

  std::string describe() const
  {
    if ( mode == kind::exhaustive )
      return "exhaustive";
    return "random(seed=" + std::to_string( seed ) + ", n=" + std::to_string( steps ) + ")";
  }
};

struct counterexample
{
  state_id state = 0;
  bit_vector inputs;
  step_result expected;
  step_result actual;
};

struct verdict
{
  bool equivalent = true;
  std::optional<counterexample> cex;
  std::size_t states_checked = 0;
  std::size_t vectors_checked = 0;
  verify_strategy strategy;
};

/// Checks the overlay configured by `b` against the reference interpreter.
///
/// Exhaustive mode walks the states reachable from reset in the reference
/// machine and compares every input vector in each; unreachable states are
/// not checked.  Random mode drives both with the same seeded random walk.
inline verdict verify_equivalence( const canonical_fsm& fsm, const bitstream& b, const verify_strategy& strategy )
{
  if ( b.fsm_inputs != fsm.num_inputs() || b.fsm_outputs != fsm.num_outputs() || b.fsm_states != fsm.num_states() || b.reset != fsm.base.reset_state )
  {
    throw error( error_kind::arity, "bitstream was compiled for a different machine arity or reset state" );
  }
  overlay_sim sim( b );
  verdict v;
  v.strategy = strategy;

  if ( strategy.mode == verify_strategy::kind::exhaustive )
  {
    const auto n = fsm.num_inputs();
    if ( n > strategy.input_cap || n >= 64 )
    {
      throw error( error_kind::capacity, "exhaustive verification allows at most " + std::to_string( strategy.input_cap ) + " inputs, machine has " + std::to_string( n ) );
    }
    std::vector<bool> seen( fsm.num_states(), false );
    std::deque<state_id> queue{ fsm.base.reset_state };
    seen[fsm.base.reset_state] = true;
    while ( !queue.empty() )
    {
      auto s = queue.front();
      queue.pop_front();
      ++v.states_checked;
      for ( std::uint64_t x = 0; x < ( std::uint64_t{ 1 } << n ); ++x )
      {
        auto in = bits_from_uint( x, n );
        auto expected = step_reference( fsm, s, in );
        auto actual = sim.evaluate( s, in );
        ++v.vectors_checked;
        if ( expected != actual )
        {
          v.equivalent = false;
          v.cex = counterexample{ s, in, expected, actual };
          return v;
        }
        if ( !seen[expected.next] )
        {
          seen[expected.next] = true;
          queue.push_back( expected.next );
        }
      }
    }
    return v;
  }

  std::mt19937_64 rng( strategy.seed );
  std::uint64_t pool = 0;
  unsigned left = 0;
  auto next_bit = [&]() {
    if ( left == 0 )
    {
      pool = rng();
      left = 64;
    }
    --left;
    bool bit = pool & 1u;
    pool >>= 1;
    return bit;
  };
  std::vector<bool> seen( fsm.num_states(), false );
  state_id ref_state = fsm.base.reset_state;
  sim.reset();
  for ( std::size_t i = 0; i < strategy.steps; ++i )
  {
    bit_vector in( fsm.num_inputs() );
    for ( std::size_t j = 0; j < in.size(); ++j )
      in[j] = next_bit();
    if ( !seen[ref_state] )
    {
      seen[ref_state] = true;
      ++v.states_checked;
    }
    auto expected = step_reference( fsm, ref_state, in );
    auto actual = sim.evaluate( sim.state(), in );
    ++v.vectors_checked;
    if ( sim.state() != ref_state || expected != actual )
    {
      v.equivalent = false;
      v.cex = counterexample{ ref_state, in, expected, actual };
      return v;
    }
    sim.step( in );
    ref_state = expected.next;
  }
  return v;
}

} // namespace fsmov
