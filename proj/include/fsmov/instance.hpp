#pragma once

#include "analysis.hpp"
#include "bits.hpp"
#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fsmov
{

enum class arch
{
  one_ram,
  two_ram,
  three_ram,
  m_ram
};

inline constexpr arch all_archs[] = { arch::one_ram, arch::two_ram, arch::three_ram, arch::m_ram };

inline const char* to_string( arch a )
{
  switch ( a )
  {
  case arch::one_ram: return "one";
  case arch::two_ram: return "two";
  case arch::three_ram: return "three";
  case arch::m_ram: return "mram";
  }
  return "?";
}

inline arch arch_from_string( std::string_view s )
{
  if ( s == "one" || s == "1ram" || s == "1-ram" )
    return arch::one_ram;
  if ( s == "two" || s == "2ram" || s == "2-ram" )
    return arch::two_ram;
  if ( s == "three" || s == "3ram" || s == "3-ram" )
    return arch::three_ram;
  if ( s == "mram" || s == "m-ram" )
    return arch::m_ram;
  throw error( error_kind::parse, "unknown architecture '" + std::string( s ) + "'" );
}

/// One state-transition element: an input-selection RAM plus a
/// state-transition RAM sized for `ei` effective inputs and
/// `pseudo_states` distinct transition functions.
struct ste_spec
{
  std::size_t ei = 0;
  std::size_t pseudo_states = 2;

  bool operator==( const ste_spec& ) const = default;
};

struct instance_spec
{
  arch kind = arch::m_ram;
  std::size_t s_total = 1;
  std::size_t i_total = 0;
  std::size_t o_total = 0;
  std::size_t t_max = 1;
  std::size_t t_state_max = 1; // 3-RAM only
  std::size_t ei_max = 0;      // 2-RAM and 3-RAM only
  std::vector<ste_spec> stes;  // M-RAM only, ascending by ei

  std::size_t num_ste() const { return stes.size(); }

  std::size_t s_ste_max() const
  {
    std::size_t m = 0;
    for ( const auto& s : stes )
    {
      m = std::max( m, s.pseudo_states );
    }
    return m;
  }

  unsigned state_bits() const { return clog2( s_total ); }
  unsigned input_bits() const { return clog2( std::max<std::size_t>( i_total, 1 ) ); }
  unsigned transition_bits() const { return clog2( t_max ); }
  unsigned local_transition_bits() const { return clog2( t_state_max ); }
  unsigned ps_bits() const { return clog2( std::max<std::size_t>( s_ste_max(), 1 ) ); }
  unsigned ste_bits() const { return clog2( std::max<std::size_t>( num_ste(), 1 ) ); }

  bool operator==( const instance_spec& ) const = default;
};

struct ram_shape
{
  std::string name;
  std::uint64_t depth = 1;
  std::uint64_t width = 0;

  std::uint64_t bits() const { return depth * width; }

  bool operator==( const ram_shape& ) const = default;
};

/// Throws error_kind::instance when the fields do not describe a buildable
/// instance of `inst.kind`.
inline void validate( const instance_spec& inst )
{
  auto fail = [&]( const std::string& msg ) {
    throw error( error_kind::instance, std::string( to_string( inst.kind ) ) + " instance: " + msg );
  };
  if ( inst.s_total < 1 )
    fail( "s_total must be positive" );
  switch ( inst.kind )
  {
  case arch::one_ram:
    break;
  case arch::two_ram:
  case arch::three_ram:
    if ( inst.ei_max > inst.i_total )
      fail( "ei_max exceeds i_total" );
    if ( inst.kind == arch::three_ram && inst.t_state_max < 1 )
      fail( "t_state_max must be positive" );
    break;
  case arch::m_ram:
  {
    if ( inst.t_max < 1 )
      fail( "t_max must be positive" );
    if ( inst.stes.empty() )
      fail( "at least one STE is required" );
    std::size_t capacity = 0;
    for ( std::size_t i = 0; i < inst.stes.size(); ++i )
    {
      const auto& s = inst.stes[i];
      if ( s.pseudo_states < 2 )
        fail( "STE " + std::to_string( i ) + " needs at least 2 pseudo states" );
      if ( s.ei > inst.i_total )
        fail( "STE " + std::to_string( i ) + " targets more inputs than i_total" );
      if ( i > 0 && inst.stes[i - 1].ei > s.ei )
        fail( "STEs must be sorted ascending by ei" );
      capacity += s.pseudo_states;
    }
    if ( capacity < inst.s_total )
      fail( "STE pseudo states cannot hold s_total states" );
    break;
  }
  }
}

namespace detail
{

inline std::uint64_t pow2( std::uint64_t k )
{
  if ( k >= 63 )
  {
    throw error( error_kind::capacity, "RAM depth 2^" + std::to_string( k ) + " is not representable" );
  }
  return std::uint64_t{ 1 } << k;
}

} // namespace detail

/// Every RAM of the instance, in bitstream section order.
inline std::vector<ram_shape> ram_shapes( const instance_spec& inst )
{
  validate( inst );
  using detail::pow2;
  const std::uint64_t sbits = inst.state_bits();
  const std::uint64_t ibits = inst.input_bits();
  const std::uint64_t code_width = sbits + inst.o_total;
  std::vector<ram_shape> shapes;

  switch ( inst.kind )
  {
  case arch::one_ram:
    shapes.push_back( { "state_transition", pow2( sbits + inst.i_total ), code_width } );
    break;
  case arch::two_ram:
    shapes.push_back( { "input_select", pow2( sbits ), inst.ei_max * ibits } );
    shapes.push_back( { "state_transition", pow2( sbits + inst.ei_max ), code_width } );
    break;
  case arch::three_ram:
  {
    const std::uint64_t lbits = inst.local_transition_bits();
    shapes.push_back( { "input_select", pow2( sbits ), inst.ei_max * ibits } );
    shapes.push_back( { "state_transition", pow2( sbits + inst.ei_max ), lbits } );
    shapes.push_back( { "transition_code", pow2( sbits + lbits ), code_width } );
    break;
  }
  case arch::m_ram:
  {
    const std::uint64_t tbits = inst.transition_bits();
    shapes.push_back( { "state_map", pow2( sbits ), std::uint64_t{ inst.ps_bits() } + inst.ste_bits() } );
    shapes.push_back( { "transition_code", pow2( tbits ), code_width } );
    for ( std::size_t i = 0; i < inst.stes.size(); ++i )
    {
      const auto& s = inst.stes[i];
      const std::uint64_t pbits = clog2( s.pseudo_states );
      shapes.push_back( { "input_select_" + std::to_string( i ), pow2( pbits ), s.ei * ibits } );
      shapes.push_back( { "state_transition_" + std::to_string( i ), pow2( pbits + s.ei ), tbits } );
    }
    break;
  }
  }
  return shapes;
}

inline std::uint64_t total_bits( const instance_spec& inst )
{
  std::uint64_t sum = 0;
  for ( const auto& r : ram_shapes( inst ) )
  {
    sum += r.bits();
  }
  return sum;
}

namespace detail
{

/// Places states (given by EI count) into STE pseudo-state slots: states by
/// EI descending, ties by index; each goes to the lowest-EI STE that is wide
/// enough and still has room.  Placing the most constrained states first
/// into the narrowest adequate STE never blocks a later, narrower state, so
/// this succeeds whenever any placement exists.
inline std::optional<std::vector<std::pair<std::size_t, std::size_t>>> greedy_assign( const std::vector<std::size_t>& ei, const std::vector<ste_spec>& stes )
{
  std::vector<std::size_t> order( ei.size() );
  std::iota( order.begin(), order.end(), std::size_t{ 0 } );
  std::stable_sort( order.begin(), order.end(), [&]( auto a, auto b ) { return ei[a] > ei[b]; } );

  std::vector<std::size_t> used( stes.size(), 0 );
  std::vector<std::pair<std::size_t, std::size_t>> slot( ei.size() );
  for ( auto s : order )
  {
    std::optional<std::size_t> best;
    for ( std::size_t k = 0; k < stes.size(); ++k )
    {
      if ( stes[k].ei >= ei[s] && used[k] < stes[k].pseudo_states && ( !best || stes[k].ei < stes[*best].ei ) )
      {
        best = k;
      }
    }
    if ( !best )
    {
      return std::nullopt;
    }
    slot[s] = { *best, used[*best]++ };
  }
  return slot;
}

} // namespace detail

struct host_check
{
  bool ok = true;
  std::string reason;

  explicit operator bool() const { return ok; }
};

/// Whether `inst` can be configured to realize a machine with profile `prof`.
inline host_check hostable( const instance_spec& inst, const fsm_profile& prof )
{
  try
  {
    validate( inst );
  }
  catch ( const error& e )
  {
    return { false, e.what() };
  }
  auto too_small = [&]( const char* field, std::size_t have, std::size_t need ) -> host_check {
    return { false, std::string( field ) + ": instance supports " + std::to_string( have ) + ", machine needs " + std::to_string( need ) };
  };
  if ( inst.s_total < prof.s_total )
    return too_small( "s_total", inst.s_total, prof.s_total );
  if ( inst.i_total < prof.i_total )
    return too_small( "i_total", inst.i_total, prof.i_total );
  if ( inst.o_total < prof.o_total )
    return too_small( "o_total", inst.o_total, prof.o_total );

  switch ( inst.kind )
  {
  case arch::one_ram:
    break;
  case arch::three_ram:
    if ( inst.t_state_max < prof.t_state_max )
      return too_small( "t_state_max", inst.t_state_max, prof.t_state_max );
    [[fallthrough]];
  case arch::two_ram:
    if ( inst.ei_max < prof.ei_max )
      return too_small( "ei_max", inst.ei_max, prof.ei_max );
    break;
  case arch::m_ram:
    if ( inst.t_max < prof.t_max )
      return too_small( "t_max", inst.t_max, prof.t_max );
    if ( !detail::greedy_assign( prof.ei_multiset(), inst.stes ) )
      return { false, "no STE assignment: the machine's effective-input profile does not fit the STE layout" };
    break;
  }
  return {};
}

/// Textual instance configuration: `arch`, scalar fields, then one
/// `ste <ei> <pseudo_states>` line per STE.
inline std::string write_instance( const instance_spec& inst )
{
  std::ostringstream os;
  os << "arch " << to_string( inst.kind ) << '\n'
     << "s_total " << inst.s_total << '\n'
     << "i_total " << inst.i_total << '\n'
     << "o_total " << inst.o_total << '\n'
     << "t_max " << inst.t_max << '\n'
     << "t_state_max " << inst.t_state_max << '\n'
     << "ei_max " << inst.ei_max << '\n';
  for ( const auto& s : inst.stes )
  {
    os << "ste " << s.ei << ' ' << s.pseudo_states << '\n';
  }
  return os.str();
}

inline instance_spec read_instance( std::string_view text )
{
  instance_spec inst;
  bool have_arch = false;
  std::istringstream is{ std::string( text ) };
  std::string line;
  std::size_t line_no = 0;
  auto number = [&]( const std::string& tok ) -> std::size_t {
    if ( tok.empty() || tok.find_first_not_of( "0123456789" ) != std::string::npos )
    {
      throw error( error_kind::parse, "instance line " + std::to_string( line_no ) + ": expected a number, got '" + tok + "'" );
    }
    return std::stoull( tok );
  };
  while ( std::getline( is, line ) )
  {
    ++line_no;
    if ( auto hash = line.find( '#' ); hash != std::string::npos )
    {
      line.resize( hash );
    }
    std::istringstream ls( line );
    std::string key, a, b, extra;
    if ( !( ls >> key ) )
    {
      continue;
    }
    ls >> a >> b >> extra;
    if ( key == "ste" )
    {
      if ( b.empty() || !extra.empty() )
        throw error( error_kind::parse, "instance line " + std::to_string( line_no ) + ": expected 'ste <ei> <pseudo_states>'" );
      inst.stes.push_back( { number( a ), number( b ) } );
      continue;
    }
    if ( a.empty() || !b.empty() )
      throw error( error_kind::parse, "instance line " + std::to_string( line_no ) + ": expected '<key> <value>'" );
    if ( key == "arch" )
    {
      inst.kind = arch_from_string( a );
      have_arch = true;
    }
    else if ( key == "s_total" )
      inst.s_total = number( a );
    else if ( key == "i_total" )
      inst.i_total = number( a );
    else if ( key == "o_total" )
      inst.o_total = number( a );
    else if ( key == "t_max" )
      inst.t_max = number( a );
    else if ( key == "t_state_max" )
      inst.t_state_max = number( a );
    else if ( key == "ei_max" )
      inst.ei_max = number( a );
    else
      throw error( error_kind::parse, "instance line " + std::to_string( line_no ) + ": unknown key '" + key + "'" );
  }
  if ( !have_arch )
  {
    throw error( error_kind::parse, "instance config has no arch line" );
  }
  std::stable_sort( inst.stes.begin(), inst.stes.end(), []( const auto& x, const auto& y ) { return x.ei < y.ei; } );
  validate( inst );
  return inst;
}

} // namespace fsmov
