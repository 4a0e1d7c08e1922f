#pragma once

#include "error.hpp"
#include "instance.hpp"

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fsmov
{

/// One RAM image.  Words are packed densely: word `a` occupies bits
/// [a*width, (a+1)*width) of `data`, bit 0 of a word being its LSB.
class ram_section
{
public:
  ram_section() = default;

  explicit ram_section( ram_shape shape )
      : shape_( std::move( shape ) ), data_( ( shape_.bits() + 63 ) / 64, 0 )
  {
  }

  const ram_shape& shape() const { return shape_; }
  const std::string& name() const { return shape_.name; }
  std::uint64_t depth() const { return shape_.depth; }
  std::uint64_t width() const { return shape_.width; }

  /// Bits [lo, lo+len) of word `addr`; len <= 64.
  std::uint64_t get( std::uint64_t addr, std::uint64_t lo, std::uint64_t len ) const
  {
    if ( len == 0 )
      return 0;
    const std::uint64_t pos = addr * shape_.width + lo;
    const std::uint64_t limb = pos / 64, off = pos % 64;
    std::uint64_t v = data_[limb] >> off;
    if ( off + len > 64 )
    {
      v |= data_[limb + 1] << ( 64 - off );
    }
    return len == 64 ? v : v & ( ( std::uint64_t{ 1 } << len ) - 1 );
  }

  void set( std::uint64_t addr, std::uint64_t lo, std::uint64_t len, std::uint64_t value )
  {
    if ( len == 0 )
      return;
    const std::uint64_t pos = addr * shape_.width + lo;
    const std::uint64_t limb = pos / 64, off = pos % 64;
    const std::uint64_t mask = len == 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << len ) - 1;
    value &= mask;
    data_[limb] = ( data_[limb] & ~( mask << off ) ) | ( value << off );
    if ( off + len > 64 )
    {
      data_[limb + 1] = ( data_[limb + 1] & ~( mask >> ( 64 - off ) ) ) | ( value >> ( 64 - off ) );
    }
  }

  bool bit( std::uint64_t addr, std::uint64_t i ) const { return get( addr, i, 1 ) != 0; }

  void set_bit( std::uint64_t addr, std::uint64_t i, bool v )
  {
    const std::uint64_t pos = addr * shape_.width + i;
    const std::uint64_t mask = std::uint64_t{ 1 } << ( pos % 64 );
    if ( v )
      data_[pos / 64] |= mask;
    else
      data_[pos / 64] &= ~mask;
  }

  /// Whole word for widths up to 64 bits.
  std::uint64_t word( std::uint64_t addr ) const { return get( addr, 0, std::min<std::uint64_t>( shape_.width, 64 ) ); }

  bool same_word( std::uint64_t a, std::uint64_t b ) const
  {
    for ( std::uint64_t lo = 0; lo < shape_.width; lo += 64 )
    {
      auto len = std::min<std::uint64_t>( 64, shape_.width - lo );
      if ( get( a, lo, len ) != get( b, lo, len ) )
        return false;
    }
    return true;
  }

  /// ceil(width/4) hex digits, most significant first.  A zero-width word
  /// renders as a single "0".
  std::string hex( std::uint64_t addr ) const
  {
    static constexpr char digits[] = "0123456789abcdef";
    const std::uint64_t n = hex_digits();
    std::string s( n, '0' );
    for ( std::uint64_t d = 0; d < n && 4 * d < shape_.width; ++d )
    {
      auto len = std::min<std::uint64_t>( 4, shape_.width - 4 * d );
      s[n - 1 - d] = digits[get( addr, 4 * d, len )];
    }
    return s;
  }

  void set_hex( std::uint64_t addr, std::string_view text )
  {
    const std::uint64_t n = hex_digits();
    if ( text.size() != n )
    {
      throw error( error_kind::bitstream, "section " + name() + ": word '" + std::string( text ) + "' should have " + std::to_string( n ) + " hex digits" );
    }
    for ( std::uint64_t d = 0; d < n; ++d )
    {
      char c = text[n - 1 - d];
      unsigned v;
      if ( c >= '0' && c <= '9' )
        v = c - '0';
      else if ( c >= 'a' && c <= 'f' )
        v = c - 'a' + 10;
      else if ( c >= 'A' && c <= 'F' )
        v = c - 'A' + 10;
      else
        throw error( error_kind::bitstream, "section " + name() + ": invalid hex digit in '" + std::string( text ) + "'" );
      const std::uint64_t room = shape_.width > 4 * d ? std::min<std::uint64_t>( 4, shape_.width - 4 * d ) : 0;
      if ( ( v >> room ) != 0 )
      {
        throw error( error_kind::bitstream, "section " + name() + ": word '" + std::string( text ) + "' overflows width " + std::to_string( shape_.width ) );
      }
      set( addr, 4 * d, room, v );
    }
  }

  std::uint64_t hex_digits() const { return shape_.width == 0 ? 1 : ( shape_.width + 3 ) / 4; }

  bool operator==( const ram_section& ) const = default;

private:
  ram_shape shape_;
  std::vector<std::uint64_t> data_;
};

/// A compiled overlay configuration.  The header records the instance and
/// the machine's own arity, which may be smaller than the instance's.
struct bitstream
{
  std::string fsm_name;
  instance_spec inst;
  std::size_t fsm_states = 1;
  std::size_t fsm_inputs = 0;
  std::size_t fsm_outputs = 0;
  state_id reset = 0;
  std::vector<ram_section> sections;

  const ram_section& section( std::string_view name ) const
  {
    for ( const auto& s : sections )
      if ( s.name() == name )
        return s;
    throw error( error_kind::bitstream, "missing section " + std::string( name ) );
  }

  ram_section& section( std::string_view name )
  {
    return const_cast<ram_section&>( std::as_const( *this ).section( name ) );
  }

  std::uint64_t stored_bits() const
  {
    std::uint64_t n = 0;
    for ( const auto& s : sections )
      n += s.shape().bits();
    return n;
  }

  bool operator==( const bitstream& ) const = default;
};

inline constexpr std::string_view bitstream_magic = "OVLBITS v1";

inline std::string write_bitstream( const bitstream& b )
{
  std::string out;
  auto line = [&]( const std::string& s ) {
    out += s;
    out += '\n';
  };
  line( std::string( bitstream_magic ) );
  line( "fsm " + b.fsm_name );
  line( std::string( "arch " ) + to_string( b.inst.kind ) );
  line( "param s_total=" + std::to_string( b.inst.s_total ) );
  line( "param i_total=" + std::to_string( b.inst.i_total ) );
  line( "param o_total=" + std::to_string( b.inst.o_total ) );
  line( "param t_max=" + std::to_string( b.inst.t_max ) );
  line( "param t_state_max=" + std::to_string( b.inst.t_state_max ) );
  line( "param ei_max=" + std::to_string( b.inst.ei_max ) );
  line( "param fsm_states=" + std::to_string( b.fsm_states ) );
  line( "param fsm_inputs=" + std::to_string( b.fsm_inputs ) );
  line( "param fsm_outputs=" + std::to_string( b.fsm_outputs ) );
  line( "param reset=" + std::to_string( b.reset ) );
  for ( std::size_t i = 0; i < b.inst.stes.size(); ++i )
  {
    line( "ste " + std::to_string( i ) + " ei=" + std::to_string( b.inst.stes[i].ei ) + " ps=" + std::to_string( b.inst.stes[i].pseudo_states ) );
  }
  for ( const auto& s : b.sections )
  {
    line( "section " + s.name() + " depth=" + std::to_string( s.depth() ) + " width=" + std::to_string( s.width() ) );
    std::uint64_t a = 0;
    while ( a < s.depth() )
    {
      std::uint64_t run = 1;
      while ( a + run < s.depth() && s.same_word( a, a + run ) )
        ++run;
      if ( run >= 4 )
      {
        line( "rle " + std::to_string( run ) + " " + s.hex( a ) );
        a += run;
      }
      else
      {
        for ( std::uint64_t k = 0; k < run; ++k )
          line( s.hex( a + k ) );
        a += run;
      }
    }
  }
  line( "end" );
  return out;
}

namespace detail
{

inline std::uint64_t parse_u64( std::string_view s, std::string_view what )
{
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars( s.data(), s.data() + s.size(), v );
  if ( ec != std::errc() || p != s.data() + s.size() || s.empty() )
  {
    throw error( error_kind::bitstream, "malformed " + std::string( what ) + " '" + std::string( s ) + "'" );
  }
  return v;
}

inline std::string_view expect_prefix( std::string_view tok, std::string_view prefix )
{
  if ( tok.substr( 0, prefix.size() ) != prefix )
  {
    throw error( error_kind::bitstream, "expected '" + std::string( prefix ) + "...', got '" + std::string( tok ) + "'" );
  }
  return tok.substr( prefix.size() );
}

} // namespace detail

/// Parses the text form and checks every section against the shapes the
/// header's instance implies.
inline bitstream read_bitstream( std::string_view text )
{
  std::vector<std::string_view> lines;
  for ( std::size_t pos = 0; pos < text.size(); )
  {
    auto eol = text.find( '\n', pos );
    if ( eol == std::string_view::npos )
      eol = text.size();
    auto l = text.substr( pos, eol - pos );
    if ( !l.empty() && l.back() == '\r' )
      l.remove_suffix( 1 );
    lines.push_back( l );
    pos = eol + 1;
  }
  std::size_t ln = 0;
  auto next = [&]() -> std::string_view {
    if ( ln >= lines.size() )
      throw error( error_kind::bitstream, "unexpected end of bitstream" );
    return lines[ln++];
  };
  auto fail = [&]( const std::string& msg ) { throw error( error_kind::bitstream, "line " + std::to_string( ln ) + ": " + msg ); };

  if ( next() != bitstream_magic )
    fail( "unsupported bitstream version (expected '" + std::string( bitstream_magic ) + "')" );

  bitstream b;
  b.fsm_name = std::string( detail::expect_prefix( next(), "fsm " ) );
  b.inst.kind = arch_from_string( detail::expect_prefix( next(), "arch " ) );

  auto param = [&]( std::string_view key ) {
    auto l = detail::expect_prefix( next(), "param " );
    auto v = detail::expect_prefix( l, std::string( key ) + "=" );
    return detail::parse_u64( v, key );
  };
  b.inst.s_total = param( "s_total" );
  b.inst.i_total = param( "i_total" );
  b.inst.o_total = param( "o_total" );
  b.inst.t_max = param( "t_max" );
  b.inst.t_state_max = param( "t_state_max" );
  b.inst.ei_max = param( "ei_max" );
  b.fsm_states = param( "fsm_states" );
  b.fsm_inputs = param( "fsm_inputs" );
  b.fsm_outputs = param( "fsm_outputs" );
  b.reset = static_cast<state_id>( param( "reset" ) );

  while ( ln < lines.size() && lines[ln].substr( 0, 4 ) == "ste " )
  {
    auto toks = detail::split_ws( next() );
    if ( toks.size() != 4 || detail::parse_u64( toks[1], "STE index" ) != b.inst.stes.size() )
      fail( "malformed STE line" );
    b.inst.stes.push_back( { detail::parse_u64( detail::expect_prefix( toks[2], "ei=" ), "ei" ), detail::parse_u64( detail::expect_prefix( toks[3], "ps=" ), "ps" ) } );
  }

  try
  {
    validate( b.inst );
  }
  catch ( const error& e )
  {
    throw error( error_kind::bitstream, e.what() );
  }
  if ( b.fsm_states > b.inst.s_total || b.fsm_inputs > b.inst.i_total || b.fsm_outputs > b.inst.o_total || b.reset >= b.fsm_states )
    fail( "machine arity exceeds the instance" );

  for ( const auto& shape : ram_shapes( b.inst ) )
  {
    auto toks = detail::split_ws( next() );
    if ( toks.size() != 4 || toks[0] != "section" )
      fail( "expected section header for " + shape.name );
    auto depth = detail::parse_u64( detail::expect_prefix( toks[2], "depth=" ), "depth" );
    auto width = detail::parse_u64( detail::expect_prefix( toks[3], "width=" ), "width" );
    if ( toks[1] != shape.name || depth != shape.depth || width != shape.width )
    {
      fail( "shape mismatch: section " + std::string( toks[1] ) + " depth=" + std::to_string( depth ) + " width=" + std::to_string( width ) + ", instance expects " + shape.name + " depth=" + std::to_string( shape.depth ) + " width=" + std::to_string( shape.width ) );
    }
    ram_section sec( shape );
    std::uint64_t addr = 0;
    while ( addr < depth )
    {
      auto l = next();
      if ( l.substr( 0, 4 ) == "rle " )
      {
        auto t = detail::split_ws( l );
        if ( t.size() != 3 )
          fail( "malformed rle line" );
        auto count = detail::parse_u64( t[1], "run length" );
        if ( count == 0 || addr + count > depth )
          fail( "run overflows section " + shape.name );
        sec.set_hex( addr, t[2] );
        for ( std::uint64_t k = 1; k < count; ++k )
          for ( std::uint64_t lo = 0; lo < width; lo += 64 )
          {
            auto len = std::min<std::uint64_t>( 64, width - lo );
            sec.set( addr + k, lo, len, sec.get( addr, lo, len ) );
          }
        addr += count;
      }
      else
      {
        sec.set_hex( addr, l );
        ++addr;
      }
    }
    b.sections.push_back( std::move( sec ) );
  }
  if ( next() != "end" )
    fail( "expected 'end'" );
  while ( ln < lines.size() )
  {
    if ( !lines[ln++].empty() )
      fail( "trailing content after 'end'" );
  }
  return b;
}

} // namespace fsmov
