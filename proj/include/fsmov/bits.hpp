#pragma once

#include "error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fsmov
{

using bit_vector = std::vector<bool>;
using state_id = std::uint32_t;

/// Smallest k with 2^k >= n.  clog2(1) == 0.
constexpr unsigned clog2( std::uint64_t n )
{
  if ( n == 0 )
  {
    throw std::invalid_argument( "clog2 of zero" );
  }
  unsigned k = 0;
  while ( ( std::uint64_t{ 1 } << k ) < n )
  {
    ++k;
  }
  return k;
}

/// Leftmost character is bit 0.
inline std::string to_string( const bit_vector& bits )
{
  std::string s;
  s.reserve( bits.size() );
  for ( bool b : bits )
  {
    s.push_back( b ? '1' : '0' );
  }
  return s;
}

inline bit_vector bits_from_string( std::string_view s )
{
  bit_vector bits;
  bits.reserve( s.size() );
  for ( char c : s )
  {
    if ( c != '0' && c != '1' )
    {
      throw error( error_kind::parse, "invalid bit character '" + std::string( 1, c ) + "'" );
    }
    bits.push_back( c == '1' );
  }
  return bits;
}

/// Bit j of `value` becomes element j.
inline bit_vector bits_from_uint( std::uint64_t value, std::size_t width )
{
  bit_vector bits( width );
  for ( std::size_t j = 0; j < width && j < 64; ++j )
  {
    bits[j] = ( value >> j ) & 1u;
  }
  return bits;
}

inline std::uint64_t bits_to_uint( const bit_vector& bits )
{
  std::uint64_t v = 0;
  for ( std::size_t j = 0; j < bits.size() && j < 64; ++j )
  {
    if ( bits[j] )
    {
      v |= std::uint64_t{ 1 } << j;
    }
  }
  return v;
}

} // namespace fsmov
