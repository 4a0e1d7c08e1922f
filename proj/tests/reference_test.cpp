#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fsmov;
using namespace fsmov::testing;

TEST( Canonicalize, ChainMachineGetsOneDefaultPerState )
{
  auto fsm = load( "chain.kiss" );
  EXPECT_FALSE( fsm.coverage_complete );
  auto defaults = fsm.default_cubes();
  ASSERT_EQ( defaults.size(), 5u );
  for ( state_id s = 0; s < 5; ++s )
  {
    EXPECT_EQ( defaults[s].src, s );
    EXPECT_EQ( defaults[s].dst, s );
  }
}

TEST( Canonicalize, FullyCoveredStateHasNoDefault )
{
  auto fsm = canonicalize( parse_kiss( ".i 2\n.o 1\n-- a b 1\n0- b a 0\n1- b b 1\n" ) );
  EXPECT_TRUE( fsm.coverage_complete );
  EXPECT_TRUE( fsm.default_cubes().empty() );
}

TEST( Canonicalize, ConflictingOverlapIsRejected )
{
  try
  {
    canonicalize( parse_kiss( ".i 2\n.o 1\n1- s0 s1 0\n11 s0 s2 0\n" ) );
    FAIL() << "expected an ambiguity error";
  }
  catch ( const error& e )
  {
    EXPECT_EQ( e.kind(), error_kind::ambiguity );
    std::string what = e.what();
    EXPECT_NE( what.find( "s0" ), std::string::npos );
    EXPECT_NE( what.find( "1- s0 s1 0" ), std::string::npos );
    EXPECT_NE( what.find( "11 s0 s2 0" ), std::string::npos );
  }
}

TEST( Canonicalize, ConsistentOverlapAndOutputDontCares )
{
  auto fsm = load( "overlap.kiss" );
  for ( const auto& c : fsm.base.cubes )
  {
    EXPECT_EQ( c.outputs.find( '-' ), std::string::npos );
  }
  EXPECT_FALSE( fsm.has_default[0] ); // a: 1--- and 0--- cover everything
  EXPECT_FALSE( fsm.has_default[1] ); // b: ----
  EXPECT_TRUE( fsm.has_default[2] );
  EXPECT_TRUE( fsm.has_default[3] );
}

// Brute-force coverage oracle: enumerate all input vectors.
static bool covered_by_enumeration( const canonical_fsm& fsm, state_id s )
{
  const auto n = fsm.num_inputs();
  for ( std::uint64_t x = 0; x < ( std::uint64_t{ 1 } << n ); ++x )
  {
    bool hit = false;
    for ( auto ci : fsm.state_cubes[s] )
    {
      const auto& p = fsm.base.cubes[ci].inputs;
      bool m = true;
      for ( std::size_t j = 0; j < n; ++j )
        if ( p[j] != '-' && ( p[j] == '1' ) != bool( ( x >> j ) & 1 ) )
          m = false;
      hit = hit || m;
    }
    if ( !hit )
      return false;
  }
  return true;
}

TEST( Canonicalize, DefaultMatchesEnumeratedCoverage )
{
  std::mt19937 rng( 3 );
  for ( int trial = 0; trial < 300; ++trial )
  {
    std::string text = ".i 4\n.o 0\n";
    std::size_t rows = 1 + rng() % 8;
    for ( std::size_t r = 0; r < rows; ++r )
    {
      std::string p;
      for ( int j = 0; j < 4; ++j )
        p.push_back( "01--"[rng() % 4] );
      // one destination so no overlap can conflict
      text += p + " a a\n";
    }
    auto fsm = canonicalize( parse_kiss( text ) );
    EXPECT_EQ( !fsm.has_default[0], covered_by_enumeration( fsm, 0 ) ) << text;
  }
}

TEST( StepReference, ChainMachine )
{
  auto fsm = load( "chain.kiss" );
  EXPECT_EQ( step_reference( fsm, 0, in( "100000" ) ).next, 1u );
  EXPECT_EQ( step_reference( fsm, 0, in( "111111" ) ).next, 1u );
  EXPECT_EQ( step_reference( fsm, 4, in( "011111" ) ).next, 0u );
  EXPECT_EQ( step_reference( fsm, 4, in( "111111" ) ).next, 0u );
  EXPECT_EQ( step_reference( fsm, 4, in( "011110" ) ).next, 4u );
  EXPECT_EQ( step_reference( fsm, 2, in( "011111" ) ).next, 2u );
  EXPECT_TRUE( step_reference( fsm, 2, in( "000000" ) ).outputs.empty() );
}

TEST( StepReference, ArityMismatchThrows )
{
  auto fsm = load( "chain.kiss" );
  EXPECT_THROW( step_reference( fsm, 0, in( "10" ) ), error );
}

TEST( StepReference, TotalAndDeterministicOnFixtures )
{
  for ( const auto& name : fixture_names() )
  {
    auto fsm = load( name );
    if ( fsm.num_inputs() > 12 )
      continue;
    for ( state_id s = 0; s < fsm.num_states(); ++s )
    {
      for ( std::uint64_t x = 0; x < ( std::uint64_t{ 1 } << fsm.num_inputs() ); ++x )
      {
        auto v = bits_from_uint( x, fsm.num_inputs() );
        auto a = step_reference( fsm, s, v );
        auto b = step_reference( fsm, s, v );
        ASSERT_EQ( a, b );
        ASSERT_LT( a.next, fsm.num_states() );
        ASSERT_EQ( a.outputs.size(), fsm.num_outputs() );
      }
    }
  }
}

TEST( SimulateReference, ChainStimulus )
{
  auto fsm = load( "chain.kiss" );
  std::vector<bit_vector> stim{ in( "100000" ), in( "100000" ), in( "000000" ) };
  auto t = simulate_reference( fsm, stim );
  ASSERT_EQ( t.records.size(), 3u );
  EXPECT_EQ( t.records[0].state, 0u );
  EXPECT_EQ( t.records[1].state, 1u );
  EXPECT_EQ( t.records[2].state, 2u );
  EXPECT_EQ( step_reference( fsm, t.records[2].state, stim[2] ).next, 2u );
  for ( std::size_t i = 0; i < 3; ++i )
    EXPECT_EQ( t.records[i].cycle, i );
}

TEST( SimulateReference, EmptyStimulus )
{
  auto fsm = load( "chain.kiss" );
  EXPECT_TRUE( simulate_reference( fsm, std::vector<bit_vector>{} ).records.empty() );
}

TEST( SimulateReference, MealyOutputsOfSequenceDetector )
{
  auto fsm = load( "seqdet.kiss" );
  std::vector<bit_vector> stim;
  for ( char c : std::string( "1011011" ) )
    stim.push_back( bit_vector{ c == '1' } );
  auto t = simulate_reference( fsm, stim );
  std::string out;
  for ( const auto& r : t.records )
    out += r.outputs[0] ? '1' : '0';
  EXPECT_EQ( out, "0001001" );
}

TEST( SimulateReference, TenThousandRandomSteps )
{
  auto fsm = load( "wide_inputs.kiss" );
  std::mt19937_64 rng( 99 );
  std::vector<bit_vector> stim( 10000 );
  for ( auto& v : stim )
    v = bits_from_uint( rng(), fsm.num_inputs() );
  auto t = simulate_reference( fsm, stim );
  EXPECT_EQ( t.records.size(), 10000u );
  EXPECT_EQ( t.records.back().cycle, 9999u );
}

TEST( SimulateReference, LengthMismatch )
{
  auto fsm = load( "chain.kiss" );
  std::vector<bit_vector> stim{ in( "1" ) };
  EXPECT_THROW( simulate_reference( fsm, stim ), error );
}
