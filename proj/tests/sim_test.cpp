#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fsmov;
using namespace fsmov::testing;

namespace
{

verify_strategy strategy_for( const canonical_fsm& fsm )
{
  return fsm.num_inputs() <= 12 ? verify_strategy::exhaustive() : verify_strategy::random( 10000, 7 );
}

std::vector<bit_vector> random_stimulus( std::size_t n, std::size_t width, std::uint64_t seed )
{
  std::mt19937_64 rng( seed );
  std::vector<bit_vector> v( n, bit_vector( width ) );
  for ( auto& x : v )
    for ( std::size_t j = 0; j < width; ++j )
      x[j] = rng() & 1u;
  return v;
}

} // namespace

TEST( OverlaySim, LoadChecksShapes )
{
  auto fsm = load( "chain.kiss" );
  EXPECT_EQ( load( compile( fsm, arch::m_ram ) ).image().sections.size(), 6u );
  EXPECT_EQ( load( compile( fsm, arch::one_ram ) ).image().sections.size(), 1u );

  auto b = compile( fsm, arch::three_ram );
  b.sections.pop_back();
  EXPECT_THROW( load( b ), error );

  auto c = compile( fsm, arch::two_ram );
  c.inst.ei_max = 4;
  EXPECT_THROW( load( c ), error );
}

TEST( OverlaySim, ChainMachineSteps )
{
  auto fsm = load( "chain.kiss" );
  for ( auto a : all_archs )
  {
    auto sim = load( compile( fsm, a ) );
    EXPECT_EQ( sim.state(), 0u );
    sim.step( in( "100000" ) );
    EXPECT_EQ( sim.state(), 1u ) << to_string( a );
    sim.step( in( "011111" ) );
    EXPECT_EQ( sim.state(), 1u ) << to_string( a );
    for ( int k = 0; k < 3; ++k )
      sim.step( in( "100000" ) );
    EXPECT_EQ( sim.state(), 4u );
    sim.step( in( "111110" ) );
    EXPECT_EQ( sim.state(), 4u );
    sim.step( in( "011111" ) );
    EXPECT_EQ( sim.state(), 0u );
    EXPECT_THROW( sim.step( in( "1" ) ), error );
  }
}

TEST( OverlaySim, RunMatchesReference )
{
  auto fsm = load( "seqdet.kiss" );
  std::vector<bit_vector> stim;
  for ( char c : std::string( "1011011" ) )
    stim.push_back( { c == '1' } );
  for ( auto a : all_archs )
  {
    auto sim = load( compile( fsm, a ) );
    auto t = sim.run( stim );
    EXPECT_EQ( t, simulate_reference( fsm, stim ) );
    std::string outs;
    for ( const auto& r : t.records )
      outs += r.outputs[0] ? '1' : '0';
    EXPECT_EQ( outs, "0001001" );
    EXPECT_TRUE( sim.run( {} ).records.empty() );
  }
}

TEST( OverlaySim, LongRandomRun )
{
  for ( const auto& name : fixture_names() )
  {
    auto fsm = load( name );
    auto stim = random_stimulus( 10000, fsm.num_inputs(), 3 );
    auto expected = simulate_reference( fsm, stim );
    for ( auto a : all_archs )
    {
      if ( a == arch::one_ram && fsm.num_inputs() > 14 )
        continue; // 1-RAM image too large to be worth it here
      auto sim = load( compile( fsm, a ) );
      EXPECT_EQ( sim.run( stim ), expected ) << name << " " << to_string( a );
    }
  }
}

TEST( Verify, ChainMachineExhaustiveCount )
{
  auto fsm = load( "chain.kiss" );
  for ( auto a : all_archs )
  {
    auto v = verify_equivalence( fsm, compile( fsm, a ), verify_strategy::exhaustive() );
    EXPECT_TRUE( v.equivalent );
    EXPECT_EQ( v.states_checked, 5u );
    EXPECT_EQ( v.vectors_checked, 320u );
  }
}

TEST( Verify, CorruptedCodeIsCaught )
{
  auto fsm = load( "chain.kiss" );
  auto b = compile( fsm, arch::m_ram );
  auto& tc = b.sections[1];
  tc.set( 0, 0, tc.width(), 3 ); // s0 -> s1 now goes to s3
  auto v = verify_equivalence( fsm, b, verify_strategy::exhaustive() );
  ASSERT_FALSE( v.equivalent );
  ASSERT_TRUE( v.cex.has_value() );
  EXPECT_EQ( v.cex->state, 0u );
  EXPECT_EQ( v.cex->expected.next, 1u );
  EXPECT_EQ( v.cex->actual.next, 3u );

  auto r = verify_equivalence( fsm, b, verify_strategy::random( 1000, 5 ) );
  EXPECT_FALSE( r.equivalent );
}

TEST( Verify, AllFixturesAllArchitectures )
{
  for ( const auto& name : fixture_names() )
  {
    auto fsm = load( name );
    for ( auto a : all_archs )
    {
      auto v = verify_equivalence( fsm, compile( fsm, a ), strategy_for( fsm ) );
      EXPECT_TRUE( v.equivalent ) << name << " " << to_string( a );
      EXPECT_GT( v.vectors_checked, 0u );
    }
  }
}

TEST( Verify, Errors )
{
  auto fsm = load( "chain.kiss" );
  auto other = load( "seqdet.kiss" );
  try
  {
    verify_equivalence( other, compile( fsm, arch::m_ram ), verify_strategy::exhaustive() );
    FAIL();
  }
  catch ( const error& e )
  {
    EXPECT_EQ( e.kind(), error_kind::arity );
  }
  try
  {
    verify_equivalence( fsm, compile( fsm, arch::m_ram ), verify_strategy::exhaustive( 4 ) );
    FAIL();
  }
  catch ( const error& e )
  {
    EXPECT_EQ( e.kind(), error_kind::capacity );
  }
}

TEST( Verify, SameVerdictAcrossArchitectures )
{
  auto fsm = load( "arbiter.kiss" );
  auto stim = random_stimulus( 2000, fsm.num_inputs(), 11 );
  std::vector<trace> traces;
  for ( auto a : all_archs )
    traces.push_back( load( compile( fsm, a ) ).run( stim ) );
  for ( const auto& t : traces )
    EXPECT_EQ( t, traces.front() );
}

TEST( Verify, LoadDoesNotChangeImage )
{
  auto fsm = load( "traffic.kiss" );
  auto b = compile( fsm, arch::m_ram );
  auto sim = load( b );
  sim.run( random_stimulus( 500, fsm.num_inputs(), 2 ) );
  EXPECT_EQ( sim.image(), b );
}

TEST( Verify, EnvelopeInstanceHostsEveryMember )
{
  std::vector<canonical_fsm> fsms;
  std::vector<fsm_profile> profs;
  for ( auto n : { "multi_a.kiss", "multi_b.kiss", "multi_c.kiss", "seqdet.kiss" } )
  {
    fsms.push_back( load( n ) );
    profs.push_back( profile( fsms.back() ) );
  }
  for ( auto a : all_archs )
  {
    auto inst = tailor_multi( profs, a );
    for ( std::size_t k = 0; k < fsms.size(); ++k )
    {
      auto b = map_fsm( fsms[k], profs[k], inst );
      auto v = verify_equivalence( fsms[k], b, verify_strategy::exhaustive() );
      EXPECT_TRUE( v.equivalent ) << k << " " << to_string( a );
    }
  }
}

TEST( Verify, RandomMachines )
{
  std::mt19937_64 rng( 42 );
  for ( int trial = 0; trial < 40; ++trial )
  {
    const std::size_t ni = 1 + rng() % 6, no = rng() % 4, ns = 1 + rng() % 9;
    fsm_ir ir;
    ir.name = "r" + std::to_string( trial );
    ir.num_inputs = ni;
    ir.num_outputs = no;
    for ( std::size_t s = 0; s < ns; ++s )
      ir.states.push_back( "s" + std::to_string( s ) );
    // disjoint cubes: split on a per-state prefix of distinct variables
    for ( std::size_t s = 0; s < ns; ++s )
    {
      const std::size_t k = rng() % 3;
      for ( std::uint64_t p = 0; p < ( 1u << std::min( k, ni ) ); ++p )
      {
        if ( rng() % 4 == 0 )
          continue; // leave a hole for the default
        cube c;
        c.inputs = std::string( ni, '-' );
        for ( std::size_t j = 0; j < std::min( k, ni ); ++j )
          c.inputs[j] = ( p >> j ) & 1 ? '1' : '0';
        c.src = static_cast<state_id>( s );
        c.dst = static_cast<state_id>( rng() % ns );
        for ( std::size_t j = 0; j < no; ++j )
          c.outputs += "01-"[rng() % 3];
        ir.cubes.push_back( c );
      }
    }
    if ( ir.cubes.empty() )
      continue;
    auto fsm = canonicalize( ir );
    for ( auto a : all_archs )
    {
      auto v = verify_equivalence( fsm, compile( fsm, a ), verify_strategy::exhaustive() );
      EXPECT_TRUE( v.equivalent ) << trial << " " << to_string( a );
    }
  }
}
