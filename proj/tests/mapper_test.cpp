#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace fsmov;
using namespace fsmov::testing;

namespace
{

struct compiled
{
  canonical_fsm fsm;
  fsm_profile prof;
  instance_spec inst;
  bitstream bits;
};

compiled build( const std::string& fixture, arch kind )
{
  auto fsm = load( fixture );
  auto prof = profile( fsm );
  auto inst = tailor_single( prof, kind );
  auto bits = map_fsm( fsm, prof, inst );
  return { std::move( fsm ), std::move( prof ), std::move( inst ), std::move( bits ) };
}

} // namespace

TEST( AssignStates, ChainMachine )
{
  auto prof = profile( load( "chain.kiss" ) );
  auto a = assign_states( prof, tailor_single( prof, arch::m_ram ) );
  using slot = assignment::slot;
  EXPECT_EQ( a.slots, ( std::vector<slot>{ { 0, 0 }, { 0, 1 }, { 0, 2 }, { 0, 3 }, { 1, 0 } } ) );
  EXPECT_EQ( a.padding_input, 0u );
}

TEST( AssignStates, SingleState )
{
  auto prof = profile( load( "single.kiss" ) );
  auto a = assign_states( prof, tailor_single( prof, arch::m_ram ) );
  ASSERT_EQ( a.slots.size(), 1u );
  EXPECT_EQ( a.slots[0], ( assignment::slot{ 0, 0 } ) );
}

TEST( AssignStates, NarrowStateReplicatedIntoWideSte )
{
  auto prof = profile( load( "chain.kiss" ) );
  auto inst = tailor_single( prof, arch::m_ram );
  inst.stes = { { 5, 8 } };
  auto a = assign_states( prof, inst );
  // the widest state is placed first
  EXPECT_EQ( a.slots[4], ( assignment::slot{ 0, 0 } ) );
  EXPECT_EQ( a.slots[0], ( assignment::slot{ 0, 1 } ) );
}

TEST( AssignStates, Unhostable )
{
  auto prof = profile( load( "chain.kiss" ) );
  auto inst = tailor_single( prof, arch::m_ram );
  inst.stes = { { 1, 4 }, { 4, 2 } };
  EXPECT_THROW( assign_states( prof, inst ), error );
}

TEST( MapMram, ChainMachineImage )
{
  auto c = build( "chain.kiss", arch::m_ram );
  const auto& b = c.bits;
  ASSERT_EQ( b.sections.size(), 6u );

  // state map: ps in the low 2 bits, STE index above
  const auto& smap = b.section( "state_map" );
  EXPECT_EQ( smap.width(), 3u );
  std::vector<std::uint64_t> sm;
  for ( int a = 0; a < 8; ++a )
    sm.push_back( smap.word( a ) );
  EXPECT_EQ( sm, ( std::vector<std::uint64_t>{ 0, 1, 2, 3, 4, 0, 0, 0 } ) );

  // transition codes: dst in the high bits (no outputs), first-appearance order
  const auto& tc = b.section( "transition_code" );
  std::vector<std::uint64_t> codes;
  for ( int a = 0; a < 8; ++a )
    codes.push_back( tc.word( a ) );
  EXPECT_EQ( codes, ( std::vector<std::uint64_t>{ 1, 0, 2, 3, 4, 0, 0, 0 } ) );

  // STE0, pseudo state 0 (state 0): A=0 -> index of ->s0 (1), A=1 -> ->s1 (0)
  const auto& st0 = b.section( "state_transition_0" );
  EXPECT_EQ( st0.word( ( 0 << 1 ) | 0 ), 1u );
  EXPECT_EQ( st0.word( ( 0 << 1 ) | 1 ), 0u );
  // state 3 (ps 3): A=1 -> ->s4 (index 4), A=0 -> ->s3 (index 3)
  EXPECT_EQ( st0.word( ( 3 << 1 ) | 1 ), 4u );
  EXPECT_EQ( st0.word( ( 3 << 1 ) | 0 ), 3u );

  // input selection: STE0 pseudo states select input A (0); STE1 ps0 selects B..F
  const auto& sel1 = b.section( "input_select_1" );
  for ( int k = 0; k < 5; ++k )
    EXPECT_EQ( sel1.get( 0, 3 * k, 3 ), std::uint64_t( k + 1 ) );

  // state 4: only slots all-ones returns to s0 (index 1); unused ps1 is zero
  const auto& st1 = b.section( "state_transition_1" );
  for ( std::uint64_t v = 0; v < 32; ++v )
    EXPECT_EQ( st1.word( v ), v == 31 ? 1u : 4u );
  for ( std::uint64_t v = 32; v < 64; ++v )
    EXPECT_EQ( st1.word( v ), 0u );
}

TEST( MapMram, ReplicationLaw )
{
  auto fsm = load( "chain.kiss" );
  auto prof = profile( fsm );
  auto inst = tailor_single( prof, arch::m_ram );
  inst.stes = { { 5, 8 } };
  auto b = map_mram( fsm, prof, inst );
  auto a = assign_states( prof, inst );
  const auto& st = b.section( "state_transition_0" );
  for ( state_id s = 0; s < 4; ++s )
  {
    const std::uint64_t base = std::uint64_t{ a.slots[s].pseudo_state } << 5;
    for ( std::uint64_t pad = 0; pad < 16; ++pad )
    {
      for ( std::uint64_t a0 = 0; a0 < 2; ++a0 )
      {
        EXPECT_EQ( st.word( base | ( pad << 1 ) | a0 ), st.word( base | a0 ) ) << "state " << s;
      }
    }
    EXPECT_NE( st.word( base | 0 ), st.word( base | 1 ) );
  }
}

TEST( Map3ram, ChainMachinePerStateCodes )
{
  auto c = build( "chain.kiss", arch::three_ram );
  const auto& tc = c.bits.section( "transition_code" );
  // state 0: local 0 -> s1, local 1 -> s0 (self-loop)
  EXPECT_EQ( tc.word( ( 0 << 1 ) | 0 ), 1u );
  EXPECT_EQ( tc.word( ( 0 << 1 ) | 1 ), 0u );
  EXPECT_EQ( tc.word( ( 4 << 1 ) | 0 ), 0u );
  EXPECT_EQ( tc.word( ( 4 << 1 ) | 1 ), 4u );
  const auto& st = c.bits.section( "state_transition" );
  EXPECT_EQ( st.width(), 1u );
  EXPECT_EQ( st.word( ( 0 << 5 ) | 1 ), 0u );
  EXPECT_EQ( st.word( ( 0 << 5 ) | 0 ), 1u );
}

TEST( Map2ram, BlocksArePeriodicInPaddingSlots )
{
  auto c = build( "chain.kiss", arch::two_ram );
  const auto& st = c.bits.section( "state_transition" );
  EXPECT_EQ( st.depth(), 8u * 32u );
  for ( std::uint64_t v = 0; v < 32; ++v )
    EXPECT_EQ( st.word( v ), st.word( v & 1 ) );
  EXPECT_EQ( st.word( 1 ), 1u << 0 ); // next = s1, no outputs
}

TEST( Map1ram, SingleStateWordsIdentical )
{
  auto c = build( "single.kiss", arch::one_ram );
  const auto& st = c.bits.section( "state_transition" );
  ASSERT_EQ( st.depth(), 2u );
  EXPECT_EQ( st.word( 0 ), st.word( 1 ) );
}

TEST( Map1ram, AddressIsStateThenInputs )
{
  auto c = build( "seqdet.kiss", arch::one_ram );
  const auto& st = c.bits.section( "state_transition" );
  // word = next (2 bits) above one output bit; got101 (code 3) on 1 -> got1 (1), out 1
  EXPECT_EQ( st.word( ( 3 << 1 ) | 1 ), ( 1u << 1 ) | 1u );
  EXPECT_EQ( st.word( ( 0 << 1 ) | 1 ), ( 1u << 1 ) | 0u );
}

TEST( Mapper, SectionsMatchInstanceShapes )
{
  for ( const auto& name : fixture_names() )
  {
    for ( auto a : all_archs )
    {
      auto c = build( name, a );
      auto shapes = ram_shapes( c.inst );
      ASSERT_EQ( c.bits.sections.size(), shapes.size() );
      for ( std::size_t k = 0; k < shapes.size(); ++k )
        EXPECT_EQ( c.bits.sections[k].shape(), shapes[k] );
      EXPECT_EQ( c.bits.stored_bits(), total_bits( c.inst ) );
    }
  }
}

TEST( Mapper, DeterministicBytes )
{
  for ( const auto& name : fixture_names() )
  {
    for ( auto a : all_archs )
    {
      auto x = write_bitstream( build( name, a ).bits );
      auto y = write_bitstream( build( name, a ).bits );
      EXPECT_EQ( x, y ) << name;
      EXPECT_EQ( read_bitstream( x ), build( name, a ).bits ) << name;
    }
  }
}

TEST( Mapper, GoldenChainBitstream )
{
  auto text = write_bitstream( build( "chain.kiss", arch::m_ram ).bits );
  EXPECT_EQ( text, read_file( fixture_path( "golden/chain_mram.ovl" ) ) );
}

TEST( Mapper, Errors )
{
  auto fsm = load( "wide_ei.kiss" );
  auto prof = profile( fsm );
  auto inst = tailor_single( prof, arch::one_ram );
  try
  {
    map_fsm( fsm, prof, inst, map_options{ 1000 } );
    FAIL();
  }
  catch ( const error& e )
  {
    EXPECT_EQ( e.kind(), error_kind::capacity );
  }
  inst.s_total = 2;
  try
  {
    map_fsm( fsm, prof, inst );
    FAIL();
  }
  catch ( const error& e )
  {
    EXPECT_EQ( e.kind(), error_kind::hostability );
  }
}
