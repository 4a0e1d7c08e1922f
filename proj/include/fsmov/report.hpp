#pragma once

#include "analysis.hpp"
#include "instance.hpp"
#include "mapper.hpp"
#include "tailor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fsmov
{

/// A benchmark that either loaded or failed to load.
struct benchmark
{
  std::string name;
  std::optional<canonical_fsm> fsm;
  std::string error;
};

/// Whole-percent reduction of `mram` relative to `other`, 1 - mram/other,
/// truncated toward zero.
inline long long reduction_percent( std::uint64_t mram, std::uint64_t other )
{
  if ( other == 0 )
    return 0;
  const __int128 diff = static_cast<__int128>( other ) - static_cast<__int128>( mram );
  return static_cast<long long>( 100 * diff / static_cast<__int128>( other ) );
}

struct area_cell
{
  std::optional<std::uint64_t> bits;
  std::string error;
};

struct area_row
{
  std::string name;
  bool envelope = false;
  std::string error; // whole-row failure, e.g. a parse error
  std::vector<area_cell> cells; // parallel to area_table::archs

  std::optional<std::uint64_t> bits( std::size_t k ) const { return k < cells.size() ? cells[k].bits : std::nullopt; }
};

struct summary_row
{
  std::string name;
  std::vector<std::optional<double>> bits;
  std::optional<double> vs_three;
  std::optional<double> vs_two;
};

struct area_report
{
  std::vector<arch> archs;
  std::vector<area_row> rows;
  std::vector<summary_row> summary;

  std::optional<std::size_t> column( arch a ) const
  {
    for ( std::size_t k = 0; k < archs.size(); ++k )
      if ( archs[k] == a )
        return k;
    return std::nullopt;
  }

  std::optional<long long> reduction( const area_row& r, arch other ) const
  {
    auto m = column( arch::m_ram ), o = column( other );
    if ( !m || !o || !r.bits( *m ) || !r.bits( *o ) )
      return std::nullopt;
    return reduction_percent( *r.bits( *m ), *r.bits( *o ) );
  }
};

namespace detail
{

inline area_row size_row( const std::string& name, const fsm_profile& prof, const std::vector<arch>& archs, bool envelope )
{
  area_row row{ name, envelope, {}, {} };
  for ( auto a : archs )
  {
    area_cell cell;
    try
    {
      cell.bits = total_bits( tailor_single( prof, a ) );
    }
    catch ( const error& e )
    {
      cell.error = e.what();
    }
    row.cells.push_back( std::move( cell ) );
  }
  return row;
}

inline std::optional<double> mean( const std::vector<double>& v )
{
  if ( v.empty() )
    return std::nullopt;
  double s = 0;
  for ( double x : v )
    s += x;
  return s / static_cast<double>( v.size() );
}

inline std::optional<double> median( std::vector<double> v )
{
  if ( v.empty() )
    return std::nullopt;
  std::sort( v.begin(), v.end() );
  auto n = v.size();
  return n % 2 ? v[n / 2] : ( v[n / 2 - 1] + v[n / 2] ) / 2.0;
}

} // namespace detail

/// Total RAM bits of the minimal instance of each architecture, per
/// benchmark, with M-RAM reductions and summary rows.  With `multi`, one
/// extra row sizes an envelope instance hosting every loaded benchmark.
inline area_report area_table( const std::vector<benchmark>& benchmarks, const std::vector<arch>& archs, bool multi = false )
{
  area_report rep;
  rep.archs = archs;
  std::vector<fsm_profile> profiles;
  for ( const auto& b : benchmarks )
  {
    if ( !b.fsm )
    {
      rep.rows.push_back( { b.name, false, b.error.empty() ? "not loaded" : b.error, {} } );
      continue;
    }
    auto prof = profile( *b.fsm );
    rep.rows.push_back( detail::size_row( b.name, prof, archs, false ) );
    profiles.push_back( std::move( prof ) );
  }
  if ( multi && !profiles.empty() )
  {
    rep.rows.push_back( detail::size_row( "multi", envelope( profiles ), archs, true ) );
  }

  auto summarize = [&]( const std::string& name, const std::vector<const area_row*>& rows, bool use_median ) {
    summary_row s{ name, {}, {}, {} };
    auto agg = [&]( const std::vector<double>& v ) { return use_median ? detail::median( v ) : detail::mean( v ); };
    for ( std::size_t k = 0; k < archs.size(); ++k )
    {
      std::vector<double> v;
      for ( auto* r : rows )
        if ( r->bits( k ) )
          v.push_back( static_cast<double>( *r->bits( k ) ) );
      s.bits.push_back( agg( v ) );
    }
    for ( auto other : { arch::three_ram, arch::two_ram } )
    {
      std::vector<double> v;
      for ( auto* r : rows )
        if ( auto red = rep.reduction( *r, other ) )
          v.push_back( static_cast<double>( *red ) );
      ( other == arch::three_ram ? s.vs_three : s.vs_two ) = agg( v );
    }
    return s;
  };

  std::vector<const area_row*> singles, all;
  for ( const auto& r : rep.rows )
  {
    if ( !r.error.empty() )
      continue;
    all.push_back( &r );
    if ( !r.envelope )
      singles.push_back( &r );
  }
  // the trimmed average drops the single benchmark with the largest instance
  std::vector<const area_row*> trimmed = singles;
  if ( trimmed.size() > 1 )
  {
    auto largest = [&]( const area_row* r ) {
      std::uint64_t m = 0;
      for ( std::size_t k = 0; k < archs.size(); ++k )
        if ( r->bits( k ) )
          m = std::max( m, *r->bits( k ) );
      return m;
    };
    auto it = std::max_element( trimmed.begin(), trimmed.end(), [&]( auto* a, auto* b ) { return largest( a ) < largest( b ); } );
    trimmed.erase( it );
  }
  rep.summary.push_back( summarize( "average", singles, false ) );
  rep.summary.push_back( summarize( "median", singles, true ) );
  rep.summary.push_back( summarize( "trimmed average", trimmed, false ) );
  rep.summary.push_back( summarize( "total average", all, false ) );
  return rep;
}

enum class table_format
{
  markdown,
  csv
};

inline table_format table_format_from_string( std::string_view s )
{
  if ( s == "md" || s == "markdown" )
    return table_format::markdown;
  if ( s == "csv" )
    return table_format::csv;
  throw error( error_kind::parse, "unknown format '" + std::string( s ) + "'" );
}

namespace detail
{

inline std::string render_rows( const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows, table_format fmt )
{
  std::ostringstream os;
  auto emit = [&]( const std::vector<std::string>& cells ) {
    if ( fmt == table_format::csv )
    {
      for ( std::size_t k = 0; k < cells.size(); ++k )
        os << ( k ? "," : "" ) << cells[k];
      os << '\n';
    }
    else
    {
      os << '|';
      for ( const auto& c : cells )
        os << ' ' << c << " |";
      os << '\n';
    }
  };
  emit( header );
  if ( fmt == table_format::markdown )
  {
    os << '|';
    for ( std::size_t k = 0; k < header.size(); ++k )
      os << ( k == 0 ? " --- |" : " ---: |" );
    os << '\n';
  }
  for ( const auto& r : rows )
    emit( r );
  return os.str();
}

inline std::string fmt_percent( std::optional<long long> p )
{
  return p ? std::to_string( *p ) + "%" : "n/a";
}

} // namespace detail

inline std::string render( const area_report& rep, table_format fmt )
{
  std::vector<std::string> header{ "benchmark" };
  for ( auto a : rep.archs )
    header.push_back( std::string( to_string( a ) ) + " bits" );
  const bool red3 = rep.column( arch::m_ram ) && rep.column( arch::three_ram );
  const bool red2 = rep.column( arch::m_ram ) && rep.column( arch::two_ram );
  if ( red3 )
    header.push_back( "mram vs three" );
  if ( red2 )
    header.push_back( "mram vs two" );

  std::vector<std::vector<std::string>> rows;
  for ( const auto& r : rep.rows )
  {
    std::vector<std::string> cells{ r.name };
    if ( !r.error.empty() )
    {
      cells.push_back( "error: " + r.error );
      while ( cells.size() < header.size() )
        cells.emplace_back( "" );
      rows.push_back( std::move( cells ) );
      continue;
    }
    for ( std::size_t k = 0; k < rep.archs.size(); ++k )
      cells.push_back( r.bits( k ) ? std::to_string( *r.bits( k ) ) : "error" );
    if ( red3 )
      cells.push_back( detail::fmt_percent( rep.reduction( r, arch::three_ram ) ) );
    if ( red2 )
      cells.push_back( detail::fmt_percent( rep.reduction( r, arch::two_ram ) ) );
    rows.push_back( std::move( cells ) );
  }
  for ( const auto& s : rep.summary )
  {
    std::vector<std::string> cells{ s.name };
    for ( const auto& b : s.bits )
      cells.push_back( b ? std::to_string( static_cast<long long>( std::llround( *b ) ) ) : "n/a" );
    auto pct = [&]( const std::optional<double>& v ) { return detail::fmt_percent( v ? std::optional<long long>( static_cast<long long>( std::trunc( *v ) ) ) : std::nullopt ); };
    if ( red3 )
      cells.push_back( pct( s.vs_three ) );
    if ( red2 )
      cells.push_back( pct( s.vs_two ) );
    rows.push_back( std::move( cells ) );
  }
  return detail::render_rows( header, rows, fmt );
}

struct timing_cell
{
  std::optional<double> ms;
  std::string error;
};

struct timing_report_table
{
  std::vector<arch> archs;
  std::vector<std::string> names;
  std::vector<std::vector<timing_cell>> cells; // [benchmark][arch]
};

/// Median wall-clock time of profile + tailor + map, in milliseconds.
inline timing_cell time_compile( const canonical_fsm& fsm, arch kind, std::size_t repetitions, const map_options& opts = {} )
{
  std::vector<double> samples;
  for ( std::size_t r = 0; r < std::max<std::size_t>( repetitions, 1 ); ++r )
  {
    auto start = std::chrono::steady_clock::now();
    try
    {
      auto b = compile( fsm, kind, opts );
      (void)b;
    }
    catch ( const error& e )
    {
      return { std::nullopt, e.what() };
    }
    auto stop = std::chrono::steady_clock::now();
    samples.push_back( std::chrono::duration<double, std::milli>( stop - start ).count() );
  }
  return { detail::median( samples ), {} };
}

/// Timing runs are sequential so measurements do not interfere.
inline timing_report_table timing_report( const std::vector<benchmark>& benchmarks, const std::vector<arch>& archs, std::size_t repetitions, const map_options& opts = {} )
{
  timing_report_table t;
  t.archs = archs;
  for ( const auto& b : benchmarks )
  {
    t.names.push_back( b.name );
    std::vector<timing_cell> row;
    for ( auto a : archs )
    {
      if ( !b.fsm )
        row.push_back( { std::nullopt, b.error.empty() ? "not loaded" : b.error } );
      else
        row.push_back( time_compile( *b.fsm, a, repetitions, opts ) );
    }
    t.cells.push_back( std::move( row ) );
  }
  return t;
}

inline std::string render( const timing_report_table& t, table_format fmt )
{
  std::vector<std::string> header{ "benchmark" };
  for ( auto a : t.archs )
    header.push_back( std::string( to_string( a ) ) + " ms" );
  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<double>> per_arch( t.archs.size() );
  for ( std::size_t i = 0; i < t.names.size(); ++i )
  {
    std::vector<std::string> cells{ t.names[i] };
    for ( std::size_t k = 0; k < t.archs.size(); ++k )
    {
      const auto& c = t.cells[i][k];
      if ( c.ms )
      {
        std::ostringstream os;
        os.setf( std::ios::fixed );
        os.precision( 3 );
        os << *c.ms;
        cells.push_back( os.str() );
        per_arch[k].push_back( *c.ms );
      }
      else
      {
        cells.push_back( "error" );
      }
    }
    rows.push_back( std::move( cells ) );
  }
  std::vector<std::string> avg{ "average" };
  for ( const auto& v : per_arch )
  {
    auto m = detail::mean( v );
    std::ostringstream os;
    os.setf( std::ios::fixed );
    os.precision( 3 );
    if ( m )
      os << *m;
    else
      os << "n/a";
    avg.push_back( os.str() );
  }
  rows.push_back( std::move( avg ) );
  return detail::render_rows( header, rows, fmt );
}

/// Per-state effective inputs followed by the profile scalars.
inline std::string render_profile( const canonical_fsm& fsm, const fsm_profile& prof, table_format fmt )
{
  std::vector<std::vector<std::string>> rows;
  for ( const auto& p : prof.per_state )
  {
    std::string set;
    for ( auto j : p.effective_inputs )
      set += ( set.empty() ? "" : " " ) + std::to_string( j );
    rows.push_back( { fsm.base.states[p.state], fmt == table_format::csv ? set : "{" + set + "}", std::to_string( p.ei_count ) } );
  }
  std::ostringstream os;
  if ( fmt == table_format::markdown )
    os << "## " << fsm.base.name << "\n\n";
  os << detail::render_rows( { "state", "effective inputs", "ei" }, rows, fmt );
  const std::vector<std::pair<std::string, std::size_t>> scalars{
      { "s_total", prof.s_total }, { "i_total", prof.i_total }, { "o_total", prof.o_total }, { "ei_max", prof.ei_max }, { "t_max", prof.t_max }, { "t_state_max", prof.t_state_max } };
  if ( fmt == table_format::csv )
  {
    os << "\nfsm";
    for ( const auto& [k, v] : scalars )
      os << ',' << k;
    os << '\n' << fsm.base.name;
    for ( const auto& [k, v] : scalars )
      os << ',' << v;
    os << '\n';
  }
  else
  {
    os << '\n';
    for ( const auto& [k, v] : scalars )
      os << k << " = " << v << '\n';
  }
  return os.str();
}

/// Instance configuration followed by the size of each RAM and the total.
inline std::string render_instance( const instance_spec& inst, table_format fmt )
{
  std::vector<std::vector<std::string>> rows;
  for ( const auto& r : ram_shapes( inst ) )
    rows.push_back( { r.name, std::to_string( r.depth ), std::to_string( r.width ), std::to_string( r.bits() ) } );
  std::ostringstream os;
  os << write_instance( inst ) << '\n';
  os << detail::render_rows( { "ram", "depth", "width", "bits" }, rows, fmt );
  os << "total " << total_bits( inst ) << '\n';
  return os.str();
}

/// One line per cycle: `cycle=<i> in=<bits> state=<index> out=<bits>`.
inline std::string render_trace( const trace& t, table_format fmt )
{
  std::ostringstream os;
  if ( fmt == table_format::csv )
  {
    os << "cycle,in,state,out\n";
    for ( const auto& r : t.records )
      os << r.cycle << ',' << to_string( r.inputs ) << ',' << r.state << ',' << to_string( r.outputs ) << '\n';
    return os.str();
  }
  for ( const auto& r : t.records )
    os << "cycle=" << r.cycle << " in=" << to_string( r.inputs ) << " state=" << r.state << " out=" << to_string( r.outputs ) << '\n';
  return os.str();
}

} // namespace fsmov
