#include <fsmov/fsmov.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace fsmov;

namespace
{

// exit codes
enum : int
{
  exit_ok = 0,
  exit_not_equivalent = 1,
  exit_usage = 2,
  exit_io = 3,
  exit_parse = 4,
  exit_ambiguous = 5,
  exit_hostability = 6,
  exit_capacity = 7,
  exit_other = 8
};

struct io_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string slurp( const std::string& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw io_error( "cannot open " + path );
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit( const std::string& path, const std::string& text )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out || !( out << text ) )
    throw io_error( "cannot write " + path );
}

canonical_fsm load_fsm( const std::string& path )
{
  return canonicalize( parse_kiss( slurp( path ), std::filesystem::path( path ).stem().string() ) );
}

map_options options_from_env()
{
  map_options o;
  if ( const char* cap = std::getenv( "OVL_BIT_CAP" ) )
  {
    try
    {
      std::size_t used = 0;
      o.bit_cap = std::stoull( cap, &used );
      if ( used != std::string_view( cap ).size() )
        throw std::invalid_argument( cap );
    }
    catch ( const std::exception& )
    {
      throw error( error_kind::parse, "OVL_BIT_CAP must be a non-negative integer" );
    }
  }
  return o;
}

int exit_code( error_kind k )
{
  switch ( k )
  {
  case error_kind::parse:
  case error_kind::bitstream:
    return exit_parse;
  case error_kind::ambiguity:
    return exit_ambiguous;
  case error_kind::hostability:
    return exit_hostability;
  case error_kind::capacity:
    return exit_capacity;
  default:
    return exit_other;
  }
}

std::vector<arch> parse_archs( const std::string& list )
{
  std::vector<arch> out;
  std::stringstream ss( list );
  std::string item;
  while ( std::getline( ss, item, ',' ) )
    if ( !item.empty() )
      out.push_back( arch_from_string( item ) );
  if ( out.empty() )
    throw error( error_kind::parse, "no architectures given" );
  return out;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "RAM-based FSM overlay toolkit" };
  app.require_subcommand( 1 );

  std::vector<std::string> files;
  std::string arch_name, instance_path, output, bitstream_path, stimulus_path, format = "text", archs_list = "one,two,three,mram";
  bool csv = false, exhaustive = false, multi = false;
  std::size_t random_steps = 0, reps = 5;
  std::uint64_t seed = 1;

  auto* analyze = app.add_subcommand( "analyze", "effective inputs and transition counts" );
  analyze->add_option( "files", files, "KISS2 files" )->required();
  analyze->add_flag( "--csv", csv, "CSV output" );

  auto* size = app.add_subcommand( "size", "minimal instance and its RAM sizes" );
  size->add_option( "--arch", arch_name, "one, two, three or mram" )->required();
  size->add_option( "files", files, "KISS2 files; several give a shared instance" )->required();
  size->add_flag( "--csv", csv, "CSV table" );

  auto* map = app.add_subcommand( "map", "compile a machine to a bitstream" );
  map->add_option( "--arch", arch_name, "one, two, three or mram" );
  map->add_option( "--instance", instance_path, "instance configuration file" );
  map->add_option( "files", files, "KISS2 file" )->required()->expected( 1 );
  map->add_option( "-o,--output", output, "bitstream file" )->required();

  auto* sim = app.add_subcommand( "sim", "run a bitstream on a stimulus" );
  sim->add_option( "--bitstream", bitstream_path )->required();
  sim->add_option( "--stimulus", stimulus_path )->required();
  sim->add_option( "--format", format, "text or csv" )->check( CLI::IsMember( { "text", "csv" } ) );

  auto* verify = app.add_subcommand( "verify", "check a compiled machine against the reference" );
  verify->add_option( "--arch", arch_name )->required();
  verify->add_option( "files", files, "KISS2 file" )->required()->expected( 1 );
  auto* ex = verify->add_flag( "--exhaustive", exhaustive, "all reachable states and input vectors (default)" );
  auto* rnd = verify->add_option( "--random", random_steps, "seeded random walk of N steps" );
  verify->add_option( "--seed", seed, "random walk seed" );
  ex->excludes( rnd );

  auto* report = app.add_subcommand( "report", "area or compile-time tables" );
  std::string what;
  report->add_option( "what", what, "area or time" )->required()->check( CLI::IsMember( { "area", "time" } ) );
  report->add_option( "files", files, "KISS2 files" )->required();
  report->add_option( "--archs", archs_list, "comma-separated architectures" );
  report->add_flag( "--multi", multi, "add a shared instance row" );
  report->add_option( "--format", format, "md or csv" )->check( CLI::IsMember( { "md", "markdown", "csv" } ) );
  report->add_option( "--reps", reps, "timing repetitions" )->check( CLI::PositiveNumber );

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::ParseError& e )
  {
    return app.exit( e ) == 0 ? exit_ok : exit_usage;
  }

  try
  {
    if ( *analyze )
    {
      for ( std::size_t k = 0; k < files.size(); ++k )
      {
        auto fsm = load_fsm( files[k] );
        std::cout << ( k ? "\n" : "" ) << render_profile( fsm, profile( fsm ), csv ? table_format::csv : table_format::markdown );
      }
    }
    else if ( *size )
    {
      std::vector<fsm_profile> profs;
      for ( const auto& f : files )
        profs.push_back( profile( load_fsm( f ) ) );
      auto inst = tailor_multi( profs, arch_from_string( arch_name ) );
      std::cout << render_instance( inst, csv ? table_format::csv : table_format::markdown );
    }
    else if ( *map )
    {
      auto fsm = load_fsm( files[0] );
      auto prof = profile( fsm );
      instance_spec inst;
      if ( !instance_path.empty() )
      {
        inst = read_instance( slurp( instance_path ) );
        if ( !arch_name.empty() && arch_from_string( arch_name ) != inst.kind )
          throw error( error_kind::instance, "--arch disagrees with the instance file" );
      }
      else
      {
        if ( arch_name.empty() )
          throw error( error_kind::parse, "map needs --arch or --instance" );
        inst = tailor_single( prof, arch_from_string( arch_name ) );
      }
      auto b = map_fsm( fsm, prof, inst, options_from_env() );
      spit( output, write_bitstream( b ) );
      std::cout << "wrote " << output << " (" << b.stored_bits() << " bits)\n";
    }
    else if ( *sim )
    {
      auto s = load( read_bitstream( slurp( bitstream_path ) ) );
      auto stim = parse_stimulus( slurp( stimulus_path ), s.num_inputs() );
      std::cout << render_trace( s.run( stim ), format == "csv" ? table_format::csv : table_format::markdown );
    }
    else if ( *verify )
    {
      auto fsm = load_fsm( files[0] );
      auto b = compile( fsm, arch_from_string( arch_name ), options_from_env() );
      auto strategy = *rnd ? verify_strategy::random( random_steps, seed ) : verify_strategy::exhaustive();
      auto v = verify_equivalence( fsm, b, strategy );
      if ( v.equivalent )
      {
        std::cout << "equivalent (" << v.vectors_checked << " checks)\n";
        return exit_ok;
      }
      const auto& c = *v.cex;
      std::cout << "not equivalent: state=" << fsm.base.states[c.state] << " in=" << to_string( c.inputs )
                << " expected next=" << c.expected.next << " out=" << to_string( c.expected.outputs )
                << " got next=" << c.actual.next << " out=" << to_string( c.actual.outputs ) << '\n';
      return exit_not_equivalent;
    }
    else if ( *report )
    {
      auto archs = parse_archs( archs_list );
      std::vector<benchmark> benches;
      for ( const auto& f : files )
      {
        benchmark b{ std::filesystem::path( f ).stem().string(), std::nullopt, {} };
        try
        {
          b.fsm = load_fsm( f );
        }
        catch ( const std::exception& e )
        {
          b.error = e.what();
        }
        benches.push_back( std::move( b ) );
      }
      auto fmt = format == "csv" ? table_format::csv : table_format::markdown;
      if ( what == "area" )
        std::cout << render( area_table( benches, archs, multi ), fmt );
      else
        std::cout << render( timing_report( benches, archs, reps, options_from_env() ), fmt );
    }
  }
  catch ( const io_error& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_io;
  }
  catch ( const error& e )
  {
    std::cerr << to_string( e.kind() ) << ": " << e.what() << '\n';
    return exit_code( e.kind() );
  }
  catch ( const std::exception& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_other;
  }
  return exit_ok;
}
