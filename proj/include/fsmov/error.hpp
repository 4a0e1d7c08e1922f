#pragma once

#include <stdexcept>
#include <string>

namespace fsmov
{

enum class error_kind
{
  parse,        // malformed KISS2, instance config or stimulus text
  ambiguity,    // conflicting overlapping cubes
  instance,     // instance fields inconsistent with the architecture
  hostability,  // FSM does not fit the instance
  capacity,     // mapping would exceed the configured bit cap
  bitstream,    // malformed or inconsistent bitstream
  arity         // vector or bitstream arity mismatch
};

inline const char* to_string( error_kind k )
{
  switch ( k )
  {
  case error_kind::parse: return "parse error";
  case error_kind::ambiguity: return "ambiguity error";
  case error_kind::instance: return "instance error";
  case error_kind::hostability: return "hostability error";
  case error_kind::capacity: return "capacity error";
  case error_kind::bitstream: return "bitstream error";
  case error_kind::arity: return "arity error";
  }
  return "error";
}

class error : public std::runtime_error
{
public:
  error( error_kind kind, const std::string& what )
      : std::runtime_error( what ), kind_( kind )
  {
  }

  error_kind kind() const noexcept { return kind_; }

private:
  error_kind kind_;
};

} // namespace fsmov
