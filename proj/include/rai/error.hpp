#pragma once

#include <stdexcept>
#include <string>

namespace rai {

enum class ErrorKind {
  parse,      // malformed input document
  schema,     // schema or config refers to something that does not exist
  invariant,  // data violates a documented invariant
  argument,   // caller passed an out-of-range or inconsistent argument
  infeasible, // optimizer found no candidate meeting its constraint
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rai
