#pragma once

#include <stdexcept>
#include <string>

namespace flatdyn {

// Every failure mode the library reports deliberately. Anything else escaping
// as a plain std::exception is a bug.
enum class Errc {
  validation,        // bad construction data (lengths, permutation, cone)
  backend,           // operation unavailable on this scalar backend
  singularity,       // orbit ran into a singular point
  uncertain,         // float comparison within epsilon, truth value unknown
  budget,            // configured work cap exhausted
  degenerate,        // degenerate configuration (zero displacement etc.)
  structure,         // internal invariant violated (walk left the atlas, ...)
  parse,             // malformed input text
};

class FlatError : public std::runtime_error {
public:
  FlatError(Errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw FlatError(c, msg); }

} // namespace flatdyn
