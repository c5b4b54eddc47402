#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flatdyn/scalar.hpp"
#include "flatdyn/suspension.hpp"

namespace flatdyn {

// Textual surface datum: key=value lines
//   d=2
//   pi=2 1
//   lambda=3 2
//   tau=1 -1
//   backend=rational        (optional; rational|float53|bigfloat)
// Numeric literals are decimals or fractions like 3/2; everything is kept
// exact here and converted at realization time.
struct SurfaceSpec {
  int d = 0;
  std::vector<int> pi;          // 1-based, pi[0] unused
  std::vector<Rational> lambda; // 1-based
  std::vector<Rational> tau;    // 1-based
  std::string backend = "rational";
};

// "3/2", "-7", "0.25" -> exact rational. Throws Errc::parse.
Rational parse_rational(const std::string& tok);
std::string rational_str(const Rational& x);

SurfaceSpec parse_surface(const std::string& text);
std::string emit_surface(const SurfaceSpec& s);
SurfaceSpec read_surface_file(const std::string& path);

// FNV-1a, used to stamp outputs with a hash of the generating config.
std::uint64_t fnv1a64(const std::string& text);

// Standard first line of every output file: config hash + seed.
std::string output_header(const std::string& config_text, std::uint64_t seed);

template <class S>
Surface<S> realize(const SurfaceSpec& spec) {
  std::vector<S> lam, tau;
  for (int i = 1; i <= spec.d; ++i) {
    lam.push_back(scalar_traits<S>::from_rational(spec.lambda[i]));
    tau.push_back(scalar_traits<S>::from_rational(spec.tau[i]));
  }
  std::vector<int> img(spec.pi.begin() + 1, spec.pi.end());
  return build_surface<S>(Permutation(img), std::move(lam), std::move(tau));
}

} // namespace flatdyn
