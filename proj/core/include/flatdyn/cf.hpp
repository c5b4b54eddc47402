#pragma once

#include <optional>
#include <vector>

#include "flatdyn/scalar.hpp"
#include "flatdyn/vec2.hpp"

namespace flatdyn {

// Convergent vectors r_n = (q_n, p_n) stored exactly as big integers on
// every backend; only comparisons against alpha go through the scalar type.
using IVec = Vec2<BigInt>;

struct Convergent {
  int n = -2;             // index; r_{-2} = (1,0), r_{-1} = (0,1)
  BigInt a = 0;           // partial quotient a_n (n >= 0)
  IVec r{1, 0};           // r_n
  IVec r_prev{0, 1};      // r_{n-1}
  IVec r_prime() const { return r + r_prev; }
  Rational slope() const { return Rational(r.y) / Rational(r.x); }
};

// det ordering against alpha_hat = (1, alpha): sign of q*alpha - p.
template <class S>
int det_sign_alpha(const IVec& v, const S& alpha, const char* what) {
  S t = S(S(scalar_traits<S>::from_rational(Rational(v.x)) * alpha) -
          scalar_traits<S>::from_rational(Rational(v.y)));
  return sign_or_fail<S>(t, what);
}

// Continued fraction of alpha > 0 by the classical digit recursion
// a_n = floor(x_n), x_{n+1} = 1/(x_n - a_n); exact termination on the
// rational backend, refusal near integer boundaries on float backends.
template <class S>
std::vector<Convergent> cf_expand(const S& alpha, int depth) {
  if (sign_or_fail<S>(alpha, "cf_expand alpha") <= 0)
    fail(Errc::validation, "cf_expand: alpha must be positive");
  if (depth < 1) fail(Errc::validation, "cf_expand: depth must be >= 1");

  std::vector<Convergent> out;
  IVec rm2{1, 0}, rm1{0, 1};
  S x = alpha;
  for (int n = 0; n < depth; ++n) {
    BigInt a = scalar_traits<S>::floor(x);
    S frac = S(x - scalar_traits<S>::from_rational(Rational(a)));
    if (!scalar_traits<S>::is_exact) {
      // near-integer x: the digit itself is uncertain
      S hi = S(S(1) - frac);
      if (zero_test<S>(frac) == Sign::uncertain ||
          zero_test<S>(hi) == Sign::uncertain)
        fail(Errc::uncertain, "cf_expand: digit boundary within epsilon");
    }
    if (n > 0 && a < 1) fail(Errc::structure, "cf_expand: nonpositive digit");
    Convergent c;
    c.n = n;
    c.a = a;
    c.r = rm1 * a + rm2;
    c.r_prev = rm1;
    out.push_back(c);
    rm2 = rm1;
    rm1 = c.r;
    if (scalar_traits<S>::sign(frac) == Sign::zero) break; // rational alpha
    x = S(S(1) / frac);
  }
  return out;
}

// Atom of the CF filtration at r_n: the open interval between the slopes of
// r_n and r'_n, of length 1/(q_n q'_n).
struct AtomInterval {
  Rational lo, hi;
  Rational length() const { return hi - lo; }
};

inline AtomInterval atom_interval(const Convergent& c) {
  IVec rp = c.r_prime();
  if (c.r.x <= 0 || rp.x <= 0)
    fail(Errc::validation, "atom_interval: nonpositive denominator");
  Rational s1 = Rational(c.r.y) / Rational(c.r.x);
  Rational s2 = Rational(rp.y) / Rational(rp.x);
  AtomInterval I{s1 < s2 ? s1 : s2, s1 < s2 ? s2 : s1};
  return I;
}

// ---------------------------------------------------------------------------
// Filtration decomposition of a bounded interval J in R_+.
// Q_n atoms are the maximal intervals on which the digits a_0..a_n are
// constant; they are enumerated exactly by descending the digit tree into
// atoms that meet J. J_n is the union of level-n atoms contained in the
// uncovered remainder, i(J) the first level where that is nonempty, and
// G_n the uncovered remainder after level n.
// ---------------------------------------------------------------------------
struct FiltrationLevel {
  int n;
  std::vector<AtomInterval> pieces; // atoms making up J_n
  Rational covered{0};              // |J_0| + ... + |J_n|
  Rational leftover{0};             // |G_n|
};

struct Filtration {
  int i_J = -1;
  std::vector<FiltrationLevel> levels;
};

namespace cf_detail {

// Children of a digit-tree node: appending digit a yields
// r_new = a*r + r_prev with the parent (r, r_prev) roles shifting.
struct Node {
  IVec r, r_prev;
  int level; // index n of r
};

inline AtomInterval node_atom(const Node& nd) {
  Convergent c;
  c.r = nd.r;
  c.r_prev = nd.r_prev;
  return atom_interval(c);
}

inline bool intervals_meet(const Rational& lo1, const Rational& hi1,
                           const Rational& lo2, const Rational& hi2) {
  return lo1 < hi2 && lo2 < hi1;
}

} // namespace cf_detail

inline Filtration filtration_decompose(const Rational& jlo, const Rational& jhi,
                                       int depth, long long atom_budget = 200000) {
  if (!(jlo >= 0) || !(jhi > jlo))
    fail(Errc::validation, "filtration_decompose: need 0 <= lo < hi");
  if (depth < 1) fail(Errc::validation, "filtration_decompose: depth >= 1");

  Filtration out;
  Rational jlen = jhi - jlo;
  Rational covered(0);

  // remainder tracked as a sorted list of disjoint open intervals
  std::vector<std::pair<Rational, Rational>> rem{{jlo, jhi}};
  std::vector<cf_detail::Node> frontier;
  // level 0 atoms (a_0, a_0+1) meeting J
  for (BigInt a = Rational(jlo).convert_to<BigInt>();; ++a) {
    Rational lo(a), hi(a + 1);
    if (lo >= jhi) break;
    if (hi <= jlo) continue;
    frontier.push_back({IVec{1, a}, IVec{0, 1}, 0});
  }

  long long atoms_seen = 0;
  // tail runs flushed from the previous level: unions of all remaining
  // children of a node, each a countable pile of same-level atoms inside
  // one remainder piece, recorded as a single interval
  std::vector<AtomInterval> pending;
  for (int n = 0; n < depth; ++n) {
    FiltrationLevel lvl;
    lvl.n = n;
    for (auto& I : pending) {
      lvl.pieces.push_back(I);
      covered += I.length();
    }
    pending.clear();
    std::vector<cf_detail::Node> next;
    for (auto& nd : frontier) {
      if (++atoms_seen > atom_budget)
        fail(Errc::budget, "filtration_decompose: atom budget exceeded");
      AtomInterval I = cf_detail::node_atom(nd);
      // contained in some remainder piece -> goes to J_n; else split deeper
      bool used = false;
      for (auto& [rlo, rhi] : rem) {
        if (I.lo >= rlo && I.hi <= rhi) {
          lvl.pieces.push_back(I);
          covered += I.length();
          used = true;
          break;
        }
      }
      if (used) continue;
      bool meets = false;
      for (auto& [rlo, rhi] : rem)
        if (cf_detail::intervals_meet(I.lo, I.hi, rlo, rhi)) { meets = true; break; }
      if (!meets) continue;
      // descend: children digits a >= 1. Children atoms tile the parent
      // atom, marching monotonically toward tip = slope(r); everything from
      // the current child onward lives between it and the tip.
      Rational tip = Rational(nd.r.y) / Rational(nd.r.x);
      for (BigInt a = 1;; ++a) {
        cf_detail::Node ch{nd.r * a + nd.r_prev, nd.r, n + 1};
        AtomInterval cI = cf_detail::node_atom(ch);
        Rational tlo = tip < cI.lo ? tip : cI.lo;
        Rational thi = tip > cI.hi ? tip : cI.hi;
        // whole remaining tail sits inside one remainder piece: its atoms
        // are exactly the level n+1 atoms filling (tlo, thi); when the
        // remainder boundary touches the tip there are infinitely many, so
        // record their union once for the next level instead of enumerating
        bool tail_done = false;
        for (auto& [rlo, rhi] : rem)
          if (tlo >= rlo && thi <= rhi) { tail_done = true; break; }
        if (tail_done) {
          pending.push_back(AtomInterval{tlo, thi});
          break;
        }
        bool child_meets = false;
        for (auto& [rlo, rhi] : rem)
          if (cf_detail::intervals_meet(cI.lo, cI.hi, rlo, rhi)) {
            child_meets = true;
            break;
          }
        if (child_meets) {
          next.push_back(ch);
        } else {
          // region strictly past this child toward the tip
          Rational slo = tip < cI.lo ? tip : cI.hi;
          Rational shi = tip < cI.lo ? cI.lo : tip;
          bool ahead = false;
          for (auto& [rlo, rhi] : rem)
            if (cf_detail::intervals_meet(slo, shi, rlo, rhi)) { ahead = true; break; }
          if (!ahead) break;
        }
        if (a > 1000000)
          fail(Errc::budget, "filtration_decompose: digit budget exceeded");
      }
    }
    // subtract the covered atoms from the remainder
    for (auto& I : lvl.pieces) {
      std::vector<std::pair<Rational, Rational>> nr;
      for (auto& [rlo, rhi] : rem) {
        if (I.hi <= rlo || I.lo >= rhi) {
          nr.emplace_back(rlo, rhi);
          continue;
        }
        if (rlo < I.lo) nr.emplace_back(rlo, I.lo);
        if (I.hi < rhi) nr.emplace_back(I.hi, rhi);
      }
      rem = std::move(nr);
    }
    lvl.covered = covered;
    Rational left(0);
    for (auto& [rlo, rhi] : rem) left += rhi - rlo;
    lvl.leftover = left;
    if (!lvl.pieces.empty() && out.i_J < 0) out.i_J = n;
    out.levels.push_back(std::move(lvl));
    frontier = std::move(next);
    if (rem.empty() && pending.empty()) break;
  }
  if (out.i_J < 0)
    fail(Errc::budget, "filtration_decompose: depth too small to locate i(J)");
  (void)jlen;
  return out;
}

} // namespace flatdyn
