#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "flatdyn/suspension.hpp"
#include "flatdyn/sweep.hpp"

namespace flatdyn {

struct Triple {
  int q = 2, p = 2;
  long long n = 0;
  bool operator==(const Triple& o) const {
    return q == o.q && p == o.p && n == o.n;
  }
};

enum class Orientation { up, down, horizontal };

template <class S> struct SaddleConnection {
  Triple triple;          // meaningful for up/down orientations
  Vec2<S> hol;
  S len2;                 // |hol|^2, exact on the rational backend
  std::pair<int, int> bundle; // (q,p); (0,0) for horizontal
  Orientation orient = Orientation::up;

  double length() const { return hol.norm_d(); }
};

// T^n u^b_q - u^t_p. Throws if the orbit hits a singularity first.
template <class S>
S displacement(const Iet<S>& T, const Triple& t) {
  if (t.q < 2 || t.q > T.d() || t.p < 2 || t.p > T.d() || t.n < 0)
    fail(Errc::validation, "triple indices out of range");
  S x = T.iterate(T.ub(t.q), t.n);
  return S(x - T.ut(t.p));
}

// Half the minimal gap between distinct singularities (u^t and u^b pooled).
template <class S>
S half_min_gap(const Iet<S>& T) {
  std::vector<S> u;
  for (int i = 1; i <= T.d() + 1; ++i) u.push_back(T.ut(i));
  for (int j = 2; j <= T.d(); ++j) u.push_back(T.ub(j));
  std::sort(u.begin(), u.end());
  S best = T.length();
  for (size_t k = 1; k < u.size(); ++k) {
    S gap = S(u[k] - u[k - 1]);
    if (scalar_traits<S>::sign(gap) == Sign::zero) continue;
    if (gap < best) best = gap;
  }
  return S(best / 2);
}

namespace detail {

// Strictly-inside test with the uncertain protocol.
template <class S>
bool strictly_inside(const S& lo, const S& x, const S& hi, const char* what) {
  return sign_or_fail<S>(S(x - lo), what) > 0 &&
         sign_or_fail<S>(S(hi - x), what) > 0;
}

// Finds the smallest singularity (u^t or u^b) interior to (lo,hi), if any.
// Returns {is_top, index} of the first hit scanning tops before bottoms.
template <class S>
std::optional<std::pair<bool, int>> interior_singularity(const Iet<S>& T,
                                                         const S& lo,
                                                         const S& hi) {
  for (int i = 2; i <= T.d(); ++i)
    if (strictly_inside(lo, T.ut(i), hi, "interior singularity test"))
      return std::make_pair(true, i);
  for (int j = 2; j <= T.d(); ++j)
    if (strictly_inside(lo, T.ub(j), hi, "interior singularity test"))
      return std::make_pair(false, j);
  return std::nullopt;
}

template <class S>
void order(S& lo, S& hi) {
  if (hi < lo) std::swap(lo, hi);
}

// Forward copies I^{(k)}, k = 0..n, with endpoints T^k u^b_q and
// T^{k-n} u^t_p. Shared by is_reduced and reduce_triple.
template <class S>
struct ForwardCopies {
  std::vector<S> x; // x[k] = T^k u^b_q
  std::vector<S> y; // y[m] = T^{-m} u^t_p
  ForwardCopies(const Iet<S>& T, const Triple& t) {
    x.reserve(t.n + 1);
    y.reserve(t.n + 1);
    S a = T.ub(t.q), b = T.ut(t.p);
    x.push_back(a);
    y.push_back(b);
    for (long long k = 1; k <= t.n; ++k) {
      a = T.apply(a);
      b = T.apply(b, Iet<S>::Dir::backward);
      x.push_back(a);
      y.push_back(b);
    }
  }
  // endpoints of I^{(k)}
  std::pair<S, S> ends(long long k, long long n) const {
    S lo = x[k], hi = y[n - k];
    order(lo, hi);
    return {lo, hi};
  }
};

// Split the triple t at the top mark u^t_l interior to copy I^{(n-k)}.
// The part near the forward-orbit endpoint keeps q and targets u^t_l; the
// part near the u^t_p preimage continues under U for k more steps. The
// side of u^t_l holding the preimage ye = U^{-k} u^t_p decides where the
// continuation starts: on the right it is u^b_{pi(l)}, on the left the
// right end of bottom interval pi(l-1), i.e. u^b_{pi(l-1)+1}. The two
// corner labels (the origin u^b_1 and the right end past u^b_d) are not
// marks; one more step lands exactly on a marked bottom point
// (admissibility keeps it interior), shortening the continuation by one.
// k = 1 is impossible there: it would put u^t_p within the displacement
// of an interval endpoint, below the minimal gap.
template <class S>
std::pair<Triple, Triple> split_at_top(const Iet<S>& U, const Triple& t,
                                       long long k, int l, const S& ye) {
  int qr;
  long long nr = k - 1;
  if (sign_or_fail<S>(S(ye - U.ut(l)), "reduce_triple orientation") > 0) {
    qr = U.pi().of(l);
    if (qr == 1) {
      if (k < 2)
        fail(Errc::structure, "reduce_triple: origin split with no room");
      qr = U.pi().of(1);
      nr = k - 2;
    }
  } else {
    qr = U.pi().of(l - 1) + 1;
    if (qr == U.d() + 1) {
      if (k < 2)
        fail(Errc::structure, "reduce_triple: right-end split with no room");
      qr = U.pi().of(U.d()) + 1;
      nr = k - 2;
    }
  }
  return {Triple{qr, t.p, nr}, Triple{t.q, l, t.n - k}};
}

} // namespace detail

// Copies I^{(k)} = (T^k u^b_q, T^{k-n} u^t_p), k = 0..n, all free of
// singularities of either row in their interiors. This is the content of
// reducedness; it is also meaningful for zero displacement (an exact
// connection), which is_reduced refuses.
template <class S>
bool copies_clear(const Iet<S>& T, const Triple& t) {
  detail::ForwardCopies<S> fc(T, t);
  for (long long k = 0; k <= t.n; ++k) {
    auto [lo, hi] = fc.ends(k, t.n);
    if (detail::interior_singularity(T, lo, hi)) return false;
  }
  return true;
}

template <class S>
bool is_reduced(const Iet<S>& T, const Triple& t) {
  if (sign_or_fail<S>(displacement(T, t), "is_reduced displacement") == 0)
    fail(Errc::degenerate, "is_reduced: zero displacement (a connection)");
  return copies_clear(T, t);
}

// Splits a small-displacement triple into reduced triples with strictly
// smaller displacements, by descending induction on the last copy containing
// a singularity. A bottom singularity is handled on the mirror map T^{-1},
// where it becomes a top one.
template <class S>
std::vector<Triple> reduce_triple(const Iet<S>& T, const Triple& t0,
                                  int depth = 0) {
  if (depth == 0) {
    S eps = half_min_gap(T);
    S disp = displacement(T, t0);
    if (!(scalar_traits<S>::abs(disp) < eps))
      fail(Errc::validation, "reduce_triple: displacement not below the gap bound");
    if (!scalar_traits<S>::is_exact) {
      if (scalar_traits<S>::abs(S(scalar_traits<S>::abs(disp) - eps)) <
          scalar_traits<S>::epsilon())
        fail(Errc::uncertain, "reduce_triple: displacement too close to the gap bound");
    }
  }
  if (depth > 256) fail(Errc::budget, "reduce_triple: recursion too deep");

  if (is_reduced(T, t0)) return {t0};

  detail::ForwardCopies<S> fc(T, t0);
  long long N = t0.n;
  // Only the last copy with an interior singularity is guaranteed to have
  // width exactly |disp|: the copies above it are clean, so widths are
  // preserved down to it, and the pullback through a clean copy is rigid.
  // Splitting there keeps both parts' displacements strictly below |disp|,
  // which drives the descent. (Copies 0 and N are always clean: a mark
  // within |disp| < eps of an endpoint mark would contradict the gap.)
  for (long long j = N - 1; j >= 1; --j) {
    auto [lo, hi] = fc.ends(j, N);
    long long k = N - j;
    for (int l = 2; l <= T.d(); ++l) {
      if (!detail::strictly_inside(lo, T.ut(l), hi, "reduce_triple top scan"))
        continue;
      auto [right, left] = detail::split_at_top(T, t0, k, l, fc.y[k]);
      std::vector<Triple> out;
      for (auto& r : reduce_triple(T, right, depth + 1)) out.push_back(r);
      for (auto& r : reduce_triple(T, left, depth + 1)) out.push_back(r);
      return out;
    }
    for (int l = 2; l <= T.d(); ++l) {
      if (!detail::strictly_inside(lo, T.ub(l), hi, "reduce_triple bottom scan"))
        continue;
      // A bottom mark is a top mark of the mirror T~ = T^{-1}, whose copies
      // for the reversed triple (p, q, N) are these copies read backwards:
      // this one has mirror index N - j, so the mirror split offset is j and
      // the preimage-side endpoint is our forward endpoint x_j. Splitting at
      // the same copy directly avoids rescanning in the mirror.
      Iet<S> M = T.mirror();
      Triple tm{t0.p, t0.q, N};
      auto [right, left] = detail::split_at_top(M, tm, j, l, fc.x[j]);
      std::vector<Triple> out;
      for (auto& r : reduce_triple(M, right, depth + 1))
        out.push_back(Triple{r.p, r.q, r.n});
      for (auto& r : reduce_triple(M, left, depth + 1))
        out.push_back(Triple{r.p, r.q, r.n});
      return out;
    }
  }
  fail(Errc::structure, "reduce_triple: non-reduced triple with no split found");
}

// hol(gamma_{q,p,n}) = xi^t_p - xi^b_q - S_n theta(u^b_q).
template <class S>
Vec2<S> holonomy_combinatorial(const Surface<S>& X, const Triple& t,
                               bool check_reduced = true) {
  const Iet<S>& T = X.iet();
  if (check_reduced && !is_reduced(T, t))
    fail(Errc::validation, "holonomy_combinatorial: triple is not reduced");
  Vec2<S> sum = T.template birkhoff<Vec2<S>>(
      T.ub(t.q), t.n, [&](int i) { return X.theta(i); });
  return X.xit(t.p) - X.xib(t.q) - sum;
}

template <class S> struct TraceResult {
  Vec2<S> hol;
  std::vector<int> rects; // alpha(0..): top rectangles fully traversed
  int start_rect = 0;     // bottom rectangle of the initial segment
  bool corner_hop = false; // endpoint reached through the xi_* identification
};

// Follows the straight segment from xi^b_q with direction hol through the
// rectangles, checking at every interval crossing that no singularity is
// met. The parametrized line z(t) = xi^b_q + t*hol is cut at cumulative
// heights; chart shifts theta accumulate in A.
template <class S>
TraceResult<S> trace_geodesic(const Surface<S>& X, const Triple& t) {
  const Iet<S>& T = X.iet();
  Vec2<S> v = holonomy_combinatorial(X, t, true);
  int rs = sign_or_fail<S>(v.x, "trace: Re hol");
  if (rs == 0) fail(Errc::degenerate, "trace: vertical holonomy");
  if (sign_or_fail<S>(v.y, "trace: Im hol") <= 0)
    fail(Errc::structure, "trace: expected up-oriented holonomy");
  bool right = rs > 0;

  TraceResult<S> out;
  out.hol = v;
  S slope = S(v.x / v.y); // dx/dy

  const Vec2<S>& z0 = X.xib(t.q);
  auto x_at = [&](const S& yhat) { return S(z0.x + S(yhat - z0.y) * slope); };

  // initial segment inside one bottom rectangle up to I
  int j0 = right ? t.q : t.q - 1;
  if (j0 < 1) fail(Errc::structure, "trace: exits the surface at the start");
  out.start_rect = j0;
  S c = x_at(S(0));
  if (!detail::strictly_inside(T.ub(j0), c, T.ub(j0 + 1), "trace: first crossing"))
    fail(Errc::structure, "trace: rectangle exit in the bottom segment");

  S cumH(0);           // sum of traversed heights, in z-line y units
  Vec2<S> A{S(0), S(0)}; // accumulated chart shift
  const S end_y = S(z0.y + v.y);
  for (long long guard = 0; guard <= t.n + 1; ++guard) {
    S sx = S(x_at(cumH) + A.x);
    int alpha = 0;
    for (int i = T.d(); i >= 1; --i) {
      int s = sign_or_fail<S>(S(sx - T.ut(i)), "trace: crossing location");
      if (s > 0) { alpha = i; break; }
      if (s == 0)
        fail(Errc::singularity, "trace: crossing hits a singularity");
    }
    if (alpha == 0) fail(Errc::structure, "trace: crossing left of the interval");

    S rem = S(end_y - cumH);
    if (!(X.h(alpha) < rem)) {
      // endpoint inside this rectangle: must be the singular corner
      S ex = S(x_at(end_y) + A.x);
      Vec2<S> target = right ? X.xit(alpha + 1) : X.xit(alpha);
      auto near0 = [](const S& w) {
        Sign z = zero_test<S>(w);
        return z == Sign::zero || z == Sign::uncertain;
      };
      bool at_target = near0(S(ex - target.x)) && near0(S(rem - target.y));
      Vec2<S> star{X.lambda_star(), X.tau_star()};
      bool at_star = alpha == T.d() && right && near0(S(ex - star.x)) &&
                     near0(S(rem - star.y));
      if (at_target && (right ? alpha + 1 : alpha) == t.p) return out;
      if (at_star) { // endpoint reached as its xi_* identification
        out.corner_hop = true;
        return out;
      }
      fail(Errc::structure, "trace: rectangle exit near the endpoint");
    }
    // full traversal of R^t_alpha: top-edge crossing must be interior
    S tx = S(x_at(S(cumH + X.h(alpha))) + A.x);
    if (!detail::strictly_inside(T.ut(alpha), tx, T.ut(alpha + 1),
                                 "trace: top-edge crossing"))
      fail(Errc::structure, "trace: rectangle exit through a side wall");
    out.rects.push_back(alpha);
    A = A + X.theta(alpha);
    cumH = S(cumH + X.h(alpha));
  }
  fail(Errc::structure, "trace: crossing count exceeded n+1");
}

struct EnumBudget {
  long long max_steps = 50'000'000;  // total orbit steps across all q
  std::size_t max_connections = 10'000'000;
};

namespace detail {

template <class S>
void sort_and_dedup(std::vector<SaddleConnection<S>>& cs) {
  auto key_less = [](const SaddleConnection<S>& a, const SaddleConnection<S>& b) {
    if (a.len2 != b.len2) return a.len2 < b.len2;
    if (a.hol.x != b.hol.x) return a.hol.x < b.hol.x;
    if (a.hol.y != b.hol.y) return a.hol.y < b.hol.y;
    return a.bundle < b.bundle;
  };
  std::sort(cs.begin(), cs.end(), key_less);
  auto same = [](const SaddleConnection<S>& a, const SaddleConnection<S>& b) {
    return a.hol.x == b.hol.x && a.hol.y == b.hol.y && a.bundle == b.bundle;
  };
  cs.erase(std::unique(cs.begin(), cs.end(), same), cs.end());
}

} // namespace detail

// All saddle connections of length <= L_max. The triple scan supplies the
// up-oriented connections of the (q,p,n) families with their bundle labels
// and reversals; on exact backends a geometric wedge sweep then replaces it
// as the source of truth, adding the connections the triple families cannot
// reach (those through the corner points, and shallow ones wrapping around
// the vertical boundary). Sweep finds with no combinatorial label carry
// bundle (0,0). Horizontal connections inside I are appended separately;
// horizontal connections away from I are out of scope.
template <class S>
std::vector<SaddleConnection<S>> enumerate_connections(
    const Surface<S>& X, const S& L_max, const EnumBudget& budget = {}) {
  const Iet<S>& T = X.iet();
  int d = X.d();
  S L2 = S(L_max * L_max);
  std::vector<SaddleConnection<S>> out;

  long long steps = 0;
  for (int q = 2; q <= d; ++q) {
    S x = T.ub(q);
    Vec2<S> snth{S(0), S(0)};
    for (long long n = 0;; ++n) {
      bool any_below = false;
      for (int p = 2; p <= d; ++p) {
        Vec2<S> hol = X.xit(p) - X.xib(q) - snth;
        if (hol.y > L_max) continue;
        any_below = true;
        if (hol.norm2() > L2) continue;
        if (sign_or_fail<S>(hol.x, "enumerate: Re hol") == 0)
          fail(Errc::degenerate,
               "enumerate: vertical saddle connection present");
        Triple tr{q, p, n};
        if (!is_reduced(T, tr)) continue;
        out.push_back({tr, hol, hol.norm2(), {q, p}, Orientation::up});
        out.push_back({tr, -hol, out.back().len2, {q, p}, Orientation::down});
        if (out.size() > budget.max_connections)
          fail(Errc::budget, "enumerate: connection cap exceeded");
      }
      if (!any_below) break;
      if (++steps > budget.max_steps)
        fail(Errc::budget, "enumerate: orbit step cap exceeded");
      int branch;
      try {
        branch = T.locate_top(x);
      } catch (const FlatError& e) {
        if (e.code() == Errc::singularity) {
          fail(Errc::degenerate, "enumerate: orbit of u^b hits a singularity "
                                 "(connection present)");
        }
        throw;
      }
      snth = snth + X.theta(branch);
      x = S(x + T.delta(branch));
    }
  }

  if constexpr (scalar_traits<S>::is_exact) {
    std::vector<Vec2<S>> hits;
    sweep_detail::wedge_enumerate(X, L2, budget.max_steps, hits);
    std::map<std::pair<S, S>, std::vector<SaddleConnection<S>>> labels;
    for (auto& c : out) labels[{c.hol.x, c.hol.y}].push_back(c);
    std::vector<SaddleConnection<S>> res;
    res.reserve(hits.size());
    for (auto& hv : hits) {
      auto it = labels.find({hv.x, hv.y});
      if (it != labels.end() && !it->second.empty()) {
        res.push_back(it->second.back());
        it->second.pop_back();
      } else {
        res.push_back({Triple{0, 0, 0}, hv, hv.norm2(), {0, 0},
                       hv.y > S(0) ? Orientation::up : Orientation::down});
      }
      if (res.size() > budget.max_connections)
        fail(Errc::budget, "enumerate: connection cap exceeded");
    }
    for (auto& kv : labels)
      if (!kv.second.empty())
        fail(Errc::structure,
             "enumerate: combinatorial connection missing from the sweep");
    out = std::move(res);
  }

  if (zero_test<S>(X.tau_star()) == Sign::zero && !(X.lambda_star() > L_max)) {
    Vec2<S> hz{X.lambda_star(), S(0)};
    out.push_back({Triple{}, hz, hz.norm2(), {0, 0}, Orientation::horizontal});
    out.push_back({Triple{}, -hz, hz.norm2(), {0, 0}, Orientation::horizontal});
  }

  detail::sort_and_dedup(out);
  return out;
}

template <class S>
std::optional<S> systole2_of(const std::vector<SaddleConnection<S>>& cs) {
  if (cs.empty()) return std::nullopt;
  return cs.front().len2; // sorted by length
}

// Shortest connection length, found by doubling L_max until nonempty.
template <class S>
double systole(const Surface<S>& X, const EnumBudget& budget = {}) {
  S L(1);
  for (int round = 0; round < 24; ++round) {
    auto cs = enumerate_connections(X, L, budget);
    if (!cs.empty()) return cs.front().length();
    L = S(L * 2);
  }
  fail(Errc::budget, "systole: no connection within the doubling cap");
}

template <class S>
double systole_bundle(const Surface<S>& X, int q, int p,
                      const EnumBudget& budget = {}) {
  S L(1);
  for (int round = 0; round < 24; ++round) {
    auto cs = enumerate_connections(X, L, budget);
    for (auto& c : cs)
      if (c.bundle == std::make_pair(q, p) && c.orient == Orientation::up)
        return c.length();
    L = S(L * 2);
  }
  fail(Errc::budget, "systole_bundle: no connection within the doubling cap");
}

// -------------------------------------------------------------------------
// Almost-vertical candidate scan: all up-oriented reduced triples with
// Im hol <= im_max and |Re hol| < re_bound(Im hol); one orbit pass per q,
// cheap displacement filter per (p,n), full checks only on candidates.
// -------------------------------------------------------------------------
template <class S>
std::vector<SaddleConnection<S>> vertical_candidate_scan(
    const Surface<S>& X, const std::function<S(const S&)>& re_bound,
    const S& im_max, const EnumBudget& budget = {}) {
  const Iet<S>& T = X.iet();
  int d = X.d();
  std::vector<SaddleConnection<S>> out;
  long long steps = 0;
  for (int q = 2; q <= d; ++q) {
    S x = T.ub(q);
    Vec2<S> snth{S(0), S(0)};
    for (long long n = 0;; ++n) {
      bool any_below = false;
      for (int p = 2; p <= d; ++p) {
        S B = S(S(X.xit(p).y - X.xib(q).y) - snth.y); // = Im hol exactly
        if (B > im_max) continue;
        any_below = true;
        S disp = S(x - T.ut(p)); // = -Re hol
        if (!(scalar_traits<S>::abs(disp) < re_bound(B))) continue;
        Vec2<S> hol = X.xit(p) - X.xib(q) - snth;
        Triple tr{q, p, n};
        if (sign_or_fail<S>(hol.x, "scan: Re hol") == 0)
          fail(Errc::degenerate, "scan: vertical saddle connection present");
        if (!is_reduced(T, tr)) continue;
        out.push_back({tr, hol, hol.norm2(), {q, p}, Orientation::up});
        if (out.size() > budget.max_connections)
          fail(Errc::budget, "scan: connection cap exceeded");
      }
      if (!any_below) break;
      if (++steps > budget.max_steps)
        fail(Errc::budget, "scan: orbit step cap exceeded");
      int branch;
      try {
        branch = T.locate_top(x);
      } catch (const FlatError& e) {
        if (e.code() == Errc::singularity)
          fail(Errc::degenerate, "scan: orbit hits a singularity");
        throw;
      }
      snth = snth + X.theta(branch);
      x = S(x + T.delta(branch));
    }
  }
  detail::sort_and_dedup(out);
  return out;
}

} // namespace flatdyn
