#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "flatdyn/suspension.hpp"

namespace flatdyn {

// ---------------------------------------------------------------------------
// Combinatorial stratum.
//
// Ordinary half-sector labels: D_i (i = 2..d) is the right half-disk at the
// top seam point xi^t_i, realized in R^t_i; C_m (m = 1..d-1) is the left
// half-disk at the bottom seam point xi^b_{m+1}, realized in R^b_m. One extra
// corner label * collects the quarter sectors at the distinguished points
// 0 / lambda_* / xi_*. Turning counterclockwise:
//   D_i -> C_{pi(i)-1}            (through the bottom seam left of xi^b_{pi(i)})
//   C_m -> D_{pi^{-1}(m)+1}       (through the top seam right of xi^t)
// with the two boundary transitions rerouted:
//   D_{pi^{-1}(1)} -> C_{pi(1)-1} (passes the origin corner, no extra sector)
//   C_{pi(d)} -> * -> D_{pi^{-1}(d)+1}   (the xi_* corner, tau_* >= 0 gluing)
// A cycle through 2k ordinary labels bounds a singularity of order k
// (cone angle 2 pi k); the orders sum to d-1.
// ---------------------------------------------------------------------------
inline std::vector<int> stratum_combinatorial(const Permutation& pi) {
  if (!pi.admissible()) fail(Errc::validation, "stratum needs admissible pi");
  int d = pi.d();
  // label encoding: D_i -> i (2..d), C_m -> d+m (d+1..2d-1), * -> 0
  auto next = [&](int lab) -> int {
    if (lab == 0) return pi.inv(d) + 1;                     // * -> D
    if (lab <= d) {                                         // D_i
      int i = lab;
      if (pi.of(i) == 1) return d + (pi.of(1) - 1);         // exceptional D
      return d + (pi.of(i) - 1);
    }
    int m = lab - d;                                        // C_m
    if (pi.inv(m) == d) return 0;                           // into the corner
    return pi.inv(m) + 1;
  };
  std::vector<char> seen(2 * d, 0);
  std::vector<int> orders;
  for (int start = 2; start <= 2 * d - 1; ++start) {
    if (seen[start]) continue;
    int len = 0, lab = start;
    do {
      if (lab != 0) {
        seen[lab] = 1;
        ++len;
      }
      lab = next(lab);
    } while (lab != start);
    if (len % 2 != 0) fail(Errc::structure, "odd sector cycle");
    orders.push_back(len / 2);
  }
  std::sort(orders.begin(), orders.end());
  int total = 0;
  for (int k : orders) total += k;
  if (total != d - 1) fail(Errc::structure, "stratum orders do not sum to d-1");
  return orders;
}

// ---------------------------------------------------------------------------
// Geometric stratum: walk around every identified corner of the zippered
// rectangles with exact coordinates, counting quarter turns. Completely
// independent of the label algebra above; exact backend only.
//
// The atlas: 2d planar rectangles (top copies R^t_i above I, bottom copies
// R^b_j below), R^t_i identified with R^b_{pi(i)} by the translation theta_i.
// Vertical edges glue along the top seams (up to xi^t_i), the bottom seams
// (down to xi^b_j), and the one special pair of segments from gluing the
// right boundary x = lambda_* (sign of tau_* picks the branch). Horizontal
// edges glue across I.
// ---------------------------------------------------------------------------
namespace stratum_detail {

template <class S> struct WalkState {
  bool top;  // which copy
  int idx;   // rectangle index (top: i, bottom: position j)
  Vec2<S> z; // plane point in that copy
  int quad;  // 0=NE 1=NW 2=SW 3=SE

  bool operator<(const WalkState& o) const {
    if (top != o.top) return top < o.top;
    if (idx != o.idx) return idx < o.idx;
    if (z.x != o.z.x) return z.x < o.z.x;
    if (z.y != o.z.y) return z.y < o.z.y;
    return quad < o.quad;
  }
  bool operator==(const WalkState& o) const {
    return top == o.top && idx == o.idx && z.x == o.z.x && z.y == o.z.y &&
           quad == o.quad;
  }
};

template <class S> class CornerWalker {
public:
  explicit CornerWalker(const Surface<S>& X) : X_(X) {}

  // Does quadrant q at z fit inside rectangle (top, idx)?
  bool fits(bool top, int idx, const Vec2<S>& z, int q) const {
    auto r = top ? X_.rect_top(idx) : X_.rect_bottom(idx);
    bool north = q == 0 || q == 1, west = q == 1 || q == 2;
    if (north && !(z.y < r.y1)) return false;
    if (!north && !(z.y > r.y0)) return false;
    if (west && !(z.x > r.x0)) return false;
    if (!west && !(z.x < r.x1)) return false;
    return true;
  }

  WalkState<S> canonical(WalkState<S> s) const {
    if (s.top) {
      int i = s.idx;
      return {false, X_.pi_of(i), s.z + X_.theta(i), s.quad};
    }
    return s;
  }

  // Cross the ray separating quad from quad+1 (ccw) at state s.
  WalkState<S> cross(const WalkState<S>& s) const {
    int ray = s.quad; // 0:N 1:W 2:S 3:E
    switch (ray) {
    case 0: return cross_vertical(s.top, s.idx, s.z, true);
    case 2: return cross_vertical(s.top, s.idx, s.z, false);
    case 1: return cross_I_west(s);
    default: return cross_I_east(s);
    }
  }

  // Walk ccw around the singular point represented by seed; returns the
  // number of quarter sectors, marking canonical states visited.
  int walk(WalkState<S> seed, std::map<WalkState<S>, char>& visited) const {
    WalkState<S> start = canonical(seed);
    if (visited.count(start)) return 0;
    WalkState<S> cur = seed;
    int quarters = 0;
    do {
      visited[canonical(cur)] = 1;
      ++quarters;
      if (quarters > 64 * X_.d())
        fail(Errc::structure, "corner walk failed to close");
      int nq = (cur.quad + 1) % 4;
      if (fits(cur.top, cur.idx, cur.z, nq)) {
        cur.quad = nq;
      } else {
        WalkState<S> t = cross(cur);
        t.quad = nq;
        if (!fits(t.top, t.idx, t.z, nq))
          fail(Errc::structure, "corner walk landed outside the atlas");
        cur = t;
      }
    } while (!(canonical(cur) == start));
    return quarters;
  }

  // Crossing a vertical edge at z, through the segment directly above
  // (up = true) or below z. Implemented via the seam/transport rules; the
  // special right-boundary gluing is keyed to the sign of tau_*. Public:
  // the geodesic tracer reuses it as the universal seam resolver.
  WalkState<S> cross_vertical(bool top, int idx, Vec2<S> z, bool up) const {
    for (int depth = 0; depth < 8 * X_.d() + 8; ++depth) {
      Step nxt = [&] {
        if (top) {
          auto r = X_.rect_top(idx);
          if (z.x == r.x0) return t_left(idx, z, up);
          if (z.x == r.x1) return t_right(idx, z, up);
          fail(Errc::structure, "vertical crossing off any edge (top)");
        }
        auto r = X_.rect_bottom(idx);
        if (z.x == r.x0) return b_left(idx, z, up);
        if (z.x == r.x1) return b_right(idx, z, up);
        fail(Errc::structure, "vertical crossing off any edge (bottom)");
      }();
      if (nxt.done) return nxt.state;
      top = nxt.top;
      idx = nxt.idx;
      z = nxt.z;
    }
    fail(Errc::structure, "vertical crossing did not resolve");
  }

  struct Step {
    bool done;
    WalkState<S> state; // when done
    bool top;           // when not done: transported location, same crossing
    int idx;
    Vec2<S> z;
  };

  Step resolved(bool top, int idx, Vec2<S> z) const {
    return {true, {top, idx, std::move(z), 0}, false, 0, {}};
  }
  Step transported(bool top, int idx, Vec2<S> z) const {
    return {false, {}, top, idx, std::move(z)};
  }

  // Left edge of R^t_i. Segment above z (up) or below z.
  Step t_left(int i, const Vec2<S>& z, bool up) const {
    const S& xt = X_.xit(i).y;      // Im xi^t_i (top of the seam)
    int d = X_.d();
    bool special = X_.tau_star() >= 0 && i == X_.pi_inv(d) + 1;
    S cap = i >= 2 ? X_.h(i - 1) : S(0);
    if (up) {
      if (i >= 2 && z.y < xt && z.y < cap) return resolved(true, i - 1, z);
      if (special && z.y < xt && z.y >= cap)
        return resolved(true, d, z + X_.theta(X_.pi_inv(d)));
    } else {
      if (i >= 2 && z.y > 0 && z.y <= xt && z.y <= cap)
        return resolved(true, i - 1, z);
      if (special && z.y <= xt && z.y > cap)
        return resolved(true, d, z + X_.theta(X_.pi_inv(d)));
    }
    return transported(false, X_.pi_of(i), z + X_.theta(i));
  }

  // Right edge of R^t_i.
  Step t_right(int i, const Vec2<S>& z, bool up) const {
    int d = X_.d();
    if (i < d) {
      const S& xt = X_.xit(i + 1).y;
      if (up && z.y < xt) return resolved(true, i + 1, z);
      if (!up && z.y > 0 && z.y <= xt) return resolved(true, i + 1, z);
    } else if (X_.tau_star() >= 0) {
      const S& ts = X_.tau_star();
      if (up && z.y < ts)
        return resolved(true, X_.pi_inv(d) + 1, z - X_.theta(X_.pi_inv(d)));
      if (!up && z.y > 0 && z.y <= ts)
        return resolved(true, X_.pi_inv(d) + 1, z - X_.theta(X_.pi_inv(d)));
    }
    return transported(false, X_.pi_of(i), z + X_.theta(i));
  }

  // Left edge of R^b_j (position-indexed).
  Step b_left(int j, const Vec2<S>& z, bool up) const {
    int d = X_.d();
    const S& xb = X_.xib(j).y; // Im xi^b_j (bottom of the seam)
    bool special = X_.tau_star() < 0 && j == X_.pi_of(d) + 1;
    S cap = j >= 2 ? S(-X_.h(X_.pi_inv(j - 1))) : S(0);
    if (up) {
      if (j >= 2 && z.y < 0 && z.y >= xb && z.y >= cap)
        return resolved(false, j - 1, z);
      if (special && z.y >= xb && z.y < cap)
        return resolved(false, d, z - X_.theta(d));
    } else {
      if (j >= 2 && z.y > xb && z.y > cap) return resolved(false, j - 1, z);
      if (special && z.y > xb && z.y <= cap)
        return resolved(false, d, z - X_.theta(d));
    }
    return transported(true, X_.pi_inv(j), z - X_.theta(X_.pi_inv(j)));
  }

  // Right edge of R^b_j.
  Step b_right(int j, const Vec2<S>& z, bool up) const {
    int d = X_.d();
    if (j < d) {
      const S& xb = X_.xib(j + 1).y;
      if (up && z.y < 0 && z.y >= xb) return resolved(false, j + 1, z);
      if (!up && z.y > xb) return resolved(false, j + 1, z);
    } else if (X_.tau_star() < 0) {
      const S& ts = X_.tau_star();
      if (up && z.y < 0 && z.y >= ts)
        return resolved(false, X_.pi_of(d) + 1, z + X_.theta(d));
      if (!up && z.y > ts) return resolved(false, X_.pi_of(d) + 1, z + X_.theta(d));
    }
    return transported(true, X_.pi_inv(j), z - X_.theta(X_.pi_inv(j)));
  }

  // On-I crossings. Westward at (x,0) drops from the top copy into the bottom
  // rectangle whose interval contains x - epsilon; eastward rises from the
  // bottom copy into the top rectangle containing x + epsilon.
  WalkState<S> cross_I_west(const WalkState<S>& s) const {
    Vec2<S> z = s.z;
    bool top = s.top;
    int idx = s.idx;
    if (top) {
      // must be on the bottom edge of a top rectangle, i.e. y == 0 already
    } else {
      // bottom copy: crossing W happens on its bottom edge; transport up first
      auto r = X_.rect_bottom(idx);
      if (z.y == r.y0) {
        int i = X_.pi_inv(idx);
        z = z - X_.theta(i);
        top = true;
        idx = i;
      }
    }
    if (z.y != 0) fail(Errc::structure, "westward I-crossing off I");
    int j = locate_bottom_left_closed(z.x);
    return {false, j, z, 0};
  }

  WalkState<S> cross_I_east(const WalkState<S>& s) const {
    Vec2<S> z = s.z;
    bool top = s.top;
    int idx = s.idx;
    if (top) {
      auto r = X_.rect_top(idx);
      if (z.y == r.y1) { // top edge of a top rectangle: transport down
        z = z + X_.theta(idx);
        top = false;
        idx = X_.pi_of(idx);
      }
    }
    if (z.y != 0) fail(Errc::structure, "eastward I-crossing off I");
    int i = locate_top_right_closed(z.x);
    return {true, i, z, 0};
  }

  // j with u^b_j < x <= u^b_{j+1}
  int locate_bottom_left_closed(const S& x) const {
    for (int j = X_.d(); j >= 1; --j)
      if (X_.iet().ub(j) < x) return j;
    fail(Errc::structure, "x not in any bottom interval (left-closed)");
  }
  // i with u^t_i <= x < u^t_{i+1}
  int locate_top_right_closed(const S& x) const {
    for (int i = X_.d(); i >= 1; --i)
      if (!(x < X_.iet().ut(i))) return i;
    fail(Errc::structure, "x not in any top interval (right-closed)");
  }
  // i with u^t_i < x <= u^t_{i+1}
  int locate_top_left_closed(const S& x) const {
    for (int i = X_.d(); i >= 1; --i)
      if (X_.iet().ut(i) < x) return i;
    fail(Errc::structure, "x not in any top interval (left-closed)");
  }
  // j with u^b_j <= x < u^b_{j+1}
  int locate_bottom_right_closed(const S& x) const {
    for (int j = X_.d(); j >= 1; --j)
      if (!(x < X_.iet().ub(j))) return j;
    fail(Errc::structure, "x not in any bottom interval (right-closed)");
  }

private:
  const Surface<S>& X_;
};

} // namespace stratum_detail

// Corner walk over the whole surface: singularity orders plus the full set
// of visited sector states (canonical bottom-copy form, one per quarter
// sector of every cone point). The states double as the launch sectors for
// the geometric connection sweep.
template <class S>
std::pair<std::vector<int>, std::vector<stratum_detail::WalkState<S>>>
stratum_states(const Surface<S>& X) {
  static_assert(scalar_traits<S>::is_exact,
                "stratum walks require an exact backend");
  using stratum_detail::WalkState;
  stratum_detail::CornerWalker<S> walker(X);
  int d = X.d();

  std::vector<WalkState<S>> seeds;
  seeds.push_back({true, 1, {S(0), S(0)}, 0});
  seeds.push_back({false, 1, {S(0), S(0)}, 3});
  for (int i = 2; i <= d; ++i) {
    seeds.push_back({true, i, {X.iet().ut(i), X.xit(i).y}, 0});
    seeds.push_back({true, i, {X.iet().ut(i), X.xit(i).y}, 3});
  }
  for (int j = 2; j <= d; ++j) {
    seeds.push_back({false, j, {X.iet().ub(j), X.xib(j).y}, 0});
    seeds.push_back({false, j, {X.iet().ub(j), X.xib(j).y}, 3});
  }
  Vec2<S> star{X.lambda_star(), X.tau_star()};
  Sign ts = scalar_traits<S>::sign(X.tau_star());
  if (ts == Sign::positive) {
    seeds.push_back({true, d, star, 1});
    seeds.push_back({true, d, star, 2});
  } else if (ts == Sign::negative) {
    seeds.push_back({false, d, star, 1});
    seeds.push_back({false, d, star, 2});
  } else {
    seeds.push_back({true, d, star, 1});
    seeds.push_back({false, d, star, 2});
  }

  std::map<WalkState<S>, char> visited;
  std::vector<int> orders;
  for (auto& seed : seeds) {
    // seam corners can degenerate onto a rectangle edge (e.g. pi(d) = 1 puts
    // xi^t_d on the top edge); such sectors are covered by another seed
    if (!walker.fits(seed.top, seed.idx, seed.z, seed.quad)) continue;
    if (visited.count(walker.canonical(seed))) continue;
    int quarters = walker.walk(seed, visited);
    if (quarters == 0) continue;
    if (quarters % 4 != 0)
      fail(Errc::structure, "cone angle not a multiple of 2 pi");
    orders.push_back(quarters / 4);
  }
  std::sort(orders.begin(), orders.end());
  int total = 0;
  for (int k : orders) total += k;
  if (total != d - 1)
    fail(Errc::structure, "geometric stratum orders do not sum to d-1");
  std::vector<WalkState<S>> states;
  states.reserve(visited.size());
  for (auto& kv : visited) states.push_back(kv.first);
  return {std::move(orders), std::move(states)};
}

// Geometric stratum of a surface with exact scalars: singularity orders read
// off from total turning around every identified corner point.
template <class S>
std::vector<int> stratum_geometric(const Surface<S>& X) {
  return stratum_states(X).first;
}

} // namespace flatdyn
