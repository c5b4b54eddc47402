#pragma once

#include <map>
#include <utility>
#include <vector>

#include "flatdyn/stratum.hpp"

namespace flatdyn {

// ---------------------------------------------------------------------------
// Geometric connection sweep.
//
// Exhaustive enumeration of directed saddle connections of length <= L by a
// wedge subdivision search over the rectangle atlas. Launch sectors are the
// quarter sectors of the cone points (from the corner walk), so every
// directed connection is reached through exactly one root sector; corridors
// are unrolled chart placements, split at every boundary feature visible
// from the anchor. Directions that pass exactly through a feature point are
// completed by an exact single-ray trace. Axis-parallel directions are out
// of scope: verticals are excluded by precondition, horizontal connections
// are handled by the caller.
// ---------------------------------------------------------------------------
namespace sweep_detail {

using stratum_detail::CornerWalker;

template <class S> struct ChartPoint {
  bool top;
  int idx;
  Vec2<S> z;
};

template <class S> int sgn(const S& v, const char* what) {
  return sign_or_fail<S>(v, what);
}

template <class S> S cross(const Vec2<S>& a, const Vec2<S>& b) {
  return S(a.x * b.y - a.y * b.x);
}

// Cone points on the boundary of one chart. At most two: the seam points of
// the left and right edges (the origin and xi_* stand in at the outer
// boundary; the star point belongs to the copy on the side of tau_*).
template <class S>
std::vector<Vec2<S>> chart_singulars(const Surface<S>& X, bool top, int idx) {
  std::vector<Vec2<S>> s;
  int d = X.d();
  Sign ts = scalar_traits<S>::sign(X.tau_star());
  if (top) {
    s.push_back(idx >= 2 ? X.xit(idx) : Vec2<S>{S(0), S(0)});
    if (idx < d)
      s.push_back(X.xit(idx + 1));
    else if (ts != Sign::negative)
      s.push_back({X.lambda_star(), X.tau_star()});
  } else {
    s.push_back(idx >= 2 ? X.xib(idx) : Vec2<S>{S(0), S(0)});
    if (idx < d)
      s.push_back(X.xib(idx + 1));
    else if (ts != Sign::positive)
      s.push_back({X.lambda_star(), X.tau_star()});
  }
  return s;
}

// Generous superset of the points where the gluing of an edge can change;
// extra events only refine the subdivision. side: 0 left, 1 right, 2 bottom,
// 3 top.
template <class S>
std::vector<Vec2<S>> edge_breaks(const Surface<S>& X, bool top, int idx,
                                 int side) {
  auto r = top ? X.rect_top(idx) : X.rect_bottom(idx);
  std::vector<Vec2<S>> out;
  int d = X.d();
  if (side <= 1) {
    S xe = side == 0 ? r.x0 : r.x1;
    std::vector<S> ys;
    for (int k = 1; k <= d + 1; ++k) {
      ys.push_back(X.xit(k).y);
      ys.push_back(X.xib(k).y);
    }
    for (int m = 1; m <= d; ++m) {
      ys.push_back(X.h(m));
      ys.push_back(S(-X.h(m)));
    }
    ys.push_back(S(0));
    for (auto& y : ys)
      if (r.y0 < y && y < r.y1) out.push_back({xe, y});
    return out;
  }
  bool on_I = top ? side == 2 : side == 3;
  std::vector<S> xs;
  S ye(0);
  if (on_I) {
    // crossing I splits at every interior marked point of either side
    for (int i = 2; i <= d; ++i) {
      xs.push_back(X.iet().ut(i));
      xs.push_back(X.iet().ub(i));
    }
  } else if (top) {
    // the roof lands on I from below; pull the top splits back
    ye = r.y1;
    for (int k = 2; k <= d; ++k)
      xs.push_back(S(X.iet().ut(k) - X.theta(idx).x));
  } else {
    // the floor lands on I from above; pull the bottom splits back
    ye = r.y0;
    for (int k = 2; k <= d; ++k)
      xs.push_back(S(X.iet().ub(k) + X.theta(X.pi_inv(idx)).x));
  }
  for (auto& x : xs)
    if (r.x0 < x && x < r.x1) out.push_back({x, ye});
  return out;
}

// Resolve the continuation of a ray at a boundary point: repeatedly apply
// the edge identifications until z + eps*dir lies in the interior of the
// current chart. dir must avoid the axes.
template <class S>
ChartPoint<S> cross_at(const Surface<S>& X, const CornerWalker<S>& W,
                       bool top, int idx, Vec2<S> z, const Vec2<S>& dir) {
  int sx = sgn(dir.x, "sweep: crossing direction");
  int sy = sgn(dir.y, "sweep: crossing direction");
  if (sx == 0 || sy == 0)
    fail(Errc::structure, "sweep: axis-parallel crossing");
  for (int guard = 0; guard < 16 * X.d() + 16; ++guard) {
    auto r = top ? X.rect_top(idx) : X.rect_bottom(idx);
    bool okx = sx > 0 ? z.x < r.x1 : z.x > r.x0;
    bool oky = sy > 0 ? z.y < r.y1 : z.y > r.y0;
    if (okx && oky) return {top, idx, z};
    if (!oky) {
      if (sy > 0) {
        if (top) { // through the roof, onto I from below in the bottom copy
          z = z + X.theta(idx);
          idx = X.pi_of(idx);
          top = false;
        } else { // across I upward
          idx = sx > 0 ? W.locate_top_right_closed(z.x)
                       : W.locate_top_left_closed(z.x);
          top = true;
        }
      } else {
        if (top) { // across I downward
          idx = sx > 0 ? W.locate_bottom_right_closed(z.x)
                       : W.locate_bottom_left_closed(z.x);
          top = false;
        } else { // through the floor, onto I from above in the top copy
          int i = X.pi_inv(idx);
          z = z - X.theta(i);
          idx = i;
          top = true;
        }
      }
      continue;
    }
    auto st = W.cross_vertical(top, idx, z, sy > 0);
    top = st.top;
    idx = st.idx;
    z = st.z;
  }
  fail(Errc::structure, "sweep: crossing did not resolve");
}

// Follow the single ray t*dir (t >= 1, entry point = dir itself on the
// current chart boundary) until it hits a cone point or leaves the L-disk;
// emits the hit when it is within reach.
template <class S>
void trace_ray(const Surface<S>& X, const CornerWalker<S>& W, bool top,
               int idx, Vec2<S> g, const Vec2<S>& dir, const S& L2,
               std::vector<Vec2<S>>& hits, long long& steps,
               long long max_steps) {
  int sx = sgn(dir.x, "sweep: ray direction");
  int sy = sgn(dir.y, "sweep: ray direction");
  Vec2<S> P = dir;
  S tP(1);
  for (;;) {
    if (++steps > max_steps) fail(Errc::budget, "sweep: step cap exceeded");
    auto cp = cross_at(X, W, top, idx, Vec2<S>{P - g}, dir);
    top = cp.top;
    idx = cp.idx;
    g = P - cp.z;
    auto r = top ? X.rect_top(idx) : X.rect_bottom(idx);
    S tx = S((sx > 0 ? S(r.x1 + g.x) : S(r.x0 + g.x)) / dir.x);
    S ty = S((sy > 0 ? S(r.y1 + g.y) : S(r.y0 + g.y)) / dir.y);
    S t_out = tx < ty ? tx : ty;
    bool hit = false;
    S t_hit(0);
    for (auto& s : chart_singulars(X, top, idx)) {
      Vec2<S> sp = s + g;
      if (scalar_traits<S>::sign(cross<S>(dir, sp)) != Sign::zero) continue;
      S t = S(sp.x / dir.x);
      if (!(t > tP) || t > t_out) continue;
      if (!hit || t < t_hit) {
        hit = true;
        t_hit = t;
      }
    }
    if (hit) {
      Vec2<S> sp = dir * t_hit;
      if (!(sp.norm2() > L2)) hits.push_back(sp);
      return;
    }
    P = dir * t_out;
    tP = t_out;
    if (P.norm2() > L2) return;
  }
}

template <class S> struct WedgeFrame {
  bool top;
  int idx;
  Vec2<S> g;      // planar placement: plane point = chart point + g
  Vec2<S> lo, hi; // open direction cone, ccw, less than a half turn
};

template <class S>
void wedge_enumerate(const Surface<S>& X, const S& L2, long long max_steps,
                     std::vector<Vec2<S>>& hits) {
  CornerWalker<S> W(X);
  auto anchors = stratum_states(X).second;
  const Vec2<S> qd[5] = {{S(1), S(0)},
                         {S(0), S(1)},
                         {S(-1), S(0)},
                         {S(0), S(-1)},
                         {S(1), S(0)}};
  std::vector<WedgeFrame<S>> stack;
  for (auto& a : anchors)
    stack.push_back({a.top, a.idx, -a.z, qd[a.quad], qd[a.quad + 1]});

  long long steps = 0;
  while (!stack.empty()) {
    WedgeFrame<S> f = std::move(stack.back());
    stack.pop_back();
    if (++steps > max_steps) fail(Errc::budget, "sweep: node cap exceeded");

    auto r = f.top ? X.rect_top(f.idx) : X.rect_bottom(f.idx);
    S X0 = S(r.x0 + f.g.x), X1 = S(r.x1 + f.g.x);
    S Y0 = S(r.y0 + f.g.y), Y1 = S(r.y1 + f.g.y);
    S nx = X0 > S(0) ? X0 : (X1 < S(0) ? X1 : S(0));
    S ny = Y0 > S(0) ? Y0 : (Y1 < S(0) ? Y1 : S(0));
    if (S(nx * nx + ny * ny) > L2) continue;

    // boundary features: corners, gluing breakpoints, cone points
    std::map<std::pair<S, S>, bool> feat; // point -> is a cone point
    auto add = [&](const Vec2<S>& p, bool sing) {
      auto [it, fresh] = feat.insert({{p.x, p.y}, sing});
      if (!fresh) it->second = it->second || sing;
    };
    add(Vec2<S>{X0, Y0}, false);
    add(Vec2<S>{X1, Y0}, false);
    add(Vec2<S>{X1, Y1}, false);
    add(Vec2<S>{X0, Y1}, false);
    for (int side = 0; side < 4; ++side)
      for (auto& p : edge_breaks(X, f.top, f.idx, side))
        add(p + f.g, false);
    for (auto& s : chart_singulars(X, f.top, f.idx)) add(s + f.g, true);

    struct Ev {
      Vec2<S> p;
      bool sing;
    };
    std::vector<Ev> evs;
    for (auto& kv : feat) {
      Vec2<S> p{kv.first.first, kv.first.second};
      if (scalar_traits<S>::sign(p.x) == Sign::zero &&
          scalar_traits<S>::sign(p.y) == Sign::zero)
        continue;
      if (sgn(cross<S>(f.lo, p), "sweep: wedge test") <= 0) continue;
      if (sgn(cross<S>(p, f.hi), "sweep: wedge test") <= 0) continue;
      evs.push_back({p, kv.second});
    }
    std::sort(evs.begin(), evs.end(), [&](const Ev& a, const Ev& b) {
      int c = sgn(cross<S>(a.p, b.p), "sweep: event order");
      if (c != 0) return c > 0;
      return a.p.norm2() < b.p.norm2();
    });
    // along one direction only the nearest feature matters
    std::vector<Ev> reps;
    for (auto& e : evs) {
      if (!reps.empty() &&
          scalar_traits<S>::sign(cross<S>(reps.back().p, e.p)) == Sign::zero)
        continue;
      reps.push_back(e);
    }

    for (auto& e : reps) {
      if (e.p.norm2() > L2) continue;
      if (e.sing) {
        if (scalar_traits<S>::sign(e.p.x) == Sign::zero)
          fail(Errc::degenerate, "sweep: vertical saddle connection present");
        hits.push_back(e.p);
      } else {
        trace_ray(X, W, f.top, f.idx, f.g, e.p, L2, hits, steps, max_steps);
      }
    }

    std::vector<Vec2<S>> bounds;
    bounds.push_back(f.lo);
    for (auto& e : reps) bounds.push_back(e.p);
    bounds.push_back(f.hi);
    for (size_t k = 0; k + 1 < bounds.size(); ++k) {
      const Vec2<S>& a = bounds[k];
      const Vec2<S>& b = bounds[k + 1];
      if (sgn(cross<S>(a, b), "sweep: subwedge") <= 0) continue;
      Vec2<S> m = a + b;
      S tx = S((sgn(m.x, "sweep: midline") > 0 ? X1 : X0) / m.x);
      S ty = S((sgn(m.y, "sweep: midline") > 0 ? Y1 : Y0) / m.y);
      S t_out = tx < ty ? tx : ty;
      Vec2<S> E = m * t_out;
      auto cp = cross_at(X, W, f.top, f.idx, Vec2<S>{E - f.g}, m);
      stack.push_back({cp.top, cp.idx, E - cp.z, a, b});
    }
  }
}

} // namespace sweep_detail

} // namespace flatdyn
