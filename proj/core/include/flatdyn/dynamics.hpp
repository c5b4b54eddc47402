#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "flatdyn/connections.hpp"
#include "flatdyn/phi.hpp"

namespace flatdyn {

// Closed-form behavior of one holonomy v under F_t = diag(e^t, e^{-t}).
struct FlowQuantities {
  double re, im, len, cot;
  double area_q;      // |Re v| * |Im v|, flow-invariant
  double min_len2;    // 2 * area_q
  double min_instant; // argmin_t of len(t)
  bool short_now;     // len < 1 at the queried t
  bool lemma_ok;      // len < 1 at t >= 0 implies t > log len(0)
};

inline FlowQuantities flow_quantities(double re0, double im0, double t) {
  if (im0 == 0) fail(Errc::validation, "flow_quantities: Im v = 0");
  FlowQuantities f{};
  f.re = std::exp(t) * re0;
  f.im = std::exp(-t) * im0;
  f.len = std::hypot(f.re, f.im);
  f.cot = f.re / f.im;
  f.area_q = std::abs(re0) * std::abs(im0);
  f.min_len2 = 2 * f.area_q;
  f.min_instant = re0 == 0 ? std::numeric_limits<double>::infinity()
                           : -0.5 * std::log(std::abs(re0 / im0));
  f.short_now = f.len < 1;
  f.lemma_ok = t < 0 || !f.short_now || t > std::log(std::hypot(re0, im0));
  return f;
}

inline double flowed_length2(double re0, double im0, double t) {
  double a = std::exp(t) * re0, b = std::exp(-t) * im0;
  return a * a + b * b;
}

// ---------------------------------------------------------------------------
// Systole trajectory from one enumeration: a full sweep up to L_full plus an
// almost-vertical scan (Im <= im_max, |Re| <= re_cap) to cover the late dips.
// Anything missed has, at time t, length at least
//   max(e^{-t} L_full, min(e^{-t} im_max, e^{t} re_cap)),
// which yields the per-t certification flag.
// ---------------------------------------------------------------------------
struct TrajectoryBudget {
  double L_full = 20.0;
  double im_max = 1000.0;
  double re_cap = 0.05;
  EnumBudget enum_budget{};
};

struct TrajectoryPoint {
  double t;
  double sys;
  bool certified;
  std::map<std::pair<int, int>, double> bundle_sys;
};

template <class S>
struct CandidateSet {
  std::vector<SaddleConnection<S>> list; // up-oriented + horizontal(+)
  TrajectoryBudget budget;
};

template <class S>
CandidateSet<S> trajectory_candidates(const Surface<S>& X,
                                      const TrajectoryBudget& b = {}) {
  CandidateSet<S> cs;
  cs.budget = b;
  auto full = enumerate_connections(X, S(b.L_full), b.enum_budget);
  for (auto& c : full)
    if (c.orient != Orientation::down) cs.list.push_back(c);
  S cap = S(b.re_cap);
  auto tall = vertical_candidate_scan<S>(
      X, [cap](const S&) { return cap; }, S(b.im_max), b.enum_budget);
  for (auto& c : tall) cs.list.push_back(c);
  detail::sort_and_dedup(cs.list);
  return cs;
}

template <class S>
std::vector<TrajectoryPoint> systole_trajectory(
    const Surface<S>& X, const std::vector<double>& t_grid,
    const TrajectoryBudget& b = {}, bool per_bundle = false) {
  auto cs = trajectory_candidates(X, b);
  if (cs.list.empty())
    fail(Errc::budget, "systole_trajectory: no candidate connections in budget");
  struct Cand {
    double re, im;
    std::pair<int, int> bundle;
  };
  std::vector<Cand> cands;
  cands.reserve(cs.list.size());
  for (auto& c : cs.list)
    cands.push_back({scalar_traits<S>::to_double(c.hol.x),
                     scalar_traits<S>::to_double(c.hol.y), c.bundle});

  std::vector<TrajectoryPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    TrajectoryPoint pt;
    pt.t = t;
    double best = std::numeric_limits<double>::infinity();
    for (auto& c : cands) {
      double l2 = flowed_length2(c.re, c.im, t);
      if (l2 < best) best = l2;
      if (per_bundle && c.bundle.first) {
        double& s = pt.bundle_sys
                        .try_emplace(c.bundle,
                                     std::numeric_limits<double>::infinity())
                        .first->second;
        if (l2 < s) s = l2;
      }
    }
    pt.sys = std::sqrt(best);
    for (auto& [k, v] : pt.bundle_sys) v = std::sqrt(v);
    double unseen = std::max(std::exp(-t) * b.L_full,
                             std::min(std::exp(-t) * b.im_max,
                                      std::exp(t) * b.re_cap));
    pt.certified = pt.sys <= unseen;
    out.push_back(std::move(pt));
  }
  return out;
}

// -log sys(t) / log t for t >= e, with the running sup.
struct LoglawSeries {
  std::vector<double> t, stat, running_sup;
  double sup = -std::numeric_limits<double>::infinity();
};

inline LoglawSeries loglaw_statistic(const std::vector<TrajectoryPoint>& traj) {
  LoglawSeries s;
  for (auto& pt : traj) {
    if (pt.t < std::exp(1.0)) continue;
    double v = -std::log(pt.sys) / std::log(pt.t);
    s.t.push_back(pt.t);
    s.stat.push_back(v);
    if (v > s.sup) s.sup = v;
    s.running_sup.push_back(s.sup);
  }
  if (s.t.empty()) fail(Errc::validation, "loglaw_statistic: need t >= e");
  return s;
}

// ---------------------------------------------------------------------------
// Khinchin-type scans.
// ---------------------------------------------------------------------------

// Up-oriented saddle connections with |Re v| < phi(|v|) and |v| <= L_max,
// found by the almost-vertical scan (phi is non-increasing, so testing the
// displacement against phi(Im v) over-collects and never misses). When
// tau_* = 0 the horizontal pair is tested directly. One representative per
// +/- pair is reported.
template <class S>
std::vector<SaddleConnection<S>> khinchin_surface_scan(
    const Surface<S>& X, const PhiSpec& phi, const S& L_max,
    std::optional<std::pair<int, int>> bundle = std::nullopt,
    const EnumBudget& budget = {}) {
  auto bound = [&phi](const S& im) {
    return S(phi_eval(phi, scalar_traits<S>::to_double(im)));
  };
  auto cands = vertical_candidate_scan<S>(X, bound, L_max, budget);
  std::vector<SaddleConnection<S>> out;
  for (auto& c : cands) {
    if (bundle && c.bundle != *bundle) continue;
    if (c.len2 > S(L_max * L_max)) continue;
    double len = c.length();
    if (!(scalar_traits<S>::to_double(scalar_traits<S>::abs(c.hol.x)) <
          phi_eval(phi, len)))
      continue;
    out.push_back(c);
  }
  if (!bundle && zero_test<S>(X.tau_star()) == Sign::zero) {
    double ls = scalar_traits<S>::to_double(X.lambda_star());
    if (ls <= scalar_traits<S>::to_double(L_max) && ls < phi_eval(phi, ls)) {
      Vec2<S> hz{X.lambda_star(), S(0)};
      out.push_back({Triple{}, hz, hz.norm2(), {0, 0}, Orientation::horizontal});
    }
  }
  return out;
}

// Dyadic length-band counts for a solution list (bands [2^k, 2^{k+1})).
template <class S>
std::map<int, std::size_t> dyadic_band_counts(
    const std::vector<SaddleConnection<S>>& cs) {
  std::map<int, std::size_t> bands;
  for (auto& c : cs) {
    int k = static_cast<int>(std::floor(std::log2(std::max(c.length(), 1e-300))));
    ++bands[k];
  }
  return bands;
}

struct IetSolution {
  Triple triple;
  double value; // |T^n u^b_q - u^t_p|
  bool reduced;
};

// Triples with |T^n u^b_q - u^t_p| < phi(n); one orbit pass per q.
template <class S>
std::vector<IetSolution> khinchin_iet_scan(
    const Iet<S>& T, const PhiSpec& phi, long long n_max,
    std::optional<std::pair<int, int>> pair = std::nullopt,
    bool reduced_only = false) {
  std::vector<IetSolution> out;
  for (int q = 2; q <= T.d(); ++q) {
    if (pair && pair->first != q) continue;
    S x = T.ub(q);
    for (long long n = 0; n <= n_max; ++n) {
      for (int p = 2; p <= T.d(); ++p) {
        if (pair && pair->second != p) continue;
        S disp = S(x - T.ut(p));
        double v = scalar_traits<S>::to_double(scalar_traits<S>::abs(disp));
        if (!(v < phi_eval(phi, static_cast<double>(n)))) continue;
        Triple tr{q, p, n};
        // An exact hit (disp = 0) is a connection of the map itself;
        // is_reduced refuses it, but the copies test still applies.
        bool red = sign_or_fail<S>(disp, "khinchin_iet_scan displacement") == 0
                       ? copies_clear(T, tr)
                       : is_reduced(T, tr);
        if (reduced_only && !red) continue;
        out.push_back({tr, v, red});
      }
      if (n == n_max) break;
      try {
        x = T.apply(x);
      } catch (const FlatError& e) {
        if (e.code() == Errc::singularity) break; // orbit ends for this q
        throw;
      }
    }
  }
  return out;
}

// Sum over holonomies of the rotation measure of the Khinchin condition:
// leb{theta : |Re(R_theta v)| <= phi(|v|)} = 4 arcsin(min(1, phi/|v|)),
// clamped to 2 pi. Returned as dyadic-band partial sums.
struct BorelCantelli {
  std::vector<std::pair<int, double>> band_sums; // (band k, sum through k)
  double total = 0;
};

template <class S>
BorelCantelli borel_cantelli_sum(const Surface<S>& X, const PhiSpec& phi,
                                 const S& L_max, const EnumBudget& budget = {}) {
  auto cs = enumerate_connections(X, L_max, budget);
  std::map<int, double> per_band;
  for (auto& c : cs) {
    double len = c.length();
    double ratio = phi_eval(phi, len) / len;
    double leb = ratio >= 1 ? 2 * M_PI : 4 * std::asin(ratio);
    int k = static_cast<int>(std::floor(std::log2(std::max(len, 1e-300))));
    per_band[k] += leb;
  }
  BorelCantelli out;
  double acc = 0;
  for (auto& [k, v] : per_band) {
    acc += v;
    out.band_sums.emplace_back(k, acc);
  }
  out.total = acc;
  return out;
}

// Per-theta count of Khinchin solutions by bundle on the rotated surface;
// reports how many bundle pairs meet the threshold K.
struct BundleScanRow {
  double theta;
  bool ok = true; // false when the rotation left the cone or went uncertain
  std::map<std::pair<int, int>, std::size_t> counts;
  std::size_t pairs_at_K = 0;
};

template <class S>
std::vector<BundleScanRow> rotation_bundle_scan(
    const Surface<S>& X, const PhiSpec& phi,
    const std::vector<double>& thetas, const S& L_max, std::size_t K,
    const EnumBudget& budget = {}) {
  std::vector<BundleScanRow> rows;
  for (double th : thetas) {
    BundleScanRow row;
    row.theta = th;
    try {
      Surface<S> Y = rotate_surface(X, S(th));
      auto sols = khinchin_surface_scan(Y, phi, L_max, std::nullopt, budget);
      for (auto& c : sols)
        if (c.orient == Orientation::up) ++row.counts[c.bundle];
      for (auto& [b, n] : row.counts)
        if (n >= K) ++row.pairs_at_K;
    } catch (const FlatError&) {
      row.ok = false;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Violations of min_instant <= (1+eps) log|gamma| over long connections.
struct MinInstantReport {
  std::size_t checked = 0, violations = 0;
};

template <class S>
MinInstantReport min_instant_bound_check(const Surface<S>& X, double eps,
                                         const S& L_max, double len_floor = M_E,
                                         const EnumBudget& budget = {}) {
  auto cs = enumerate_connections(X, L_max, budget);
  MinInstantReport rep;
  for (auto& c : cs) {
    if (c.orient != Orientation::up) continue;
    double len = c.length();
    if (len < len_floor) continue;
    double re = scalar_traits<S>::to_double(c.hol.x);
    double im = scalar_traits<S>::to_double(c.hol.y);
    double tau = -0.5 * std::log(std::abs(re / im));
    ++rep.checked;
    if (tau > (1 + eps) * std::log(len)) ++rep.violations;
  }
  return rep;
}

} // namespace flatdyn
