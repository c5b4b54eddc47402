#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "flatdyn/cf.hpp"
#include "flatdyn/phi.hpp"
#include "flatdyn/scalar.hpp"
#include "flatdyn/vec2.hpp"

namespace flatdyn {

// Twisted (inhomogeneous) continued fraction machinery: approximating the
// line through alpha_hat = (1, alpha) by points of the shifted lattice
// Z^2 + v.

namespace twisted_detail {

template <class S>
Vec2<S> to_vec(const IVec& w) {
  return {scalar_traits<S>::from_rational(Rational(w.x)),
          scalar_traits<S>::from_rational(Rational(w.y))};
}

// det against alpha_hat: w.x * alpha - w.y.
template <class S>
S det_alpha(const Vec2<S>& w, const S& alpha) {
  return S(S(w.x * alpha) - w.y);
}

// Shift z into (0,1] by an integer; integers land on 1 exactly.
template <class S>
S shift_01(const S& z, const char* what) {
  BigInt f = scalar_traits<S>::floor(z);
  S frac = S(z - scalar_traits<S>::from_rational(Rational(f)));
  if constexpr (!scalar_traits<S>::is_exact) {
    Sign lo = zero_test<S>(frac);
    Sign hi = zero_test<S>(S(S(1) - frac));
    bool exact_int = frac == S(0);
    if ((!exact_int && lo == Sign::uncertain) || hi == Sign::uncertain)
      fail(Errc::uncertain,
           std::string("coordinate within epsilon of an integer in ") + what);
  }
  return frac == S(0) ? S(1) : frac;
}

template <class S>
BigInt nearest_int(const S& z) {
  return scalar_traits<S>::floor(S(z + scalar_traits<S>::from_rational(Rational(1, 2))));
}

} // namespace twisted_detail

// The unique point of (Z^2 + v) inside the half-open cell
// {s*r + t*r' : s, t in (0,1]}; by unimodularity the basis coordinates of v
// just get translated into (0,1].
template <class S>
Vec2<S> fundamental_rep(const Convergent& c, const Vec2<S>& v) {
  IVec r = c.r, rp = c.r_prime();
  BigInt D = r.x * rp.y - r.y * rp.x;
  if (D != 1 && D != -1)
    fail(Errc::validation, "fundamental_rep: basis is not unimodular");
  S Dx = scalar_traits<S>::from_rational(Rational(D));
  // inverse of the column matrix [r r'] applied to v
  S s0 = S(S(scalar_traits<S>::from_rational(Rational(rp.y)) * v.x -
             scalar_traits<S>::from_rational(Rational(rp.x)) * v.y) / Dx);
  S t0 = S(S(scalar_traits<S>::from_rational(Rational(r.x)) * v.y -
             scalar_traits<S>::from_rational(Rational(r.y)) * v.x) / Dx);
  S s = twisted_detail::shift_01(s0, "fundamental_rep");
  S t = twisted_detail::shift_01(t0, "fundamental_rep");
  Vec2<S> rr = twisted_detail::to_vec<S>(r), rrp = twisted_detail::to_vec<S>(rp);
  return {S(S(s * rr.x) + S(t * rrp.x)), S(S(s * rr.y) + S(t * rrp.y))};
}

template <class S>
struct TwistedApprox {
  int n = 1;
  int N = 3;
  Convergent base;         // r_{2N(n-1)}
  Vec2<S> vr;              // fundamental representative v(r)
  BigInt nu = 0;
  Vec2<S> s, s_prime;
  BigInt k = 0, j = 0;     // s = (k + x, j + y)
  BigInt kp = 0, jp = 0;   // s' = (kp + x, jp + y)
};

// One step of the twisted algorithm at level n: pick the base convergent
// r = r_{2N(n-1)}, take the coset representative v(r) and push it just
// across the line through alpha_hat by multiples of r or r'.
template <class S>
TwistedApprox<S> twisted_step(const S& alpha, const Vec2<S>& v, int N, int n,
                              const std::vector<Convergent>& convs) {
  if (N < 3) fail(Errc::validation, "twisted_step: N must be >= 3");
  if (n < 1) fail(Errc::validation, "twisted_step: n must be >= 1");
  int idx = 2 * N * (n - 1);
  if (idx >= static_cast<int>(convs.size()))
    fail(Errc::validation, "twisted_step: continued fraction too short");
  const Convergent& c = convs[idx];
  IVec r = c.r, rp = c.r_prime();

  Vec2<S> rr = twisted_detail::to_vec<S>(r);
  Vec2<S> rrp = twisted_detail::to_vec<S>(rp);
  S Dr = twisted_detail::det_alpha(rr, alpha);     // > 0 (even convergent)
  S Drp = twisted_detail::det_alpha(rrp, alpha);   // < 0
  if (sign_or_fail<S>(Dr, "twisted_step Dr") <= 0 ||
      sign_or_fail<S>(Drp, "twisted_step Drp") >= 0)
    fail(Errc::structure, "twisted_step: base convergent on the wrong side");

  TwistedApprox<S> out;
  out.n = n;
  out.N = N;
  out.base = c;
  out.vr = fundamental_rep(c, v);
  S Dv = twisted_detail::det_alpha(out.vr, alpha);
  int sv = sign_or_fail<S>(Dv, "twisted_step Dv");
  if (sv == 0)
    fail(Errc::degenerate, "twisted_step: coset point on the line (alpha outside the admissible set)");

  BigInt kv = twisted_detail::nearest_int(S(out.vr.x - v.x));
  BigInt jv = twisted_detail::nearest_int(S(out.vr.y - v.y));

  if (sv < 0) {
    // r < alpha_hat < v(r): climb with +r until just past the line,
    // at least once so s' = s - r stays above v(r)
    BigInt q = scalar_traits<S>::floor(S(S(-Dv) / Dr));
    out.nu = q + 1;
    if (out.nu < 1) out.nu = 1;
    S nuS = scalar_traits<S>::from_rational(Rational(out.nu));
    out.s = {S(out.vr.x + S(nuS * rr.x)), S(out.vr.y + S(nuS * rr.y))};
    out.s_prime = {S(out.s.x - rr.x), S(out.s.y - rr.y)};
    out.k = kv + out.nu * r.x;
    out.j = jv + out.nu * r.y;
    out.kp = out.k - r.x;
    out.jp = out.j - r.y;
  } else {
    // v(r) < alpha_hat < r': descend with +r' until just short of the line
    BigInt q = -scalar_traits<S>::floor(S(Dv / Drp)); // ceil(Dv / -Drp)
    out.nu = q - 1;
    if (out.nu < 0) out.nu = 0;
    S nuS = scalar_traits<S>::from_rational(Rational(out.nu));
    out.s = {S(out.vr.x + S(nuS * rrp.x)), S(out.vr.y + S(nuS * rrp.y))};
    out.s_prime = {S(out.s.x + rrp.x), S(out.s.y + rrp.y)};
    out.k = kv + out.nu * rp.x;
    out.j = jv + out.nu * rp.y;
    out.kp = out.k + rp.x;
    out.jp = out.j + rp.y;
  }

  // invariants: s < alpha_hat < s', 0 < det[s, s'] <= 1
  S ds = twisted_detail::det_alpha(out.s, alpha);
  S dsp = twisted_detail::det_alpha(out.s_prime, alpha);
  if (!(ds > S(0)) || !(dsp < S(0)))
    fail(Errc::structure, "twisted_step: straddling invariant failed");
  S dd = det2(out.s, out.s_prime);
  S one_plus = S(S(1) + scalar_traits<S>::epsilon());
  if (!(dd > S(0)) || !(dd <= one_plus))
    fail(Errc::structure, "twisted_step: det[s, s'] outside (0, 1]");
  return out;
}

template <class S>
TwistedApprox<S> twisted_step(const S& alpha, const Vec2<S>& v, int N, int n) {
  return twisted_step(alpha, v, N, n, cf_expand(alpha, 2 * N * (n - 1) + 1));
}

// The renormalized distance of alpha_hat from s_n inside the atom, an affine
// bijection of the atom onto [0,1). Also checks the fractional-part identity
// det[s_n, alpha_hat] = {(k_n + x) alpha - y}.
template <class S>
S upsilon(const TwistedApprox<S>& t, const S& alpha, const Vec2<S>& v) {
  S ds = twisted_detail::det_alpha(t.s, alpha);
  S dd = det2(t.s, t.s_prime);
  // fractional-part identity
  S z = S(S(S(scalar_traits<S>::from_rational(Rational(t.k)) + v.x) * alpha) - v.y);
  BigInt fz = scalar_traits<S>::floor(z);
  S frac = S(z - scalar_traits<S>::from_rational(Rational(fz)));
  S diff = scalar_traits<S>::abs(S(frac - ds));
  if constexpr (scalar_traits<S>::is_exact) {
    if (diff != S(0))
      fail(Errc::structure, "upsilon: fractional identity failed");
  } else {
    if (diff > S(scalar_traits<S>::epsilon() * S(16)))
      fail(Errc::structure, "upsilon: fractional identity failed");
  }
  S kpx = S(scalar_traits<S>::from_rational(Rational(t.kp)) + v.x);
  return S(S(kpx / dd) * ds);
}

// ---------------------------------------------------------------------------
// Solutions of {(n + x) alpha - y} < phi(n), n = 1..n_max.
// direct: brute-force scan in double precision.
// twisted: flags n = k_m where the sufficiency test at level m certifies a
// solution; every flagged n must appear in the direct list.
// ---------------------------------------------------------------------------
enum class TwistedMethod { direct, twisted, both };

struct TwistedScan {
  std::vector<long long> direct;   // all solutions found by scanning
  std::vector<long long> flagged;  // solutions certified via the twisted CF
  bool cross_checked = false;      // flagged subset of direct (method both)
  int levels_done = 0;             // twisted levels completed before stopping
};

template <class S>
TwistedScan twisted_khinchin_scan(const S& alpha, const Vec2<S>& v,
                                  const PhiSpec& phi, long long n_max,
                                  TwistedMethod method = TwistedMethod::both,
                                  int N = 3, double gamma_prime = 1.1) {
  if (n_max < 1) fail(Errc::validation, "twisted_khinchin_scan: n_max >= 1");
  TwistedScan out;
  double a = scalar_traits<S>::to_double(alpha);
  double x = scalar_traits<S>::to_double(v.x);
  double y = scalar_traits<S>::to_double(v.y);

  if (method != TwistedMethod::twisted) {
    for (long long n = 1; n <= n_max; ++n) {
      double z = (static_cast<double>(n) + x) * a - y;
      double frac = z - std::floor(z);
      if (frac < phi_eval(phi, static_cast<double>(n))) out.direct.push_back(n);
    }
  }

  if (method != TwistedMethod::direct) {
    // precompute the expansion once, as deep as the deepest level needs
    int m_max = 0;
    while (std::exp(gamma_prime * (m_max + 1)) <= static_cast<double>(n_max))
      ++m_max;
    try {
      std::vector<Convergent> convs = cf_expand(alpha, 2 * N * std::max(0, m_max - 1) + 1);
      for (int m = 1; m <= m_max; ++m) {
        double nm = std::exp(gamma_prime * m);
        double psi = nm * phi_eval(phi, nm);
        TwistedApprox<S> t = twisted_step(alpha, v, N, m, convs);
        S Y = upsilon(t, alpha, v);
        if (t.k < 1 || t.k > n_max) { out.levels_done = m; continue; }
        double kd = t.k.template convert_to<double>();
        double kpd = t.kp.template convert_to<double>();
        bool certified = scalar_traits<S>::to_double(Y) < psi &&
                         psi <= (kpd + x) * phi_eval(phi, kd);
        if (certified)
          out.flagged.push_back(t.k.template convert_to<long long>());
        out.levels_done = m;
      }
    } catch (const FlatError&) {
      // precision or admissibility ran out; keep the levels completed so far
    }
    std::sort(out.flagged.begin(), out.flagged.end());
    out.flagged.erase(std::unique(out.flagged.begin(), out.flagged.end()),
                      out.flagged.end());
  }

  if (method == TwistedMethod::both) {
    std::set<long long> dset(out.direct.begin(), out.direct.end());
    out.cross_checked = std::all_of(
        out.flagged.begin(), out.flagged.end(),
        [&](long long n) { return dset.count(n) != 0; });
  }
  return out;
}

} // namespace flatdyn
