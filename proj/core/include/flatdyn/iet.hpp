#pragma once

#include <optional>
#include <tuple>
#include <vector>

#include "flatdyn/error.hpp"
#include "flatdyn/permutation.hpp"
#include "flatdyn/scalar.hpp"

namespace flatdyn {

// Interval exchange transformation with data (pi, lambda). Top singularities
// sit at u^t[i] = sum_{j<i} lambda_j. Bottom singularities are indexed by
// POSITION along the interval: u^b[j] = sum_{pi(k)<j} lambda_k, so u^b[j] is
// the j-th bottom division point from the left. The branch over I^t_i
// translates by delta_i = u^b[pi(i)] - u^t[i].
template <class S> class Iet {
public:
  Iet(Permutation pi, std::vector<S> lambda_one_based)
      : pi_(std::move(pi)), lam_(1, S(0)) {
    int d = pi_.d();
    if ((int)lambda_one_based.size() != d)
      fail(Errc::validation, "lambda length must equal d");
    for (auto& l : lambda_one_based) {
      if (sign_or_fail(l, "Iet lambda") <= 0)
        fail(Errc::validation, "lambda entries must be positive");
      lam_.push_back(l);
    }
    ut_.assign(d + 2, S(0));
    ub_.assign(d + 2, S(0));
    for (int i = 1; i <= d + 1; ++i) {
      ut_[i] = i == 1 ? S(0) : S(ut_[i - 1] + lam_[i - 1]);
    }
    // u^b by position: interval at position j has length lambda_{pi^{-1}(j)}.
    for (int j = 1; j <= d + 1; ++j) {
      ub_[j] = j == 1 ? S(0) : S(ub_[j - 1] + lam_[pi_.inv(j - 1)]);
    }
    delta_.assign(d + 1, S(0));
    for (int i = 1; i <= d; ++i) delta_[i] = S(ub_[pi_.of(i)] - ut_[i]);
  }

  const Permutation& pi() const { return pi_; }
  int d() const { return pi_.d(); }
  const S& lambda(int i) const { return lam_[i]; }
  const S& ut(int i) const { return ut_[i]; }      // i in 1..d+1; ut(d+1) = |I|
  const S& ub(int j) const { return ub_[j]; }      // position-indexed
  const S& delta(int i) const { return delta_[i]; }
  S length() const { return ut_[d() + 1]; }

  // Index i with x in I^t_i = [ut(i), ut(i+1)); x must lie in [0, |I|).
  // Points epsilon-close to a division (float backends) raise uncertain.
  int locate_top(const S& x) const {
    return locate(ut_, x, "locate_top");
  }
  int locate_bottom(const S& x) const {
    return locate(ub_, x, "locate_bottom");
  }

  enum class Dir { forward, backward };

  // One step of T (or T^{-1}). Landing exactly on a singular division point
  // of the chosen direction raises Errc::singularity.
  S apply(const S& x, Dir dir = Dir::forward) const {
    if (dir == Dir::forward) {
      int i = locate_top(x);
      return S(x + delta_[i]);
    }
    int j = locate_bottom(x);
    int i = pi_.inv(j);
    return S(x - delta_[i]);
  }

  // n-th image; n may be negative.
  S iterate(const S& x, long n) const {
    S y = x;
    Dir dir = n >= 0 ? Dir::forward : Dir::backward;
    for (long k = 0; k < (n >= 0 ? n : -n); ++k) y = apply(y, dir);
    return y;
  }

  // Birkhoff sum S_n f(x) = f(x) + f(Tx) + ... + f(T^{n-1} x) of a map from
  // branch index to V. n = 0 gives V{}.
  template <class V, class F> V birkhoff(const S& x, long n, F&& f) const {
    V acc{};
    S y = x;
    for (long k = 0; k < n; ++k) {
      int i = locate_top(y);
      acc = acc + f(i);
      y = S(y + delta_[i]);
    }
    return acc;
  }

  struct ConnectionHit {
    int q = 0, p = 0;
    long n = 0;
    bool uncertain = false; // float backend saw comparisons inside epsilon
  };

  // Smallest (n, q, p) lexicographically with T^n u^b[q] = u^t[p], scanning
  // q, p in 2..d and n in 0..n_max. Orbits stop early when they hit a
  // forward singularity (which is precisely such a connection).
  std::optional<ConnectionHit> detect_connection(long n_max) const {
    std::optional<ConnectionHit> best;
    bool any_uncertain = false;
    for (int q = 2; q <= d(); ++q) {
      S x = ub_[q];
      for (long n = 0; n <= n_max; ++n) {
        bool stop = false;
        for (int p = 2; p <= d(); ++p) {
          Sign z = zero_test(S(x - ut_[p]));
          if (z == Sign::zero) {
            ConnectionHit hit{q, p, n, false};
            if (!best || std::tie(n, q, p) < std::tie(best->n, best->q, best->p))
              best = hit;
            stop = true;
            break;
          }
          if (z == Sign::uncertain) {
            if constexpr (!scalar_traits<S>::is_exact) {
              // treat as a hit but flag it
              ConnectionHit hit{q, p, n, true};
              if (!best ||
                  std::tie(n, q, p) < std::tie(best->n, best->q, best->p))
                best = hit;
              any_uncertain = true;
              stop = true;
              break;
            }
          }
        }
        if (stop || n == n_max) break;
        x = apply(x);
      }
    }
    if (best) best->uncertain = best->uncertain || any_uncertain;
    return best;
  }

  // Rotation number for rotational pi: alpha = u^b[pi(1)] / |I|.
  S rotation_number() const {
    if (!pi_.rotational())
      fail(Errc::validation, "rotation_number needs rotational pi");
    return S(ub_[pi_.of(1)] / length());
  }

  // The inverse transformation as an IET in its own right: top intervals of
  // the mirror are the bottom intervals of this one, pi_mirror = pi^{-1}.
  Iet mirror() const {
    std::vector<S> ml;
    for (int j = 1; j <= d(); ++j) ml.push_back(lam_[pi_.inv(j)]);
    std::vector<int> img;
    for (int j = 1; j <= d(); ++j) img.push_back(pi_.inv(j));
    return Iet(Permutation(img), std::move(ml));
  }

private:
  int locate(const std::vector<S>& u, const S& x, const char* what) const {
    int d = pi_.d();
    if (sign_or_fail(x, what) < 0 || sign_or_fail(S(x - u[d + 1]), what) >= 0)
      fail(Errc::validation, std::string(what) + ": point outside [0,|I|)");
    for (int i = d; i >= 1; --i) {
      Sign s = scalar_traits<S>::sign(S(x - u[i]));
      if (s == Sign::uncertain) {
        if (i == 1) return 1; // x ~ 0 with x >= 0 checked above
        fail(Errc::uncertain,
             std::string(what) + ": point within epsilon of a division");
      }
      if (s == Sign::zero) {
        if (i == 1) return 1;
        fail(Errc::singularity,
             std::string(what) + ": point is a singular division");
      }
      if (s == Sign::positive) return i;
    }
    fail(Errc::structure, std::string(what) + ": fell off the partition");
  }

  Permutation pi_;
  std::vector<S> lam_, ut_, ub_, delta_;
};

} // namespace flatdyn
