#pragma once

#include <string>
#include <vector>

#include "flatdyn/iet.hpp"
#include "flatdyn/vec2.hpp"

namespace flatdyn {

// Cone condition on suspension data tau over pi: every proper top partial sum
// positive, every proper bottom partial sum negative, where the bottom sum up
// to position k is sum over {i : pi(i) <= k} tau_i.
template <class S>
bool validate_suspension(const Permutation& pi, const std::vector<S>& tau_1b,
                         std::string* why = nullptr) {
  int d = pi.d();
  if ((int)tau_1b.size() != d + 1) fail(Errc::validation, "tau must be 1-based size d+1");
  S top(0);
  for (int k = 1; k <= d - 1; ++k) {
    top = S(top + tau_1b[k]);
    if (sign_or_fail(top, "validate_suspension top") <= 0) {
      if (why) *why = "top partial sum " + std::to_string(k) + " not positive";
      return false;
    }
  }
  for (int k = 1; k <= d - 1; ++k) {
    S bot(0);
    for (int i = 1; i <= d; ++i)
      if (pi.of(i) <= k) bot = S(bot + tau_1b[i]);
    if (sign_or_fail(bot, "validate_suspension bottom") >= 0) {
      if (why) *why = "bottom partial sum " + std::to_string(k) + " not negative";
      return false;
    }
  }
  return true;
}

// tau_i = pi(i) - i. Always lies in the cone for admissible pi.
template <class S> std::vector<S> canonical_suspension(const Permutation& pi) {
  std::vector<S> tau(pi.d() + 1, S(0));
  for (int i = 1; i <= pi.d(); ++i) tau[i] = S(pi.of(i) - i);
  return tau;
}

// Translation surface from zippered-rectangle data zeta_i = (lambda_i, tau_i).
// Derived quantities follow the same position-indexed convention as Iet:
// xi^t[i] = sum_{j<i} zeta_j, xi^b[j] = sum_{pi(k)<j} zeta_k, both defined for
// 1..d+1 with xi^t[d+1] = xi^b[d+1] = xi_*.
template <class S> class Surface {
public:
  Surface(Permutation pi, std::vector<S> lambda_1b_input, std::vector<S> tau_1b_input)
      : iet_(pi, lambda_1b_input), tau_(1, S(0)) {
    int d = iet_.d();
    if (!iet_.pi().admissible())
      fail(Errc::validation, "permutation must be admissible");
    if ((int)tau_1b_input.size() != d)
      fail(Errc::validation, "tau length must equal d");
    for (auto& t : tau_1b_input) tau_.push_back(t);
    std::string why;
    if (!validate_suspension(iet_.pi(), tau_, &why))
      fail(Errc::validation, "suspension data outside the cone: " + why);

    xit_.assign(d + 2, Vec2<S>{});
    xib_.assign(d + 2, Vec2<S>{});
    for (int i = 2; i <= d + 1; ++i)
      xit_[i] = xit_[i - 1] + zeta(i - 1);
    for (int j = 2; j <= d + 1; ++j)
      xib_[j] = xib_[j - 1] + zeta(iet_.pi().inv(j - 1));

    theta_.assign(d + 1, Vec2<S>{});
    h_.assign(d + 1, S(0));
    area_ = S(0);
    for (int i = 1; i <= d; ++i) {
      theta_[i] = xib_[pi_of(i)] - xit_[i];
      h_[i] = S(xit_[i].y - xib_[pi_of(i)].y);
      if (sign_or_fail(h_[i], "Surface heights") <= 0)
        fail(Errc::validation, "non-positive rectangle height");
      area_ = S(area_ + iet_.lambda(i) * h_[i]);
    }
  }

  const Iet<S>& iet() const { return iet_; }
  const Permutation& pi() const { return iet_.pi(); }
  int d() const { return iet_.d(); }
  int pi_of(int i) const { return iet_.pi().of(i); }
  int pi_inv(int j) const { return iet_.pi().inv(j); }

  Vec2<S> zeta(int i) const { return {iet_.lambda(i), tau_[i]}; }
  const S& lambda(int i) const { return iet_.lambda(i); }
  const S& tau(int i) const { return tau_[i]; }
  const Vec2<S>& xit(int i) const { return xit_[i]; } // 1..d+1
  const Vec2<S>& xib(int j) const { return xib_[j]; } // 1..d+1
  Vec2<S> xi_star() const { return xit_[d() + 1]; }
  const Vec2<S>& theta(int i) const { return theta_[i]; }
  const S& h(int i) const { return h_[i]; }
  const S& area() const { return area_; }
  S lambda_star() const { return iet_.length(); }
  S tau_star() const { return xit_[d() + 1].y; }
  S h_min() const {
    S m = h_[1];
    for (int i = 2; i <= d(); ++i)
      if (h_[i] < m) m = h_[i];
    return m;
  }

  std::vector<S> lambda_vec() const {
    std::vector<S> v;
    for (int i = 1; i <= d(); ++i) v.push_back(iet_.lambda(i));
    return v;
  }
  std::vector<S> tau_vec() const {
    std::vector<S> v;
    for (int i = 1; i <= d(); ++i) v.push_back(tau_[i]);
    return v;
  }

  // Half-open rectangles, top copy over I and bottom copy below it.
  struct Rect {
    S x0, x1, y0, y1;
  };
  Rect rect_top(int i) const {
    return {iet_.ut(i), iet_.ut(i + 1), S(0), h_[i]};
  }
  Rect rect_bottom(int j) const {
    int i = pi_inv(j);
    return {iet_.ub(j), iet_.ub(j + 1), S(-h_[i]), S(0)};
  }

private:
  Iet<S> iet_;
  std::vector<S> tau_;
  std::vector<Vec2<S>> xit_, xib_, theta_;
  std::vector<S> h_;
  S area_;
};

template <class S>
Surface<S> build_surface(const Permutation& pi, std::vector<S> lambda,
                         std::vector<S> tau) {
  return Surface<S>(pi, std::move(lambda), std::move(tau));
}

template <class S>
Surface<S> build_canonical(const Permutation& pi, std::vector<S> lambda) {
  std::vector<S> tau;
  for (int i = 1; i <= pi.d(); ++i) tau.push_back(S(pi.of(i) - i));
  return Surface<S>(pi, std::move(lambda), std::move(tau));
}

// Teichmueller flow: (pi, e^t lambda, e^-t tau).
template <class S> Surface<S> flow_surface(const Surface<S>& X, const S& t) {
  using tr = scalar_traits<S>;
  S et = tr::exp(t), emt = tr::exp(S(-t));
  std::vector<S> l, ta;
  for (int i = 1; i <= X.d(); ++i) {
    l.push_back(S(X.lambda(i) * et));
    ta.push_back(S(X.tau(i) * emt));
  }
  return Surface<S>(X.pi(), std::move(l), std::move(ta));
}

// Rotate the vertical direction by theta: zeta_i(theta) = R_theta zeta_i,
// i.e. lambda(theta) = cos lambda - sin tau, tau(theta) = sin lambda + cos tau.
// Validation of the rotated data is performed by the Surface constructor
// (lazy in the sense that the admissible arc J is never computed up front).
template <class S> Surface<S> rotate_surface(const Surface<S>& X, const S& theta) {
  using tr = scalar_traits<S>;
  S c = tr::cos(theta), s = tr::sin(theta);
  std::vector<S> l, ta;
  for (int i = 1; i <= X.d(); ++i) {
    l.push_back(S(c * X.lambda(i) - s * X.tau(i)));
    ta.push_back(S(s * X.lambda(i) + c * X.tau(i)));
  }
  return Surface<S>(X.pi(), std::move(l), std::move(ta));
}

// Affine reparametrization of the normalized singularity positions under
// rotation, for rotational pi with tau_* possibly nonzero:
//   s(theta) = tan(theta) / (lambda_* - tau_* tan(theta)),
//   v = (tau_*/lambda_*) lambda - tau,
//   uhat^t_p(theta) = uhat^t_p(0) + s(theta) sum_{k<p} v_k,
//   uhat^b_q(theta) = uhat^b_q(0) + s(theta) sum_{pi(k)<q} v_k,
//   alpha(theta) = alpha(0) + s(theta) area / lambda_*.
// Positions are affine in alpha: uhat = A + alpha(theta) B with
// B = (partial v sum) lambda_* / area.
template <class S> struct RotationReparam {
  std::vector<S> v;        // 1-based
  std::vector<S> At, Bt;   // coefficients for uhat^t_p, p = 1..d
  std::vector<S> Ab, Bb;   // coefficients for uhat^b_q (position-indexed)
  S alpha0;

  S s_of_theta(const S& theta, const S& lambda_star, const S& tau_star) const {
    using tr = scalar_traits<S>;
    S t = S(tr::sin(theta) / tr::cos(theta));
    return S(t / (lambda_star - tau_star * t));
  }
};

template <class S> RotationReparam<S> rotation_reparam(const Surface<S>& X) {
  if (!X.pi().rotational())
    fail(Errc::validation, "rotation_reparam needs rotational pi");
  int d = X.d();
  RotationReparam<S> out;
  out.v.assign(d + 1, S(0));
  S ls = X.lambda_star(), ts = X.tau_star();
  for (int i = 1; i <= d; ++i)
    out.v[i] = S(ts / ls * X.lambda(i) - X.tau(i));
  out.alpha0 = S(X.iet().ub(X.pi_of(1)) / ls);
  out.At.assign(d + 1, S(0));
  out.Bt.assign(d + 1, S(0));
  out.Ab.assign(d + 1, S(0));
  out.Bb.assign(d + 1, S(0));
  for (int p = 1; p <= d; ++p) {
    S sum(0);
    for (int k = 1; k < p; ++k) sum = S(sum + out.v[k]);
    out.Bt[p] = S(sum * ls / X.area());
    out.At[p] = S(X.iet().ut(p) / ls - out.alpha0 * out.Bt[p]);
  }
  for (int q = 1; q <= d; ++q) {
    S sum(0);
    for (int k = 1; k <= d; ++k)
      if (X.pi_of(k) < q) sum = S(sum + out.v[k]);
    out.Bb[q] = S(sum * ls / X.area());
    out.Ab[q] = S(X.iet().ub(q) / ls - out.alpha0 * out.Bb[q]);
  }
  return out;
}

} // namespace flatdyn
