#pragma once

#include "flatdyn/scalar.hpp"

namespace flatdyn {

// Planar vector (x horizontal, y vertical). Immutable style: all operations
// return fresh values.
template <class S> struct Vec2 {
  S x{}, y{};

  Vec2() = default;
  Vec2(S a, S b) : x(std::move(a)), y(std::move(b)) {}

  Vec2 operator+(const Vec2& o) const { return {S(x + o.x), S(y + o.y)}; }
  Vec2 operator-(const Vec2& o) const { return {S(x - o.x), S(y - o.y)}; }
  Vec2 operator-() const { return {S(-x), S(-y)}; }
  Vec2 operator*(const S& c) const { return {S(x * c), S(y * c)}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  S norm2() const { return S(x * x + y * y); }
  double norm_d() const {
    double a = scalar_traits<S>::to_double(x), b = scalar_traits<S>::to_double(y);
    return std::hypot(a, b);
  }
};

// det [v w] with v the first column; the ordering v < w used by the
// continued-fraction machinery is det2(v, w) > 0.
template <class S> S det2(const Vec2<S>& v, const Vec2<S>& w) {
  return S(v.x * w.y - v.y * w.x);
}

template <class S> struct Mat2 {
  Vec2<S> c0, c1; // columns

  Vec2<S> apply(const Vec2<S>& v) const {
    return {S(c0.x * v.x + c1.x * v.y), S(c0.y * v.x + c1.y * v.y)};
  }
  Mat2 operator*(const Mat2& o) const { return {apply(o.c0), apply(o.c1)}; }
  S det() const { return det2(c0, c1); }
};

// diag(e^t, e^-t); the Teichmueller flow.
template <class S> Mat2<S> flow_matrix(const S& t) {
  using tr = scalar_traits<S>;
  S et = tr::exp(t); // rational backend admits only t == 0
  S emt = tr::exp(S(-t));
  return {{et, S(0)}, {S(0), emt}};
}

// Counterclockwise rotation by theta.
template <class S> Mat2<S> rotation_matrix(const S& theta) {
  using tr = scalar_traits<S>;
  S c = tr::cos(theta), s = tr::sin(theta);
  return {{c, s}, {S(-s), c}};
}

} // namespace flatdyn
