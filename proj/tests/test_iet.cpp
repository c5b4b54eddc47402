#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flatdyn/iet.hpp"
#include "flatdyn/rng.hpp"

using namespace flatdyn;

TEST_CASE("permutation admissibility") {
  CHECK(Permutation({2, 1}).admissible());
  CHECK(Permutation({3, 1, 2}).admissible());
  CHECK_FALSE(Permutation({1, 2}).admissible());
  CHECK(Permutation({1, 2}).first_reducible_prefix() == 1);
  CHECK_FALSE(Permutation({2, 1, 3}).admissible());
  CHECK(Permutation({2, 1, 3}).first_reducible_prefix() == 2);
  CHECK_THROWS_AS(Permutation({1, 1}), FlatError);
  CHECK_THROWS_AS(Permutation({2}), FlatError);
  CHECK(Permutation({2, 3, 1}).rotational());
  CHECK(Permutation({3, 1, 2}).rotational());
  CHECK_FALSE(Permutation({3, 2, 1}).rotational());
}

TEST_CASE("singularity positions") {
  Iet<Rational> T(Permutation({2, 1}), {Rational(3), Rational(2)});
  CHECK(T.ut(1) == 0);
  CHECK(T.ut(2) == 3);
  CHECK(T.length() == 5);
  CHECK(T.ub(1) == 0);
  CHECK(T.ub(2) == 2);

  Iet<Rational> U(Permutation({3, 1, 2}), {Rational(1), Rational(1), Rational(1)});
  CHECK(U.ut(2) == 1);
  CHECK(U.ut(3) == 2);
  CHECK(U.ub(2) == 1); // only pi(2)=1 < 2 contributes lambda_2
  CHECK(U.ub(3) == 2);

  CHECK_THROWS_AS(Iet<Rational>(Permutation({2, 1}), {Rational(1), Rational(0)}),
                  FlatError);
}

TEST_CASE("apply translates each branch onto its target") {
  Iet<Rational> T(Permutation({2, 1}), {Rational(3), Rational(2)});
  CHECK(T.apply(Rational(1)) == Rational(3));     // I^t_1 -> I^b_2 = [2,5)
  CHECK(T.apply(Rational(4)) == Rational(1));     // I^t_2 -> I^b_1 = [0,2)
  CHECK(T.apply(Rational(3), Iet<Rational>::Dir::backward) == Rational(1));
  // interval lengths are preserved: |I^t_i| = |I^b_{pi(i)}|
  for (int i = 1; i <= 2; ++i)
    CHECK(Rational(T.ut(i + 1) - T.ut(i)) ==
          Rational(T.ub(T.pi().of(i) + 1) - T.ub(T.pi().of(i))));
  // singular points refuse
  CHECK_THROWS_AS(T.apply(Rational(3)), FlatError);
  CHECK(T.apply(Rational(3), Iet<Rational>::Dir::backward) == 1);
}

TEST_CASE("iterate round trips") {
  Iet<Rational> T(Permutation({3, 1, 2}),
                  {Rational(7, 5), Rational(13, 7), Rational(9, 4)});
  SplitMix64 rng(3);
  for (int k = 0; k < 50; ++k) {
    Rational x(static_cast<long>(rng.next_range(1, 999)), 1000);
    x = x * T.length();
    Rational y = T.iterate(x, 6);
    CHECK(T.iterate(y, -6) == x);
  }
}

TEST_CASE("birkhoff sums accumulate branch values") {
  Iet<Rational> T(Permutation({2, 1}), {Rational(3), Rational(2)});
  auto sum = T.birkhoff<Rational>(Rational(1, 2), 5,
                                  [](int i) { return Rational(i); });
  // orbit of 1/2: branches 1,2,2,1,2 under pi=(2,1), lambda=(3,2)
  Rational check(0), y(1, 2);
  for (int k = 0; k < 5; ++k) {
    int i = T.locate_top(y);
    check += i;
    y = y + T.delta(i);
  }
  CHECK(sum == check);
}

TEST_CASE("mirror swaps rows") {
  Iet<Rational> T(Permutation({3, 1, 2}),
                  {Rational(2), Rational(3, 2), Rational(5, 2)});
  Iet<Rational> M = T.mirror();
  for (int j = 1; j <= 3; ++j) CHECK(M.ut(j) == T.ub(j));
  // M is the inverse map up to the index relabeling: M(T(x)) = x
  Rational x(9, 7);
  CHECK(M.apply(T.apply(x)) == x);
}

TEST_CASE("connection detection on a rational rotation") {
  // lambda = (2, 3): rotation with rational angle, orbits close up
  Iet<Rational> T(Permutation({2, 1}), {Rational(2), Rational(3)});
  auto hit = T.detect_connection(10);
  REQUIRE(hit.has_value());
  CHECK(T.iterate(T.ub(hit->q), hit->n) == T.ut(hit->p));

  // generic lengths: no connection in a short window
  Iet<Rational> U(Permutation({2, 1}), {Rational(22, 7), Rational(355, 113)});
  CHECK_FALSE(U.detect_connection(50).has_value());
}

TEST_CASE("float backend refuses near-singular evaluation") {
  double eps = scalar_traits<double>::epsilon();
  Iet<double> T(Permutation({2, 1}), {3.0, 2.0});
  CHECK_THROWS_AS(T.apply(3.0 + eps / 4), FlatError);
  CHECK(T.apply(3.5) == doctest::Approx(0.5));
}
