#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <numeric>

#include "flatdyn/connections.hpp"

using namespace flatdyn;

namespace {

Surface<Rational> torus(Rational l1, Rational l2, Rational t1) {
  return build_surface<Rational>(Permutation({2, 1}), {l1, l2}, {t1, Rational(-t1)});
}

// Saddle connections on the square-tiled torus are the primitive lattice
// vectors a*(l2,-t1) + b*(-l1,-t1), up to sign.
std::vector<std::pair<Rational, Rational>> lattice_oracle(Rational l1, Rational l2,
                                                          Rational t1, Rational L) {
  std::vector<std::pair<Rational, Rational>> want;
  Rational L2(L * L);
  for (int a = -200; a <= 200; ++a)
    for (int b = -200; b <= 200; ++b) {
      if (std::gcd(a, b) != 1) continue;
      Rational x(a * l2 - b * l1), y(Rational(-a - b) * t1);
      if (Rational(x * x + y * y) > L2) continue;
      REQUIRE(x != 0); // oracle cases are chosen vertical-free
      want.push_back({x, y});
    }
  std::sort(want.begin(), want.end());
  return want;
}

void check_torus(Rational l1, Rational l2, Rational t1, Rational L) {
  auto cs = enumerate_connections(torus(l1, l2, t1), L);
  std::vector<std::pair<Rational, Rational>> got;
  for (auto& c : cs) got.push_back({c.hol.x, c.hol.y});
  std::sort(got.begin(), got.end());
  CHECK(got == lattice_oracle(l1, l2, t1, L));
}

} // namespace

TEST_CASE("combinatorial holonomy on the torus") {
  auto X = torus(Rational(3), Rational(2), Rational(1));
  // gamma_{2,2,0} joins xi^b_2 = (2,-1) to xi^t_2 = (3,1)
  CHECK(holonomy_combinatorial(X, Triple{2, 2, 0}) == Vec2<Rational>{1, 2});
  CHECK(displacement(X.iet(), Triple{2, 2, 0}) == -1);
}

TEST_CASE("is_reduced matches a brute interior scan") {
  auto X = torus(Rational(3), Rational(2), Rational(1));
  const auto& T = X.iet();
  // n=0 copy is just (u^b_2, u^t_2) = (2,3): interior free of {2,3}
  CHECK(is_reduced(T, Triple{2, 2, 0}));
  // longer orbits: verify against the definition directly; the forward
  // orbit of u^b_2 here hits u^t_2 at n = 3 (a vertical connection), so
  // stop there and skip the degenerate triple itself
  std::vector<Rational> xs{T.ub(2)}, ys{T.ut(2)};
  int n_top = 0;
  try {
    for (long long k = 1; k <= 6; ++k) {
      xs.push_back(T.apply(xs.back()));
      ys.push_back(T.apply(ys.back(), Iet<Rational>::Dir::backward));
      n_top = static_cast<int>(k);
    }
  } catch (const FlatError& e) {
    CHECK(e.code() == Errc::singularity);
  }
  CHECK(n_top >= 2);
  int checked = 0;
  for (long long n = 0; n <= n_top; ++n) {
    Triple t{2, 2, n};
    if (Rational(xs[n] - T.ut(2)) == 0) continue; // the vertical at n = 3
    bool brute = true;
    for (long long k = 0; k <= n && brute; ++k) {
      Rational lo = xs[k], hi = ys[n - k];
      if (hi < lo) std::swap(lo, hi);
      for (Rational u : {T.ut(2), T.ub(2)})
        if (lo < u && u < hi) brute = false;
    }
    CHECK(is_reduced(T, t) == brute);
    ++checked;
  }
  CHECK(checked >= 2);
}

TEST_CASE("reduce_triple returns reduced triples with matching total holonomy") {
  auto X = torus(Rational(3), Rational(26, 7), Rational(3, 4));
  const auto& T = X.iet();
  Rational eps = half_min_gap(T);
  int found = 0;
  for (long long n = 1; n <= 40; ++n) {
    Triple t{2, 2, n};
    Rational disp = displacement(T, t);
    if (disp == 0) continue; // a vertical connection, out of scope here
    if (!(scalar_traits<Rational>::abs(disp) < eps)) continue;
    ++found;
    auto parts = reduce_triple(T, t);
    REQUIRE(!parts.empty());
    for (auto& r : parts) {
      CHECK(is_reduced(T, r));
      CHECK(scalar_traits<Rational>::abs(displacement(T, r)) <
            scalar_traits<Rational>::abs(disp) + eps);
    }
  }
  CHECK(found > 0);
}

TEST_CASE("geometric trace agrees with the combinatorial holonomy") {
  auto X = torus(Rational(3), Rational(26, 7), Rational(3, 4));
  const auto& T = X.iet();
  Rational x = T.ub(2);
  int traced = 0;
  for (long long n = 0; n <= 20; ++n) {
    Triple t{2, 2, n};
    if (Rational(x - T.ut(2)) != 0 && is_reduced(T, t)) {
      auto hol = holonomy_combinatorial(X, t);
      if (hol.x != 0 && hol.y > 0) {
        auto tr = trace_geodesic(X, t);
        CHECK(tr.hol == hol);
        ++traced;
      }
    }
    try {
      x = T.apply(x);
    } catch (const FlatError& e) {
      CHECK(e.code() == Errc::singularity);
      break;
    }
  }
  CHECK(traced >= 3);
}

TEST_CASE("torus enumeration matches the primitive lattice oracle") {
  check_torus(Rational(3), Rational(2), Rational(1), Rational(4));
  check_torus(Rational(3), Rational(2), Rational(1), Rational(24, 5));
  check_torus(Rational(7, 3), Rational(5, 2), Rational(3, 4), Rational(9));
  check_torus(Rational(1), Rational(13, 7), Rational(2, 5), Rational(79, 10));
}

TEST_CASE("enumeration below the systole is empty") {
  auto cs = enumerate_connections(torus(Rational(3), Rational(2), Rational(1)),
                                  Rational(1));
  CHECK(cs.empty());
}

TEST_CASE("vertical saddle connection is reported, not silently skipped") {
  // 2*lambda_1 = 3*lambda_2 puts a vertical of height 5 below L
  auto X = torus(Rational(3), Rational(2), Rational(1));
  CHECK_THROWS_AS(enumerate_connections(X, Rational(6)), FlatError);
}

TEST_CASE("higher genus: symmetry, length bound, label consistency") {
  struct Case {
    std::vector<int> pi;
    std::vector<Rational> lam, tau;
    Rational L;
  };
  std::vector<Case> cases = {
      {{4, 3, 2, 1},
       {Rational(17, 5), Rational(23, 7), Rational(9, 4), Rational(31, 8)},
       {Rational(1), Rational(1, 2), Rational(-3, 5), Rational(-6, 7)},
       Rational(6)},
      {{2, 4, 1, 3},
       {Rational(7, 2), Rational(13, 6), Rational(27, 11), Rational(5, 3)},
       {Rational(2, 3), Rational(1, 2), Rational(-1), Rational(-5, 7)},
       Rational(8)},
      {{3, 1, 2},
       {Rational(13, 6), Rational(11, 7), Rational(23, 9)},
       {Rational(1), Rational(-1, 3), Rational(-1, 5)},
       Rational(9)},
  };
  for (auto& c : cases) {
    auto X = build_surface<Rational>(Permutation(c.pi), c.lam, c.tau);
    auto cs = enumerate_connections(X, c.L);
    CHECK(!cs.empty());
    std::map<std::pair<Rational, Rational>, int> m;
    Rational L2(c.L * c.L);
    for (auto& sc : cs) {
      CHECK(!(sc.len2 > L2));
      CHECK(sc.len2 == Rational(sc.hol.x * sc.hol.x + sc.hol.y * sc.hol.y));
      m[{sc.hol.x, sc.hol.y}]++;
      if (sc.triple.q != 0 && sc.orient != Orientation::horizontal) {
        // labeled entries carry verifiable combinatorics
        CHECK(is_reduced(X.iet(), sc.triple));
        auto h = holonomy_combinatorial(X, sc.triple);
        bool matches = (h == sc.hol) || (-h == sc.hol);
        CHECK(matches);
      }
    }
    // holonomies come in +/- pairs with equal multiplicity
    for (auto& kv : m) {
      auto it = m.find({Rational(-kv.first.first), Rational(-kv.first.second)});
      REQUIRE(it != m.end());
      CHECK(it->second == kv.second);
    }
  }
}

TEST_CASE("systole and bundle systole on the torus") {
  auto X = torus(Rational(3), Rational(2), Rational(1));
  // shortest primitive vector of the oracle lattice:
  // (2,-1) from (a,b)=(1,0) has length sqrt(5); (-1,-2)... scan says sqrt(5)
  auto want = lattice_oracle(Rational(3), Rational(2), Rational(1), Rational(4));
  double best = 1e18;
  for (auto& v : want) {
    double x = scalar_traits<Rational>::to_double(v.first);
    double y = scalar_traits<Rational>::to_double(v.second);
    best = std::min(best, std::hypot(x, y));
  }
  CHECK(systole(X) == doctest::Approx(best).epsilon(1e-12));
  double sb = systole_bundle(X, 2, 2);
  CHECK(sb >= best - 1e-12);
}

TEST_CASE("budget exhaustion raises the budget error") {
  auto X = torus(Rational(7, 3), Rational(5, 2), Rational(3, 4));
  EnumBudget tight;
  tight.max_steps = 3;
  try {
    enumerate_connections(X, Rational(40), tight);
    CHECK(false);
  } catch (const FlatError& e) {
    CHECK(e.code() == Errc::budget);
  }
}

TEST_CASE("vertical candidate scan is a filtered enumeration") {
  auto X = torus(Rational(7, 3), Rational(5, 2), Rational(3, 4));
  Rational im_max(10);
  auto scan = vertical_candidate_scan<Rational>(
      X, [](const Rational& y) { return Rational(1, 2); }, im_max);
  for (auto& c : scan) {
    CHECK(scalar_traits<Rational>::abs(c.hol.x) < Rational(1, 2));
    CHECK(!(c.hol.y > im_max));
    CHECK(is_reduced(X.iet(), c.triple));
  }
  // every scan hit appears among the full enumeration at a covering radius
  auto full = enumerate_connections(X, Rational(11));
  for (auto& c : scan) {
    bool present = false;
    for (auto& f : full)
      if (f.hol.x == c.hol.x && f.hol.y == c.hol.y) present = true;
    CHECK(present);
  }
}
