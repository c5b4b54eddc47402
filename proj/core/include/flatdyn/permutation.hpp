#pragma once

#include <vector>

namespace flatdyn {

// Permutation of {1..d}, 1-based to match the combinatorial conventions used
// throughout (index 0 of the backing arrays is unused).
class Permutation {
public:
  explicit Permutation(std::vector<int> images_one_based);

  int d() const { return d_; }
  int of(int i) const { return img_[i]; }      // pi(i)
  int inv(int j) const { return inv_[j]; }     // pi^{-1}(j)

  // Admissible (irreducible): pi{1..k} != {1..k} for every k < d.
  bool admissible() const;
  // Smallest k < d violating admissibility, or 0 if admissible.
  int first_reducible_prefix() const;

  // pi(i) - i constant mod d. Such data yield marked tori.
  bool rotational() const;

  bool operator==(const Permutation& o) const { return img_ == o.img_; }

  // All admissible permutations of {1..d}; exhaustive, meant for small d.
  static std::vector<Permutation> all_admissible(int d);

private:
  int d_;
  std::vector<int> img_, inv_;
};

} // namespace flatdyn
