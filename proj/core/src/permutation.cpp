#include "flatdyn/permutation.hpp"

#include <algorithm>
#include <numeric>

#include "flatdyn/error.hpp"

namespace flatdyn {

Permutation::Permutation(std::vector<int> images_one_based) {
  d_ = static_cast<int>(images_one_based.size());
  if (d_ < 2) fail(Errc::validation, "permutation needs d >= 2");
  img_.assign(d_ + 1, 0);
  inv_.assign(d_ + 1, 0);
  for (int i = 1; i <= d_; ++i) {
    int j = images_one_based[i - 1];
    if (j < 1 || j > d_) fail(Errc::validation, "permutation image out of range");
    if (inv_[j] != 0) fail(Errc::validation, "permutation not injective");
    img_[i] = j;
    inv_[j] = i;
  }
}

int Permutation::first_reducible_prefix() const {
  int maxseen = 0;
  for (int k = 1; k < d_; ++k) {
    maxseen = std::max(maxseen, img_[k]);
    if (maxseen == k) return k;
  }
  return 0;
}

bool Permutation::admissible() const { return first_reducible_prefix() == 0; }

bool Permutation::rotational() const {
  int c = ((img_[1] - 1) % d_ + d_) % d_;
  for (int i = 2; i <= d_; ++i)
    if (((img_[i] - i) % d_ + d_) % d_ != c) return false;
  return true;
}

std::vector<Permutation> Permutation::all_admissible(int d) {
  std::vector<int> v(d);
  std::iota(v.begin(), v.end(), 1);
  std::vector<Permutation> out;
  do {
    Permutation p(v);
    if (p.admissible()) out.push_back(std::move(p));
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

} // namespace flatdyn
