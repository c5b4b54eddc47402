#pragma once

#include <string>
#include <vector>

namespace flatdyn {

// Monotone test function phi(t) = c * (t+2)^(-p) * log(t+2)^(-q).
// The +2 shift keeps phi finite and the log positive at t = 0.
struct PhiSpec {
  double c = 1.0;
  double p = 1.0;
  double q = 0.0;

  // Strong decrease: (t+2) * phi(t) non-increasing on [0, inf). In terms of
  // u = t+2 >= 2 the exact condition is (1-p) <= q / log u for all u, i.e.
  //   p > 1 and q >= (1-p) log 2,  or  p == 1 and q >= 0.
  bool strongly_decreasing() const;

  bool valid() const { return c > 0 && p >= 0 && q >= 0; }
};

double phi_eval(const PhiSpec& phi, double t);

// Parse "c,p,q" where each literal may be decimal or a fraction like "3/2".
PhiSpec parse_phi(const std::string& text);
std::string phi_to_string(const PhiSpec& phi);

// Partial sums of sum_k theta^k phi(theta^k), k = 0..terms-1, plus a
// divergence heuristic: the increment contributed by the last decade of
// t = theta^k is compared against the threshold.
struct SeriesProbe {
  std::vector<double> partial_sums;
  double last_decade_increment = 0.0;
  bool divergent_flag = false;
};

SeriesProbe series_probe(const PhiSpec& phi, double theta, int terms,
                         double threshold = 1e-2);

} // namespace flatdyn
