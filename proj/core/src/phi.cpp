#include "flatdyn/phi.hpp"

#include <cmath>
#include <sstream>

#include "flatdyn/error.hpp"

namespace flatdyn {

bool PhiSpec::strongly_decreasing() const {
  if (!valid()) return false;
  if (p > 1) return q >= (1 - p) * std::log(2.0);
  if (p == 1) return q >= 0;
  return false;
}

double phi_eval(const PhiSpec& phi, double t) {
  double u = t + 2.0;
  return phi.c * std::pow(u, -phi.p) * std::pow(std::log(u), -phi.q);
}

namespace {
double parse_number(const std::string& tok) {
  auto slash = tok.find('/');
  try {
    if (slash == std::string::npos) return std::stod(tok);
    double num = std::stod(tok.substr(0, slash));
    double den = std::stod(tok.substr(slash + 1));
    if (den == 0) fail(Errc::parse, "zero denominator in '" + tok + "'");
    return num / den;
  } catch (const std::invalid_argument&) {
    fail(Errc::parse, "bad numeric literal '" + tok + "'");
  } catch (const std::out_of_range&) {
    fail(Errc::parse, "numeric literal out of range '" + tok + "'");
  }
}
} // namespace

PhiSpec parse_phi(const std::string& text) {
  std::stringstream ss(text);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(ss, tok, ',')) vals.push_back(parse_number(tok));
  if (vals.size() != 3) fail(Errc::parse, "phi spec needs c,p,q: '" + text + "'");
  PhiSpec phi{vals[0], vals[1], vals[2]};
  if (!phi.valid())
    fail(Errc::validation, "phi spec requires c>0, p>=0, q>=0: '" + text + "'");
  return phi;
}

std::string phi_to_string(const PhiSpec& phi) {
  std::ostringstream os;
  os << phi.c << ',' << phi.p << ',' << phi.q;
  return os.str();
}

SeriesProbe series_probe(const PhiSpec& phi, double theta, int terms,
                         double threshold) {
  if (theta <= 1) fail(Errc::validation, "series_probe needs theta > 1");
  if (terms < 2) fail(Errc::validation, "series_probe needs at least 2 terms");
  SeriesProbe out;
  out.partial_sums.reserve(terms);
  double sum = 0, t = 1;
  for (int k = 0; k < terms; ++k) {
    sum += t * phi_eval(phi, t);
    out.partial_sums.push_back(sum);
    t *= theta;
  }
  int decade = std::max(1, (int)std::ceil(std::log(10.0) / std::log(theta)));
  int lo = std::max(0, terms - 1 - decade);
  out.last_decade_increment = out.partial_sums[terms - 1] - out.partial_sums[lo];
  out.divergent_flag = out.last_decade_increment > threshold;
  return out;
}

} // namespace flatdyn
