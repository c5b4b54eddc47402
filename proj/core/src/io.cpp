#include "flatdyn/io.hpp"

#include <fstream>
#include <sstream>

namespace flatdyn {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(Errc::parse, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// GMP-backed string constructors read a leading 0 as an octal prefix;
// integer literals here are always decimal.
BigInt decimal_int(std::string s) {
  std::string sign;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    sign = s[0] == '-' ? "-" : "";
    s.erase(0, 1);
  }
  size_t k = 0;
  while (k + 1 < s.size() && s[k] == '0') ++k;
  return BigInt(sign + s.substr(k));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

} // namespace

Rational parse_rational(const std::string& tok) {
  std::string t = trim(tok);
  if (t.empty()) fail(Errc::parse, "empty numeric literal");
  try {
    size_t slash = t.find('/');
    if (slash != std::string::npos) {
      BigInt num = decimal_int(t.substr(0, slash));
      BigInt den = decimal_int(t.substr(slash + 1));
      if (den == 0) fail(Errc::parse, "zero denominator in '" + t + "'");
      return Rational(num, den);
    }
    size_t dot = t.find('.');
    if (dot != std::string::npos) {
      std::string digits = t.substr(0, dot) + t.substr(dot + 1);
      if (digits == "-" || digits.empty())
        fail(Errc::parse, "bad numeric literal '" + t + "'");
      BigInt num = decimal_int(digits);
      BigInt den(1);
      for (size_t k = dot + 1; k < t.size(); ++k) den *= 10;
      return Rational(num, den);
    }
    return Rational(decimal_int(t));
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const FlatError*>(&e)) throw;
    fail(Errc::parse, "bad numeric literal '" + t + "'");
  }
}

std::string rational_str(const Rational& x) {
  std::ostringstream out;
  if (denominator(x) == 1)
    out << numerator(x);
  else
    out << numerator(x) << "/" << denominator(x);
  return out.str();
}

SurfaceSpec parse_surface(const std::string& text) {
  SurfaceSpec s;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool saw_pi = false, saw_lambda = false, saw_tau = false;
  int line_pi = 0, line_lambda = 0, line_tau = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) parse_fail(lineno, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "d") {
        s.d = std::stoi(val);
        if (s.d < 2) parse_fail(lineno, "d must be >= 2");
      } else if (key == "pi") {
        s.pi.assign(1, 0);
        for (auto& tok : split_ws(val)) s.pi.push_back(std::stoi(tok));
        saw_pi = true;
        line_pi = lineno;
      } else if (key == "lambda") {
        s.lambda.assign(1, Rational(0));
        for (auto& tok : split_ws(val)) s.lambda.push_back(parse_rational(tok));
        saw_lambda = true;
        line_lambda = lineno;
      } else if (key == "tau") {
        s.tau.assign(1, Rational(0));
        for (auto& tok : split_ws(val)) s.tau.push_back(parse_rational(tok));
        saw_tau = true;
        line_tau = lineno;
      } else if (key == "backend") {
        if (val != "rational" && val != "float53" && val != "bigfloat")
          parse_fail(lineno, "unknown backend '" + val + "'");
        s.backend = val;
      } else {
        parse_fail(lineno, "unknown key '" + key + "'");
      }
    } catch (const FlatError&) {
      throw;
    } catch (const std::exception&) {
      parse_fail(lineno, "bad value for key '" + key + "'");
    }
  }
  if (s.d == 0) fail(Errc::parse, "missing key: d");
  if (!saw_pi) fail(Errc::parse, "missing key: pi");
  if (!saw_lambda) fail(Errc::parse, "missing key: lambda");
  if (!saw_tau) fail(Errc::parse, "missing key: tau");
  if ((int)s.pi.size() != s.d + 1) parse_fail(line_pi, "pi arity != d");
  if ((int)s.lambda.size() != s.d + 1) parse_fail(line_lambda, "lambda arity != d");
  if ((int)s.tau.size() != s.d + 1) parse_fail(line_tau, "tau arity != d");
  // admissibility check here so the error carries the offending prefix
  Permutation pi(std::vector<int>(s.pi.begin() + 1, s.pi.end()));
  if (!pi.admissible())
    fail(Errc::validation,
         "pi is not admissible: pi{1..k} = {1..k} at k = " +
             std::to_string(pi.first_reducible_prefix()));
  return s;
}

std::string emit_surface(const SurfaceSpec& s) {
  std::ostringstream out;
  out << "d=" << s.d << "\n";
  out << "pi=";
  for (int i = 1; i <= s.d; ++i) out << (i > 1 ? " " : "") << s.pi[i];
  out << "\nlambda=";
  for (int i = 1; i <= s.d; ++i) out << (i > 1 ? " " : "") << rational_str(s.lambda[i]);
  out << "\ntau=";
  for (int i = 1; i <= s.d; ++i) out << (i > 1 ? " " : "") << rational_str(s.tau[i]);
  out << "\nbackend=" << s.backend << "\n";
  return out.str();
}

SurfaceSpec read_surface_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::parse, "cannot open surface file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_surface(buf.str());
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string output_header(const std::string& config_text, std::uint64_t seed) {
  std::ostringstream out;
  out << "# config_hash=" << std::hex << fnv1a64(config_text) << std::dec
      << " seed=" << seed << '\n';
  return out.str();
}

} // namespace flatdyn
