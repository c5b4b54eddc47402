#include "runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "flatdyn/cf.hpp"
#include "flatdyn/dynamics.hpp"
#include "flatdyn/io.hpp"
#include "flatdyn/rng.hpp"
#include "flatdyn/stratum.hpp"
#include "flatdyn/twisted.hpp"

namespace flatdyn::runner {

std::vector<std::string> parallel_samples(
    std::size_t count, int workers,
    const std::function<std::string(std::size_t)>& job) {
  if (workers < 1) workers = 1;
  std::vector<std::string> out(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  auto body = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      out[k] = job(k);
    }
  };
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  return out;
}

namespace {

namespace fs = std::filesystem;

double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail(Errc::validation, "cannot open output file " + p.string());
  f << body;
}

// Scientific parameters only: the hash must not depend on workers/outdir.
struct ConfigText {
  std::ostringstream os;
  template <class T> void kv(const char* k, const T& v) {
    os << k << '=' << v << '\n';
  }
  std::string str() const { return os.str(); }
};

// --- random sample helpers -------------------------------------------------

// Random torus datum (d = 2), rational, tau_2 = -tau_1 so the only
// horizontal holonomies are +-(lambda_*, 0).
SurfaceSpec random_torus(SplitMix64& rng) {
  SurfaceSpec s;
  s.d = 2;
  s.pi = {0, 2, 1};
  auto rq = [&rng] {
    long num = static_cast<long>(rng.next_range(1, 400));
    long den = static_cast<long>(rng.next_range(1, 40));
    return Rational(num, den * 10) + Rational(1, 2); // in (0.5, ~10.5]
  };
  s.lambda = {Rational(0), rq(), rq()};
  Rational t = rq();
  s.tau = {Rational(0), t, -t};
  return s;
}

// --- verbs ------------------------------------------------------------------

int verb_build(const std::string& surface_path, const fs::path& outdir,
               std::uint64_t seed) {
  SurfaceSpec spec = read_surface_file(surface_path);
  auto X = realize<Rational>(spec);
  ConfigText cfg;
  cfg.kv("verb", "build");
  cfg.kv("surface", emit_surface(spec));
  std::ostringstream os;
  os << output_header(cfg.str(), seed);
  os << emit_surface(spec);
  os << "lambda_star=" << rational_str(X.lambda_star()) << '\n';
  os << "tau_star=" << rational_str(X.tau_star()) << '\n';
  os << "area=" << rational_str(X.area()) << '\n';
  os << "heights=";
  for (int i = 1; i <= X.d(); ++i)
    os << (i > 1 ? " " : "") << rational_str(X.h(i));
  os << '\n';
  os << "stratum=";
  auto ks = stratum_combinatorial(X.pi());
  for (std::size_t i = 0; i < ks.size(); ++i) os << (i ? " " : "") << ks[i];
  os << '\n';
  std::string body = os.str();
  write_file(outdir / "build.txt", body);
  std::cout << body;
  return 0;
}

template <class S>
std::string enumerate_csv(const SurfaceSpec& spec, double lmax) {
  auto X = realize<S>(spec);
  auto cs = enumerate_connections(X, scalar_traits<S>::from_rational(
                                         parse_rational(fmt(lmax))),
                                  EnumBudget{});
  std::ostringstream os;
  os << "re,im,len,q,p,n,bundle_q,bundle_p,orient\n";
  for (auto& c : cs) {
    const char* o = c.orient == Orientation::up     ? "up"
                    : c.orient == Orientation::down ? "down"
                                                    : "horizontal";
    os << fmt(scalar_traits<S>::to_double(c.hol.x)) << ','
       << fmt(scalar_traits<S>::to_double(c.hol.y)) << ',' << fmt(c.length())
       << ',' << c.triple.q << ',' << c.triple.p << ',' << c.triple.n << ','
       << c.bundle.first << ',' << c.bundle.second << ',' << o << '\n';
  }
  return os.str();
}

int verb_enumerate(const std::string& surface_path, double lmax,
                   const fs::path& outdir, std::uint64_t seed) {
  SurfaceSpec spec = read_surface_file(surface_path);
  ConfigText cfg;
  cfg.kv("verb", "enumerate");
  cfg.kv("surface", emit_surface(spec));
  cfg.kv("lmax", lmax);
  std::string table;
  if (spec.backend == "rational")
    table = enumerate_csv<Rational>(spec, lmax);
  else if (spec.backend == "float53")
    table = enumerate_csv<double>(spec, lmax);
  else if (spec.backend == "bigfloat")
    table = enumerate_csv<BigFloat>(spec, lmax);
  else
    fail(Errc::parse, "unknown backend " + spec.backend);
  write_file(outdir / "enumerate.csv", output_header(cfg.str(), seed) + table);
  return 0;
}

int verb_flow(const std::string& surface_path, double tmax, int points,
              const fs::path& outdir, std::uint64_t seed) {
  if (tmax <= 0 || points < 2)
    fail(Errc::validation, "flow: need tmax > 0 and points >= 2");
  SurfaceSpec spec = read_surface_file(surface_path);
  auto X = realize<Rational>(spec);
  std::vector<double> grid;
  for (int k = 0; k < points; ++k)
    grid.push_back(tmax * k / (points - 1));
  auto traj = systole_trajectory(X, grid);
  ConfigText cfg;
  cfg.kv("verb", "flow");
  cfg.kv("surface", emit_surface(spec));
  cfg.kv("tmax", tmax);
  cfg.kv("points", points);
  std::ostringstream os;
  os << output_header(cfg.str(), seed);
  os << "t,sys,certified,loglaw\n";
  for (auto& pt : traj) {
    os << fmt(pt.t) << ',' << fmt(pt.sys) << ',' << (pt.certified ? 1 : 0)
       << ',';
    if (pt.t >= std::exp(1.0)) os << fmt(-std::log(pt.sys) / std::log(pt.t));
    os << '\n';
  }
  write_file(outdir / "flow.csv", os.str());
  return 0;
}

// khinchin --mode surface: counts of |Re v| < phi(|v|) at L, 2L, 4L on
// random tori; stabilized = no new solutions in the last doubling.
std::string khinchin_surface_sample(std::size_t k, std::uint64_t seed,
                                    const PhiSpec& phi, double lmax) {
  SplitMix64 rng = sample_rng(seed, k);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 64)
      fail(Errc::budget, "khinchin surface: could not sample a surface");
    SurfaceSpec spec = random_torus(rng);
    try {
      auto X = realize<Rational>(spec);
      std::size_t n1 =
          khinchin_surface_scan(X, phi, Rational(parse_rational(fmt(lmax))))
              .size();
      std::size_t n2 = khinchin_surface_scan(
                           X, phi, Rational(parse_rational(fmt(2 * lmax))))
                           .size();
      std::size_t n4 = khinchin_surface_scan(
                           X, phi, Rational(parse_rational(fmt(4 * lmax))))
                           .size();
      std::ostringstream os;
      os << "{\"sample\":" << k << ",\"counts\":[" << n1 << ',' << n2 << ','
         << n4 << "],\"stable\":" << (n4 == n2 ? "true" : "false")
         << ",\"growing\":" << (n2 > n1 && n4 > n2 ? "true" : "false") << "}";
      return os.str();
    } catch (const FlatError& e) {
      if (e.code() == Errc::degenerate || e.code() == Errc::singularity)
        continue; // vertical connection in range: resample
      throw;
    }
  }
}

// khinchin --mode iet: random lambda (d = 3), solutions of
// |T^n u^b_q - u^t_p| < phi(n); decade counts up to n_max.
std::string khinchin_iet_sample(std::size_t k, std::uint64_t seed,
                                const PhiSpec& phi, long long n_max) {
  SplitMix64 rng = sample_rng(seed, k);
  std::vector<Rational> lam;
  for (int i = 0; i < 3; ++i)
    lam.push_back(Rational(static_cast<long>(rng.next_range(1000, 99999)),
                           10000));
  Iet<Rational> T(Permutation({3, 1, 2}), lam);
  auto sols = khinchin_iet_scan(T, phi, n_max);
  long long boundary = n_max / 10;
  std::size_t early = 0, late = 0;
  for (auto& s : sols) (s.triple.n <= boundary ? early : late)++;
  std::ostringstream os;
  os << "{\"sample\":" << k << ",\"early\":" << early << ",\"late\":" << late
     << ",\"stable\":" << (late == 0 ? "true" : "false") << "}";
  return os.str();
}

// khinchin --mode twisted: random (alpha, x, y), direct scan decade counts.
std::string khinchin_twisted_sample(std::size_t k, std::uint64_t seed,
                                    const PhiSpec& phi, long long n_max) {
  SplitMix64 rng = sample_rng(seed, k);
  double alpha = rng.next_double();
  while (alpha <= 0) alpha = rng.next_double();
  double x = rng.next_double(), y = rng.next_double();
  auto scan = twisted_khinchin_scan<double>(alpha, {x, y}, phi, n_max,
                                            TwistedMethod::direct);
  long long boundary = n_max / 10;
  std::size_t early = 0, late = 0;
  for (long long n : scan.direct) (n <= boundary ? early : late)++;
  std::ostringstream os;
  os.precision(17);
  os << "{\"sample\":" << k << ",\"alpha\":" << alpha << ",\"x\":" << x
     << ",\"y\":" << y << ",\"early\":" << early << ",\"late\":" << late
     << ",\"stable\":" << (late == 0 ? "true" : "false") << "}";
  return os.str();
}

int verb_khinchin(const std::string& mode, const PhiSpec& phi,
                  std::size_t samples, long long n_max, double lmax,
                  std::uint64_t seed, int workers, const fs::path& outdir) {
  if (!phi.valid()) fail(Errc::validation, "khinchin: invalid phi spec");
  ConfigText cfg;
  cfg.kv("verb", "khinchin");
  cfg.kv("mode", mode);
  cfg.kv("phi", phi_to_string(phi));
  cfg.kv("samples", samples);
  cfg.kv("nmax", n_max);
  cfg.kv("lmax", lmax);
  std::function<std::string(std::size_t)> job;
  if (mode == "surface")
    job = [=](std::size_t k) { return khinchin_surface_sample(k, seed, phi, lmax); };
  else if (mode == "iet")
    job = [=](std::size_t k) { return khinchin_iet_sample(k, seed, phi, n_max); };
  else if (mode == "twisted")
    job = [=](std::size_t k) { return khinchin_twisted_sample(k, seed, phi, n_max); };
  else
    fail(Errc::validation, "khinchin: mode must be surface|iet|twisted");

  auto records = parallel_samples(samples, workers, job);
  std::size_t stable = 0;
  for (auto& r : records)
    if (r.find("\"stable\":true") != std::string::npos) ++stable;

  std::string header = output_header(cfg.str(), seed);
  std::ostringstream jl;
  jl << header;
  for (auto& r : records) jl << r << '\n';
  write_file(outdir / ("khinchin-" + mode + ".jsonl"), jl.str());

  std::ostringstream sm;
  sm << header << "samples,stable,stable_fraction\n";
  sm << records.size() << ',' << stable << ','
     << fmt(records.empty() ? 0.0
                            : static_cast<double>(stable) / records.size())
     << '\n';
  write_file(outdir / ("khinchin-" + mode + "-summary.csv"), sm.str());
  return 0;
}

int verb_cf(const std::string& alpha_text, int depth, const fs::path& outdir,
            std::uint64_t seed) {
  Rational alpha = parse_rational(alpha_text);
  auto convs = cf_expand(alpha, depth);
  ConfigText cfg;
  cfg.kv("verb", "cf");
  cfg.kv("alpha", alpha_text);
  cfg.kv("depth", depth);
  std::ostringstream os;
  os << output_header(cfg.str(), seed);
  os << "n,a,q,p,qp,pp,atom_lo,atom_hi,atom_len\n";
  for (auto& c : convs) {
    IVec rp = c.r_prime();
    auto I = atom_interval(c);
    os << c.n << ',' << c.a << ',' << c.r.x << ',' << c.r.y << ',' << rp.x
       << ',' << rp.y << ',' << rational_str(I.lo) << ','
       << rational_str(I.hi) << ',' << rational_str(I.length()) << '\n';
  }
  std::string body = os.str();
  write_file(outdir / "cf.csv", body);
  std::cout << body;
  return 0;
}

int verb_twisted(const std::string& alpha_text, double x, double y, int N,
                 int levels, const PhiSpec& phi, long long n_max,
                 const std::string& method, const fs::path& outdir,
                 std::uint64_t seed) {
  ConfigText cfg;
  cfg.kv("verb", "twisted");
  cfg.kv("alpha", alpha_text);
  cfg.kv("x", x);
  cfg.kv("y", y);
  cfg.kv("N", N);
  std::ostringstream os;
  if (n_max > 0) {
    cfg.kv("phi", phi_to_string(phi));
    cfg.kv("nmax", n_max);
    cfg.kv("method", method);
    TwistedMethod m = method == "direct"    ? TwistedMethod::direct
                      : method == "twisted" ? TwistedMethod::twisted
                                            : TwistedMethod::both;
    double alpha = rational_to_double(parse_rational(alpha_text));
    auto scan = twisted_khinchin_scan<double>(alpha, {x, y}, phi, n_max, m);
    os << output_header(cfg.str(), seed);
    os << "n,frac,flagged\n";
    std::set<long long> flagged(scan.flagged.begin(), scan.flagged.end());
    for (long long n : scan.direct) {
      double z = (static_cast<double>(n) + x) * alpha - y;
      os << n << ',' << fmt(z - std::floor(z)) << ','
         << (flagged.count(n) ? 1 : 0) << '\n';
    }
  } else {
    cfg.kv("levels", levels);
    Rational alpha = parse_rational(alpha_text);
    Vec2<Rational> v{parse_rational(fmt(x)), parse_rational(fmt(y))};
    os << output_header(cfg.str(), seed);
    os << "n,nu,k,j,kp,jp,det,upsilon\n";
    auto convs = cf_expand(alpha, 2 * N * std::max(0, levels - 1) + 1);
    for (int n = 1; n <= levels; ++n) {
      auto t = twisted_step(alpha, v, N, n, convs);
      Rational dd = det2(t.s, t.s_prime);
      Rational Y = upsilon(t, alpha, v);
      os << n << ',' << t.nu << ',' << t.k << ',' << t.j << ',' << t.kp << ','
         << t.jp << ',' << rational_str(dd) << ',' << rational_str(Y) << '\n';
    }
  }
  std::string body = os.str();
  write_file(outdir / "twisted.csv", body);
  return 0;
}

int verb_rotate_scan(const std::string& surface_path, const PhiSpec& phi,
                     std::size_t samples, double lmax, std::size_t K,
                     double theta_lo, double theta_hi, std::uint64_t seed,
                     int workers, const fs::path& outdir) {
  SurfaceSpec spec = read_surface_file(surface_path);
  auto X = realize<double>(spec);
  if (!X.pi().rotational())
    fail(Errc::validation, "rotate-scan: permutation must be rotational");
  ConfigText cfg;
  cfg.kv("verb", "rotate-scan");
  cfg.kv("surface", emit_surface(spec));
  cfg.kv("phi", phi_to_string(phi));
  cfg.kv("samples", samples);
  cfg.kv("lmax", lmax);
  cfg.kv("K", K);
  cfg.kv("theta_lo", theta_lo);
  cfg.kv("theta_hi", theta_hi);

  auto job = [&, seed](std::size_t k) {
    SplitMix64 rng = sample_rng(seed, k);
    double th = theta_lo + (theta_hi - theta_lo) * rng.next_double();
    auto rows = rotation_bundle_scan(X, phi, {th}, lmax, K);
    auto& row = rows.front();
    std::size_t total = 0;
    for (auto& [b, n] : row.counts) total += n;
    std::ostringstream os;
    os << fmt(th) << ',' << (row.ok ? 1 : 0) << ',' << row.pairs_at_K << ','
       << total;
    return os.str();
  };
  auto records = parallel_samples(samples, workers, job);
  std::ostringstream os;
  os << output_header(cfg.str(), seed);
  os << "theta,ok,pairs_at_K,solutions\n";
  for (auto& r : records) os << r << '\n';
  write_file(outdir / "rotate-scan.csv", os.str());
  return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
  if (const char* bits = std::getenv("FLATDYN_PRECISION_BITS"))
    set_bigfloat_precision_bits(
        static_cast<unsigned>(std::strtoul(bits, nullptr, 10)));
  else
    set_bigfloat_precision_bits(256);

  CLI::App app{"flatdyn: translation surfaces, saddle connections, and "
               "Khinchin-type experiments"};
  app.require_subcommand(1);

  std::string surface, alpha = "1", mode = "surface", method = "both";
  std::string phi_text = "1,1,0", outdir = ".";
  double lmax = 10, tmax = 10, x = 0, y = 0;
  double theta_lo = -0.2, theta_hi = 0.2;
  long long n_max = 0;
  int depth = 10, points = 101, N = 3, levels = 3, workers = 1;
  std::size_t samples = 50, K = 3;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", seed, "master seed recorded in outputs");
    c->add_option("--workers", workers, "worker threads");
    c->add_option("--outdir", outdir, "output directory");
  };

  auto* cb = app.add_subcommand("build", "validate a surface file");
  cb->add_option("--surface", surface)->required();
  add_common(cb);

  auto* ce = app.add_subcommand("enumerate", "saddle connections up to lmax");
  ce->add_option("--surface", surface)->required();
  ce->add_option("--lmax", lmax)->required();
  add_common(ce);

  auto* cfl = app.add_subcommand("flow", "systole along the Teichmueller flow");
  cfl->add_option("--surface", surface)->required();
  cfl->add_option("--tmax", tmax);
  cfl->add_option("--points", points);
  add_common(cfl);

  auto* ck = app.add_subcommand("khinchin", "Monte Carlo Khinchin experiments");
  ck->add_option("--mode", mode, "surface|iet|twisted");
  ck->add_option("--phi", phi_text, "c,p,q");
  ck->add_option("--samples,--alpha-samples", samples);
  ck->add_option("--nmax", n_max);
  ck->add_option("--lmax", lmax);
  add_common(ck);

  auto* cc = app.add_subcommand("cf", "continued fraction table");
  cc->add_option("--alpha", alpha)->required();
  cc->add_option("--depth", depth);
  add_common(cc);

  auto* ct = app.add_subcommand("twisted", "twisted approximants / scan");
  ct->add_option("--alpha", alpha)->required();
  ct->add_option("--x", x);
  ct->add_option("--y", y);
  ct->add_option("--N", N);
  ct->add_option("--levels", levels);
  ct->add_option("--phi", phi_text);
  ct->add_option("--nmax", n_max, "when set, run the solution scan");
  ct->add_option("--method", method, "direct|twisted|both");
  add_common(ct);

  auto* cr = app.add_subcommand("rotate-scan", "per-theta bundle solution counts");
  cr->add_option("--surface", surface)->required();
  cr->add_option("--phi", phi_text);
  cr->add_option("--samples,--theta-samples", samples);
  cr->add_option("--lmax", lmax);
  cr->add_option("--K", K);
  cr->add_option("--theta-lo", theta_lo);
  cr->add_option("--theta-hi", theta_hi);
  add_common(cr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    fs::create_directories(outdir);
    if (cb->parsed()) return verb_build(surface, outdir, seed);
    if (ce->parsed()) return verb_enumerate(surface, lmax, outdir, seed);
    if (cfl->parsed()) return verb_flow(surface, tmax, points, outdir, seed);
    if (ck->parsed()) {
      PhiSpec phi = parse_phi(phi_text);
      if (n_max <= 0) n_max = 100000;
      return verb_khinchin(mode, phi, samples, n_max, lmax, seed, workers,
                           outdir);
    }
    if (cc->parsed()) return verb_cf(alpha, depth, outdir, seed);
    if (ct->parsed())
      return verb_twisted(alpha, x, y, N, levels, parse_phi(phi_text), n_max,
                          method, outdir, seed);
    if (cr->parsed())
      return verb_rotate_scan(surface, parse_phi(phi_text), samples, lmax, K,
                              theta_lo, theta_hi, seed, workers, outdir);
    return 1;
  } catch (const FlatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::budget ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"flatdyn"};
  for (auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace flatdyn::runner
