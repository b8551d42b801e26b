// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// diagnostics. Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "zf/bandlimit.hpp"
#include "zf/checks.hpp"
#include "zf/dirichlet.hpp"
#include "zf/errors.hpp"
#include "zf/models.hpp"
#include "zf/primes.hpp"
#include "zf/rng.hpp"
#include "zf/stats.hpp"
#include "zf/zeta.hpp"

using namespace zf;
using cplx = std::complex<double>;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> notes;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

void report_suite(const SuiteReport& r, Outcome& o) {
  for (const auto& c : r.checks) {
    o.notes.push_back(format("%s %s.%s value %.4g tolerance %.4g%s%s", c.pass ? "ok  " : "FAIL", r.suite.c_str(),
                             c.name.c_str(), c.value, c.tolerance, c.detail.empty() ? "" : "  ",
                             c.detail.c_str()));
  }
}

// 1. Reconstruction of random Dirichlet polynomials from their samples.
Outcome reconstruction() {
  const double T = 1e6;
  const long k_max = 8 * min_k_max(T, 1.0, BumpKernel::discretization());
  const Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(1000, -1.0, 1.0);
  CounterRng rng(1, 1);
  double worst = 0;
  Outcome o;
  for (int i = 0; i < 20; ++i) {
    const auto len = static_cast<std::uint64_t>(1 + rng.uniform() * 9999);
    const DirichletPoly D = random_poly(len, rng);
    const double t = T * (1 + rng.uniform());
    const double e = reconstruction_error(D, 0.5, t, T, h, k_max);
    worst = std::max(worst, e);
    o.notes.push_back(format("poly %2d length %5llu t %.1f relative error %.3g", i, static_cast<unsigned long long>(len),
                             t, e));
  }
  o.pass = worst < 1e-5;
  o.summary = format("reconstruction: max relative error %.3g over 20 polynomials, 1000-point grid (< 1e-5)", worst);
  return o;
}

// 2. Truncated exponential against exp(lambda P) where |lambda P| <= nu / 10.
Outcome truncated_exponential() {
  const int nu = 12;
  std::mt19937_64 gen(12);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0, 1);
  DirichletPoly::Terms t;
  double l1 = 0;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
    t[p] = cplx(g(gen), g(gen));
    l1 += std::abs(t[p]) / std::sqrt(static_cast<double>(p));
  }
  for (auto& [p, a] : t) a *= 2.0 / l1;
  const DirichletPoly P(t);
  const cplx lambda = std::polar(1.0, 2 * std::numbers::pi * u(gen));
  const DirichletPoly E = truncated_exp(P, lambda, nu, 13);
  double worst = 0;
  int tested = 0, drawn = 0;
  while (tested < 100) {
    ++drawn;
    const cplx s(0.5 + u(gen), 1e6 * (1 + u(gen)));
    const cplx lp = lambda * P(s);
    if (std::abs(lp) > nu / 10.0) continue;
    ++tested;
    worst = std::max(worst, std::abs(std::exp(lp) - E(s)));
  }
  Outcome o;
  o.pass = worst <= std::exp(-nu);
  o.summary = format("truncated exponential: max error %.3g at 100 points, bound e^-12 = %.3g", worst, std::exp(-nu));
  o.notes.push_back(format("%d points drawn, %zu terms in the truncated series", drawn, E.size()));
  return o;
}

// 3. Mertens sums.
Outcome pnt() {
  const SuiteReport r = run_suite("pnt");
  Outcome o;
  o.pass = r.passed();
  report_suite(r, o);
  o.summary = "prime number theorem sums for Q in {1e4, 1e5, 1e6}";
  return o;
}

// 4. Bessel moments of the prime sum over p <= 101.
Outcome bessel() {
  const PrimeTable table = cached_primes(1000);
  std::vector<double> moduli;
  for (auto p : table.primes()) {
    if (p <= 101) moduli.push_back(1.0 / std::sqrt(static_cast<double>(p)));
  }
  const std::vector<double> exact = bessel_moments(moduli, 4);
  const long n = 1'000'000;
  const Eigen::VectorXd x = prime_sum_samples(table, 101, 1e10, n, 4).real();
  const std::vector<Estimate> mc = sample_moments(x, 4);
  Outcome o;
  double worst = 0;
  for (int k = 1; k <= 4; ++k) {
    const double z = std::abs(mc[k].mean - exact[k]) / mc[k].se;
    worst = std::max(worst, z);
    o.notes.push_back(format("k %d  mc %.6g  se %.3g  formula %.6g  z %.2f", k, mc[k].mean, mc[k].se, exact[k], z));
  }
  o.pass = worst < 3;
  o.summary = format("Bessel moments k <= 4, n = 1e6 shifts at T = 1e10: max |z| %.2f (< 3)", worst);
  return o;
}

// 5. Covariance of the prime sum against the logarithm of the distance.
Outcome covariance() {
  const double T = 1e8, alpha = 0.9;
  const PrimeTable table = cached_primes(static_cast<std::uint64_t>(prime_threshold(T, alpha)) + 1);
  std::vector<double> d{0.0};
  for (int k = 1; k <= 8; ++k) d.push_back(std::exp(-k));
  const auto recs = covariance_scan(table, T, alpha, 0.5, 0.0, d, 10'000, 5);
  Outcome o;
  double worst = 0;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& r = recs[i];
    const double dev = std::abs(r.empirical - r.predicted_log);
    worst = std::max(worst, dev);
    o.notes.push_back(format("d = e^-%.0f  empirical %.4f +- %.4f  cosine sum %.4f  (1/2) ln(1/d) %.4f  gap %.3f",
                             -std::log(r.distance), r.empirical, r.standard_error, r.predicted, r.predicted_log, dev));
  }
  o.notes.push_back(format("variance %.4f (sum %.4f) over primes up to exp((ln T)^%.1f) = %.0f caps the covariance",
                           recs[0].empirical, recs[0].predicted, alpha, prime_threshold(T, alpha)));
  o.pass = worst <= 1.0;
  o.summary = format("log-correlation at T = 1e8, n = 1e4, alpha = %.1f: max gap %.3f (<= 1)", alpha, worst);
  return o;
}

// 6. Selberg central limit theorem on real zeta.
Outcome selberg() {
  const SelbergSample s = selberg_sample(1e7, 5000, 1);
  const double ks = ks_normal(s.normalized);
  Outcome o;
  o.pass = ks < 0.05;
  o.summary = format("Selberg CLT at T = 1e7, n = 5000: KS %.4f (< 0.05)", ks);
  o.notes.push_back(format("%ld samples redrawn away from zeros", s.resampled));
  return o;
}

// 7. Second-moment drift across T.
Outcome second_moment() {
  const long n = 1000;
  std::vector<MomentRecord> all;
  Outcome o;
  const FieldEvaluator field = zeta_field();
  for (double T : {1e5, 1e6, 1e7, 1e8}) {
    std::vector<std::vector<MomentRecord>> per(n);
    for (long i = 0; i < n; ++i) per[i] = moment_records(field, sample_shift(T, n, 7, i), 0.0, {2.0}, {});
    std::vector<double> v;
    for (const auto& r : per) {
      all.push_back(r.front());
      v.push_back(r.front().integral);
    }
    o.notes.push_back(format("T %.0e  ln ln T %.3f  median integral %.4f", T, std::log(std::log(T)), median(v)));
  }
  const Regression fit = exponent_regression(all, Statistic::moment);
  o.pass = std::abs(fit.slope - 1.0) <= 0.5;
  o.summary = format("second-moment exponent: slope %.3f +- %.3f (1 +- 0.5)", fit.slope, fit.stderr_slope);
  return o;
}

// 8. Freezing transition on the branching surrogate.
Outcome freezing() {
  std::vector<double> betas;
  for (int i = 1; i <= 10; ++i) betas.push_back(0.5 * i);
  Outcome o;
  o.pass = true;
  double worst_f = 0, worst_m = 0;
  for (double theta : {-0.5, 0.0, 1.0}) {
    const CremConfig cfg{24, 2, theta, 8};
    std::vector<CremRecord> recs;
    try {
      recs = simulate_crem(cfg, betas, 200);
    } catch (const BudgetError& e) {
      o.pass = false;
      o.notes.push_back(format("theta %.1f: %s", theta, e.what()));
      // Largest affordable depth, for reference.
      const CremConfig small{12, 2, theta, 8};
      const auto ref = simulate_crem(small, betas, 20);
      for (const auto& r : ref) {
        o.notes.push_back(format("  reference 12 levels, 20 realizations: beta %.1f  F %.4f  f %.4f", r.beta,
                                 r.free_energy, predict_f(theta, r.beta)));
      }
      o.notes.push_back(format("  reference max %.4f  m %.4f", ref.front().max_normalized, predict_m(theta)));
      continue;
    }
    for (const auto& r : recs) {
      const double gap = std::abs(r.free_energy - predict_f(theta, r.beta));
      worst_f = std::max(worst_f, gap);
      o.notes.push_back(format("theta %.1f beta %.1f  F %.4f +- %.4f  f %.4f  gap %.4f%s", theta, r.beta, r.free_energy,
                               r.free_energy_se, predict_f(theta, r.beta), gap, gap <= 0.05 ? "" : "  over"));
      if (gap > 0.05) o.pass = false;
    }
    const double gm = std::abs(recs.front().max_normalized - predict_m(theta));
    worst_m = std::max(worst_m, gm);
    if (gm > 0.05) o.pass = false;
    o.notes.push_back(format("theta %.1f max/L %.4f +- %.4f  m %.4f  gap %.4f", theta, recs.front().max_normalized,
                             recs.front().max_normalized_se, predict_m(theta), gm));
  }
  o.summary = format("CREM 24 levels, 200 realizations: max free-energy gap %.3f, max gap in max/L %.3f (<= 0.05)",
                     worst_f, worst_m);
  return o;
}

// 9. Legendre duality and continuity at beta_c.
Outcome legendre() {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> th(-0.95, 3.0), be(0.05, 8.0);
  double worst = 0, jump = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double theta = th(gen), beta = be(gen);
    const double m = predict_m(theta);
    double best = -INFINITY;
    for (int i = 0; i < 10000; ++i) {
      const double gamma = std::min(m, m * i / 9999.0);
      best = std::max(best, beta * gamma + predict_E(theta, gamma));
    }
    worst = std::max(worst, std::abs(best - predict_f(theta, beta)));
    const double bc = predict_beta_c(theta);
    jump = std::max(jump, std::abs(bc * bc * (1 + std::min(theta, 0.0)) / 4 + theta - (bc * m - 1)));
  }
  Outcome o;
  o.pass = worst < 1e-4 && jump < 1e-12;
  o.summary = format("Legendre duality max error %.3g (< 1e-4), branch jump at beta_c %.3g (< 1e-12)", worst, jump);
  return o;
}

// 10. Gabriel convexity and the smoothing kernel.
Outcome gabriel() {
  Outcome o;
  const SuiteReport g = run_suite("gabriel");
  const SuiteReport p = run_suite("phi");
  report_suite(g, o);
  report_suite(p, o);
  o.pass = g.passed() && p.passed();
  const DirichletPoly D = smoothed_approx_poly(1e5, 2);
  for (int i = 0; i < 10; ++i) {
    const ShiftSample s = sample_shift(1e5, 10, 10, i);
    const GabrielRecord r = gabriel_smoothed(D, s.tau, 5.0, 10.0);
    o.pass = o.pass && r.lhs_le_rhs;
    o.notes.push_back(format("%s smoothed D Phi at tau %.2f: slack %.4g", r.lhs_le_rhs ? "ok  " : "FAIL", s.tau, r.slack));
  }
  o.summary = format("Gabriel convexity and Phi properties: %s", o.pass ? "all checks pass" : "a check failed");
  return o;
}

// 11. Paley-Zygmund second moment and two-point decoupling on the surrogate.
Outcome paley_zygmund() {
  const CremConfig cfg{20, 2, 0.0, 11};
  const double gamma = 0.5 * predict_m(0.0);
  const long n = 1000;
  const PzRecord r = paley_zygmund_count(cfg, gamma, n);
  Outcome o;
  o.pass = r.ratio <= 1.5 && r.two_point_ratio >= 0.8 && r.two_point_ratio <= 1.25;
  o.summary = format("Paley-Zygmund K = 12, c = 100, 1000 realizations: E[N^2]/E[N]^2 %.4g (<= 1.5), two-point %.4g "
                     "([0.8, 1.25])",
                     r.ratio, r.two_point_ratio);
  o.notes.push_back(format("threshold per block %.3f, E[N] %.3g", pz_threshold(0.0, gamma, cfg.L(), 12, 100.0), r.EN));
  for (double c : {0.0, 3.0}) {
    PzOptions opt;
    opt.K = 4;
    opt.slack = c;
    const PzRecord d = paley_zygmund_count(cfg, gamma, n, opt);
    o.notes.push_back(format("diagnostic K = 4, c = %.0f: threshold %.3f  E[N] %.4g  ratio %.4f  two-point %.4f  "
                             "success %.3f",
                             c, pz_threshold(0.0, gamma, cfg.L(), 4, c), d.EN, d.ratio, d.two_point_ratio,
                             d.success_rate));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, reconstruction}, {2, truncated_exponential}, {3, pnt},     {4, bessel},
      {5, covariance},     {6, selberg},               {7, second_moment}, {8, freezing},
      {9, legendre},       {10, gabriel},              {11, paley_zygmund}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.summary.c_str(), secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
