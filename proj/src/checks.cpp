#include "zf/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "zf/bandlimit.hpp"
#include "zf/errors.hpp"
#include "zf/kahan.hpp"
#include "zf/primes.hpp"
#include "zf/stats.hpp"
#include "zf/zeta.hpp"

namespace zf {

namespace {

using cplx = std::complex<double>;

Check make(std::string name, bool pass, double value, double tolerance, std::string detail = {}) {
  return {std::move(name), pass, value, tolerance, std::move(detail)};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

SuiteReport suite_pnt() {
  SuiteReport r{"pnt", {}};
  const PrimeTable table = cached_primes(1'000'000);
  for (double Q : {1e4, 1e5, 1e6}) {
    const double s0 = mertens_sum(table, 1.0, Q, 0);
    const double d0 = std::abs(s0 - (std::log(std::log(Q)) + kMertensConstant));
    r.checks.push_back(make("mertens_m0_Q" + fmt(Q), d0 < 0.02, d0, 0.02));
    const double d1 = std::abs(mertens_sum(table, 1.0, Q, 1) - std::log(Q));
    r.checks.push_back(make("mertens_m1_Q" + fmt(Q), d1 < 3.0, d1, 3.0));
    const double dc = std::abs(cosine_prime_sum(table, 1.0, Q, 0.0) - s0);
    r.checks.push_back(make("cosine_sum_at_zero_Q" + fmt(Q), dc < 1e-12, dc, 1e-12));
  }
  return r;
}

SuiteReport suite_moments(std::uint64_t seed) {
  SuiteReport r{"moments", {}};
  const PrimeTable table = cached_primes(10'000);

  // Bessel moments of Re sum_{p <= 101} p^{-1/2 - i tau}.
  std::vector<double> moduli;
  for (auto p : table.primes()) {
    if (p <= 101) moduli.push_back(1.0 / std::sqrt(static_cast<double>(p)));
  }
  const std::vector<double> exact = bessel_moments(moduli, 4);
  const Eigen::VectorXd x = prime_sum_samples(table, 101, 1e10, 100'000, seed).real();
  const std::vector<Estimate> mc = sample_moments(x, 4);
  for (int k = 1; k <= 4; ++k) {
    const double z = std::abs(mc[k].mean - exact[k]) / mc[k].se;
    r.checks.push_back(make("bessel_moment_k" + std::to_string(k), z < 3.0, z, 3.0,
                            "mc " + fmt(mc[k].mean) + " exact " + fmt(exact[k])));
  }

  // Gaussian moments at x = 1e4.
  const Eigen::VectorXcd P = prime_sum_samples(table, 1e4, 1e10, 100'000, seed + 1);
  const Eigen::VectorXd re = P.real();
  KahanSum<double> var;
  for (auto p : table.primes()) var += 0.5 / static_cast<double>(p);
  const std::vector<Estimate> g = sample_moments(re, 6);
  double double_factorial = 1;
  for (int k = 1; k <= 3; ++k) {
    double_factorial *= 2 * k - 1;
    const double ratio = g[2 * k].mean / (double_factorial * std::pow(var.value(), k));
    r.checks.push_back(make("gaussian_moment_2k" + std::to_string(2 * k), ratio >= 0.8 && ratio <= 1.2, ratio, 0.2));
  }

  // Moment bound E|P|^{2k} <= 3 k! (sum 1/p)^k.
  const Eigen::VectorXd modulus = P.cwiseAbs();
  const std::vector<Estimate> a = sample_moments(modulus, 6);
  double factorial = 1;
  for (int k = 1; k <= 3; ++k) {
    factorial *= k;
    const double bound = 3.0 * factorial * std::pow(2.0 * var.value(), k);
    r.checks.push_back(make("moment_bound_2k" + std::to_string(2 * k), a[2 * k].mean <= bound, a[2 * k].mean, bound));
  }

  // Mean-value identity E[A(tau) conj B(tau)] = sum a(n) conj b(n).
  CounterRng rng(seed, 99);
  const DirichletPoly A = random_poly(1000, rng);
  const DirichletPoly B = random_poly(1000, rng);
  const long n = 20'000;
  Eigen::VectorXcd prod(n);
  for (long i = 0; i < n; ++i) {
    const ShiftSample s = sample_shift(1e8, n, seed + 2, i);
    prod[i] = A(cplx(0.0, s.tau)) * std::conj(B(cplx(0.0, s.tau)));
  }
  cplx diag = 0;
  for (std::size_t k = 0; k < A.size(); ++k) diag += A.coeffs()[k] * std::conj(B.coefficient(A.keys()[k]));
  const cplx mean = prod.mean();
  const double se = std::sqrt((prod.array() - mean).abs2().sum() / (n - 1) / n);
  const double z = std::abs(mean - diag) / se;
  r.checks.push_back(make("mean_value_identity", z < 3.0, z, 3.0));
  return r;
}

SuiteReport suite_reconstruct(std::uint64_t seed) {
  SuiteReport r{"reconstruct", {}};
  const double T = 1e6;
  const BumpKernel V = BumpKernel::discretization();
  const Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(201, -1.0, 1.0);
  const long k_max = 8 * min_k_max(T, 1.0, V);

  DirichletPoly::Terms one{{1, 1.0}};
  const Reconstruction c = reconstruct(DirichletPoly(one), 0.5, 0.0, T, h, V, k_max);
  const double dc = (c.values.array() - 1.0).abs().maxCoeff();
  r.checks.push_back(make("constant_reproduction", dc < 1e-6, dc, 1e-6));

  DirichletPoly::Terms single{{7919, 1.0}};
  const double ds = reconstruction_error(DirichletPoly(single), 0.5, 1.234e6, T, h, k_max);
  r.checks.push_back(make("single_term", ds < 1e-6, ds, 1e-6));

  CounterRng rng(seed, 7);
  for (int i = 0; i < 3; ++i) {
    const auto len = static_cast<std::uint64_t>(1000 + rng.uniform() * 9000);
    const DirichletPoly D = random_poly(len, rng);
    const double t = T * (1 + rng.uniform());
    const double e = reconstruction_error(D, 0.5, t, T, h, k_max);
    r.checks.push_back(make("random_poly_" + std::to_string(i), e < 1e-5, e, 1e-5, "length " + std::to_string(len)));
    const Eigen::VectorXd direct = evaluate_grid(D, 0.5, t, h).cwiseAbs();
    for (double beta : {1.0, 2.0, 3.0}) {
      double worst = 0;
      for (Eigen::Index j = 0; j < h.size(); j += 20) {
        const double maj = holder_majorant(D, 0.5, t, T, h[j], beta, V, k_max);
        worst = std::max(worst, std::pow(direct[j], beta) / maj);
      }
      r.checks.push_back(make("holder_majorant_" + std::to_string(i) + "_beta" + fmt(beta), worst <= 1.0 + 1e-9,
                              worst, 1.0));
    }
  }
  return r;
}

SuiteReport suite_gabriel(std::uint64_t seed, int n_shifts) {
  SuiteReport r{"gabriel", {}};
  const LineEvaluator gauss = [](double sigma, const Eigen::VectorXd& t) {
    Eigen::VectorXcd out(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) out[i] = std::exp(cplx(sigma, t[i]) * cplx(sigma, t[i]));
    return out;
  };
  const GabrielRecord g = gabriel_check(gauss, 0.5, 2.0, 1.0, 2.0);
  r.checks.push_back(make("exp_z2_convexity", g.lhs_le_rhs, g.slack, 1.0));
  const GabrielRecord e = gabriel_check(gauss, 0.5, 2.0, 0.5, 2.0);
  r.checks.push_back(make("degenerate_gamma_alpha", e.slack >= 1.0 - 1e-12, e.slack, 1.0));

  const DirichletPoly D = smoothed_approx_poly(1e5, 2);
  for (int i = 0; i < n_shifts; ++i) {
    const ShiftSample s = sample_shift(1e5, n_shifts, seed, i);
    const GabrielRecord rec = gabriel_smoothed(D, s.tau, 5.0, 10.0);
    r.checks.push_back(make("smoothed_times_phi_" + std::to_string(i), rec.lhs_le_rhs, rec.slack, 1.0,
                            "tau " + fmt(s.tau)));
  }
  return r;
}

SuiteReport suite_phi() {
  SuiteReport r{"phi", {}};
  const RectKernel k(10.0, 100.0);
  const double L = k.L, Delta = k.Delta;
  // Item 2: |Phi| = 1 + small on the plateau |v| <= L/2.
  double worst2 = 0;
  for (double v : {0.0, 25.0, -25.0, 50.0, -50.0}) worst2 = std::max(worst2, std::abs(std::abs(phi_rect({0.5, v}, k)) - 1));
  r.checks.push_back(make("plateau_modulus", worst2 < 0.01, worst2, 0.01));
  // Item 1: decay beyond 3L, uniformly in sigma.
  double worst1 = 0;
  for (double v : {3 * L, -3 * L, 5 * L}) {
    for (double sigma : {0.5, 1.0, 3.0}) worst1 = std::max(worst1, std::abs(phi_rect({sigma, v}, k)));
  }
  r.checks.push_back(make("decay_beyond_3L", worst1 < 0.01, worst1, 0.01));
  // Item 3: |Phi| <= C (1 + (sigma - 1/2) Delta^2 / L) on the transition band, C frozen at 1.1.
  double worst3 = 0;
  for (double v : {50.0, 100.0, 150.0, -100.0}) {
    for (double sigma : {0.5, 0.6, 1.0, 2.0}) {
      worst3 = std::max(worst3, std::abs(phi_rect({sigma, v}, k)) / (1 + (sigma - 0.5) * Delta * Delta / L));
    }
  }
  r.checks.push_back(make("transition_band_bound", worst3 <= 1.1, worst3, 1.1));
  // Item 4: decay as sigma grows.
  double prev = INFINITY;
  bool monotone = true;
  for (double d : {0.0, 0.5, 1.0, 5.0, 10.0}) {
    const double a = std::abs(phi_rect({0.5 + d, 0.0}, k));
    monotone = monotone && a < prev;
    prev = a;
  }
  const double far = std::abs(phi_rect({0.5 + 50 * L / (Delta * Delta), 0.0}, k));
  r.checks.push_back(make("sigma_decay_monotone", monotone, prev, 0.0));
  r.checks.push_back(make("sigma_decay_limit", far < 0.1, far, 0.1));
  // delta_eta on the critical line is the Fourier transform of V.
  double worst_line = 0;
  for (double v : {0.0, 3.0, -7.5, 20.0}) {
    const double eta = L / Delta;
    worst_line = std::max(worst_line, std::abs(delta_eta({0.5, v}, eta, k.V) - k.V.fourier(v / eta)));
  }
  r.checks.push_back(make("delta_on_line_identity", worst_line < 1e-8, worst_line, 1e-8));
  // The single-quadrature form equals the defining double integral.
  double worst_fubini = 0;
  for (cplx z : {cplx(0.5, 0.0), cplx(0.7, 20.0), cplx(1.5, -80.0)}) {
    worst_fubini = std::max(worst_fubini, std::abs(phi_rect(z, k) - phi_rect_direct(z, k)));
  }
  r.checks.push_back(make("fubini_matches_double_integral", worst_fubini < 1e-8, worst_fubini, 1e-8));
  return r;
}

SuiteReport suite_mollifier(std::uint64_t seed) {
  SuiteReport r{"mollifier", {}};
  const double T = 1e7;
  const MollifierParams params = make_mollifier_params(T, 3);
  const PrimeTable table = cached_primes(static_cast<std::uint64_t>(params.X) + 1);
  const MollificationProbe probe(table, params);
  const long n = 60;
  std::vector<double> res(n);
  for (long i = 0; i < n; ++i) res[i] = probe.residual(sample_shift(T, n, seed, i).tau, 0.0);
  const double med = median(res);
  r.checks.push_back(make("median_residual_T1e7_K3", med < 0.5, med, 0.5));
  const double tau = sample_shift(T, 1, seed, 0).tau;
  const double jump = std::abs(probe.residual(tau, 0.0) - probe.residual(tau, 1e-9));
  r.checks.push_back(make("continuity", jump < 1e-6, jump, 1e-6));
  return r;
}

SuiteReport suite_covariance(std::uint64_t seed) {
  SuiteReport r{"covariance", {}};
  const double T = 1e8, alpha = 0.6;
  const PrimeTable table = cached_primes(static_cast<std::uint64_t>(prime_threshold(T, alpha)) + 1);
  const std::vector<double> d{0.0, std::exp(-1.0), std::exp(-2.0), 2.0, 5.0};
  const auto recs = covariance_scan(table, T, alpha, 0.5, 0.0, d, 4000, seed);
  for (const auto& c : recs) {
    const double z = std::abs(c.empirical - c.predicted) / c.standard_error;
    r.checks.push_back(make("cosine_sum_d" + fmt(c.distance), z < 3.0, z, 3.0,
                            "empirical " + fmt(c.empirical) + " predicted " + fmt(c.predicted)));
  }
  for (std::size_t i = 1; i <= 2; ++i) {
    const double dev = std::abs(recs[i].empirical - recs[i].predicted_log);
    r.checks.push_back(make("log_form_d" + fmt(recs[i].distance), dev < 1.0, dev, 1.0));
  }
  return r;
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string SuiteReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["passed"] = passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["value"] = c.value;
    e["tolerance"] = c.tolerance;
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j.dump();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"pnt", "moments", "reconstruct", "gabriel", "phi", "mollifier", "covariance"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "pnt") return suite_pnt();
  if (name == "moments") return suite_moments(seed);
  if (name == "reconstruct") return suite_reconstruct(seed);
  if (name == "gabriel") return suite_gabriel(seed, 2);
  if (name == "phi") return suite_phi();
  if (name == "mollifier") return suite_mollifier(seed);
  if (name == "covariance") return suite_covariance(seed);
  throw DomainError("unknown verification suite: " + name);
}

std::vector<double> bessel_moments(const std::vector<double>& moduli, int k_max) {
  if (k_max < 0) throw DomainError("bessel_moments: k_max must be nonnegative");
  std::vector<double> series(k_max + 1, 0.0);
  series[0] = 1.0;
  for (double a : moduli) {
    // I0(a z) = sum_m (a z / 2)^{2m} / (m!)^2
    std::vector<double> factor(k_max + 1, 0.0);
    double term = 1.0;
    for (int m = 0; 2 * m <= k_max; ++m) {
      if (m > 0) term *= (a / 2) * (a / 2) / (static_cast<double>(m) * m);
      factor[2 * m] = term;
    }
    std::vector<double> next(k_max + 1, 0.0);
    for (int i = 0; i <= k_max; ++i) {
      for (int j = 0; i + j <= k_max; ++j) next[i + j] += series[i] * factor[j];
    }
    series = std::move(next);
  }
  double factorial = 1;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) factorial *= k;
    series[k] *= factorial;
  }
  return series;
}

std::vector<Estimate> sample_moments(const Eigen::VectorXd& x, int k_max) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw DomainError("sample_moments: need at least two samples");
  std::vector<Estimate> out;
  for (int k = 0; k <= k_max; ++k) {
    const Eigen::ArrayXd p = x.array().pow(k);
    Estimate e;
    e.mean = p.mean();
    e.se = std::sqrt((p - e.mean).square().sum() / (n - 1) / n);
    out.push_back(e);
  }
  return out;
}

DirichletPoly random_poly(std::uint64_t length, CounterRng& rng) {
  DirichletPoly::Terms terms;
  for (std::uint64_t n = 1; n <= length; ++n) {
    const double re = rng.normal(), im = rng.normal();
    terms.emplace_hint(terms.end(), n, cplx(re, im) / std::numbers::sqrt2);
  }
  return DirichletPoly(terms);
}

double reconstruction_error(const DirichletPoly& D, double sigma, double t, double T, const Eigen::VectorXd& h,
                            long k_max) {
  const BumpKernel V = BumpKernel::discretization();
  const Reconstruction rec = reconstruct(D, sigma, t, T, h, V, k_max);
  const Eigen::VectorXcd direct = evaluate_grid_naive(D, sigma, t, h);
  return (rec.values - direct).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff();
}

GabrielRecord gabriel_smoothed(const DirichletPoly& D, double tau, double Delta, double L) {
  const RectKernel k(Delta, L);
  const LineEvaluator F = [&](double sigma, const Eigen::VectorXd& t) {
    Eigen::VectorXcd v = evaluate_grid(D, sigma, tau, t);
    for (Eigen::Index i = 0; i < t.size(); ++i) v[i] *= phi_rect({sigma, t[i]}, k);
    return v;
  };
  GabrielOptions opt;
  opt.cutoff = 6 * L;
  return gabriel_check(F, 0.5, 1.0, 0.75, 2.0, opt);
}

}  // namespace zf
