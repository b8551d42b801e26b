#include "zf/dirichlet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "json.hpp"

#include "zf/arith.hpp"
#include "zf/errors.hpp"
#include "zf/kahan.hpp"
#include "zf/zeta.hpp"

namespace zf {

namespace {

using cplx = std::complex<double>;
constexpr long double kTwoPiL = 6.283185307179586476925286766559L;

// t ln n reduced mod 2 pi in extended precision.
Eigen::VectorXd base_phases(const DirichletPoly& poly, double t) {
  const auto& lg = poly.logs_extended();
  Eigen::VectorXd ph(static_cast<Eigen::Index>(lg.size()));
  const long double tl = t;
  for (std::size_t i = 0; i < lg.size(); ++i) {
    ph[static_cast<Eigen::Index>(i)] = static_cast<double>(std::fmod(tl * lg[i], kTwoPiL));
  }
  return ph;
}

bool is_uniform(const Eigen::VectorXd& h) {
  if (h.size() < 3) return false;
  const double step = (h[h.size() - 1] - h[0]) / static_cast<double>(h.size() - 1);
  if (!(step > 0)) return false;
  for (Eigen::Index i = 1; i < h.size(); ++i) {
    if (std::abs((h[i] - h[i - 1]) - step) > 1e-9 * step) return false;
  }
  return true;
}

bool mul_overflows(std::uint64_t a, std::uint64_t b, std::uint64_t cap) { return b != 0 && a > cap / b; }

}  // namespace

DirichletPoly::DirichletPoly(const Terms& terms) {
  std::vector<std::pair<std::uint64_t, cplx>> kept;
  kept.reserve(terms.size());
  for (const auto& [n, a] : terms) {
    if (n == 0) throw DomainError("DirichletPoly: keys must be >= 1");
    if (a != cplx(0.0, 0.0)) kept.emplace_back(n, a);
  }
  keys_.resize(kept.size());
  coeffs_.resize(static_cast<Eigen::Index>(kept.size()));
  logs_.resize(static_cast<Eigen::Index>(kept.size()));
  logs_ld_.resize(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    keys_[i] = kept[i].first;
    coeffs_[static_cast<Eigen::Index>(i)] = kept[i].second;
    logs_ld_[i] = std::log(static_cast<long double>(kept[i].first));
    logs_[static_cast<Eigen::Index>(i)] = static_cast<double>(logs_ld_[i]);
  }
}

std::complex<double> DirichletPoly::coefficient(std::uint64_t n) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), n);
  if (it == keys_.end() || *it != n) return {0.0, 0.0};
  return coeffs_[it - keys_.begin()];
}

DirichletPoly::Terms DirichletPoly::terms() const {
  Terms out;
  for (std::size_t i = 0; i < keys_.size(); ++i) out.emplace(keys_[i], coeffs_[static_cast<Eigen::Index>(i)]);
  return out;
}

std::complex<double> DirichletPoly::operator()(std::complex<double> s) const {
  const Eigen::VectorXd ph = base_phases(*this, s.imag());
  KahanSum<cplx> sum;
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
    sum += coeffs_[i] * std::polar(std::exp(-s.real() * logs_[i]), -ph[i]);
  }
  return sum.value();
}

double DirichletPoly::l1_norm(double sigma) const {
  return (coeffs_.cwiseAbs().array() * (-sigma * logs_.array()).exp()).sum();
}

Eigen::VectorXcd evaluate_grid_naive(const DirichletPoly& poly, double sigma, double t, const Eigen::VectorXd& h) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(h.size());
  if (poly.empty()) return out;
  const Eigen::VectorXd ph = base_phases(poly, t);
  const Eigen::ArrayXd mag = (-sigma * poly.logs().array()).exp();
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    KahanSum<cplx> sum;
    for (Eigen::Index k = 0; k < ph.size(); ++k) {
      sum += poly.coeffs()[k] * std::polar(mag[k], -(ph[k] + h[i] * poly.logs()[k]));
    }
    out[i] = sum.value();
  }
  return out;
}

Eigen::VectorXcd evaluate_grid(const DirichletPoly& poly, double sigma, double t, const Eigen::VectorXd& h) {
  if (h.size() > 10'000'000) throw BudgetError("evaluate_grid: grid exceeds 1e7 points");
  if (poly.empty() || !is_uniform(h)) return evaluate_grid_naive(poly, sigma, t, h);
  constexpr Eigen::Index kReseed = 128;
  const Eigen::Index m = static_cast<Eigen::Index>(poly.size());
  const Eigen::ArrayXd ph = base_phases(poly, t).array();
  const Eigen::ArrayXd lg = poly.logs().array();
  const Eigen::ArrayXcd amp = poly.coeffs().array() * (-sigma * lg).exp().cast<cplx>();
  const double step = (h[h.size() - 1] - h[0]) / static_cast<double>(h.size() - 1);
  Eigen::ArrayXcd w(m), z(m);
  for (Eigen::Index k = 0; k < m; ++k) w[k] = std::polar(1.0, -step * lg[k]);
  Eigen::VectorXcd out(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (i % kReseed == 0) {
      for (Eigen::Index k = 0; k < m; ++k) z[k] = amp[k] * std::polar(1.0, -(ph[k] + h[i] * lg[k]));
    } else {
      z *= w;
    }
    out[i] = z.sum();
  }
  return out;
}

DirichletPoly prime_sum_poly(const PrimeTable& table, double T, double alpha, bool include_prime_powers) {
  const double x = prime_threshold(T, alpha);
  table.require(x);
  auto [first, last] = table.range(1.0, x);
  DirichletPoly::Terms terms;
  const auto& pr = table.primes();
  for (std::size_t i = first; i < last; ++i) {
    terms[pr[i]] += 1.0;
    if (!include_prime_powers) continue;
    std::uint64_t pk = pr[i];
    for (int k = 2;; ++k) {
      if (mul_overflows(pk, pr[i], ~std::uint64_t{0})) break;
      pk *= pr[i];
      if (static_cast<double>(pk) > x) break;
      terms[pk] += 1.0 / k;
    }
  }
  return DirichletPoly(terms);
}

DirichletPoly smoothed_approx_poly(double T, int A) {
  if (A < 1) throw DomainError("smoothed_approx_poly: A must be at least 1");
  DirichletPoly::Terms terms;
  if (!(T >= 1)) return DirichletPoly(terms);
  const auto n_max = static_cast<std::uint64_t>(std::floor(T));
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const double w = std::pow(1.0 - static_cast<double>(n) / T, A);
    if (w < 1e-300) break;
    terms.emplace_hint(terms.end(), n, w);
  }
  return DirichletPoly(terms);
}

IncrementSystem build_increments(const PrimeTable& table, double T, int K) {
  if (!(T >= 1e4)) throw DomainError("build_increments: T must be at least 1e4");
  if (K < 4) throw DomainError("build_increments: K must be at least 4");
  IncrementSystem sys;
  sys.T = T;
  sys.K = K;
  const double lt = std::log(T);
  sys.sigma0 = 0.5 + std::pow(lt, 3.0 / (2.0 * K)) / lt;
  sys.bounds.push_back(1.0);
  for (int j = 1; j <= K - 1; ++j) sys.bounds.push_back(prime_threshold(T, static_cast<double>(j) / K));
  table.require(sys.bounds.back());
  const auto& pr = table.primes();
  for (int j = 0; j <= K - 2; ++j) {
    auto [first, last] = table.range(sys.bounds[j], sys.bounds[j + 1]);
    DirichletPoly::Terms terms;
    KahanSum<double> var;
    for (std::size_t i = last; i-- > first;) {
      terms.emplace(pr[i], 1.0);
      var += 0.5 * std::exp(-2.0 * sys.sigma0 * table.logs()[i]);
    }
    sys.increments.emplace_back(terms);
    sys.variances.push_back(var.value());
  }
  return sys;
}

DirichletPoly multiply(const DirichletPoly& a, const DirichletPoly& b, const SeriesLimits& lim) {
  std::unordered_map<std::uint64_t, cplx> acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint64_t na = a.keys()[i];
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::uint64_t nb = b.keys()[j];
      if (mul_overflows(na, nb, lim.max_length)) break;  // keys ascending
      acc[na * nb] += a.coeffs()[static_cast<Eigen::Index>(i)] * b.coeffs()[static_cast<Eigen::Index>(j)];
      if (acc.size() > lim.term_budget) throw BudgetError("multiply: term budget exceeded");
    }
  }
  DirichletPoly::Terms terms;
  for (const auto& [n, c] : acc) {
    if (std::abs(c) / std::sqrt(static_cast<double>(n)) >= lim.prune) terms.emplace(n, c);
  }
  return DirichletPoly(terms);
}

DirichletPoly truncated_exp_series(const DirichletPoly& poly, std::complex<double> lambda, int nu,
                                   const SeriesLimits& lim) {
  if (nu < 1) throw DomainError("truncated_exp: nu must be at least 1");
  DirichletPoly::Terms one{{1, 1.0}};
  DirichletPoly result(one);
  if (lambda == cplx(0.0, 0.0) || poly.empty()) return result;
  DirichletPoly::Terms scaled = poly.terms();
  for (auto& [n, c] : scaled) c *= lambda;
  const DirichletPoly lp(scaled);
  DirichletPoly term(one);
  std::map<std::uint64_t, KahanSum<cplx>> total;
  total[1] += 1.0;
  for (int k = 1; k <= nu; ++k) {
    term = multiply(term, lp, lim);
    for (std::size_t i = 0; i < term.size(); ++i) {
      total[term.keys()[i]] += term.coeffs()[static_cast<Eigen::Index>(i)] / std::tgamma(k + 1.0);
    }
    if (total.size() > lim.term_budget) throw BudgetError("truncated_exp: term budget exceeded");
    if (term.empty()) break;
  }
  DirichletPoly::Terms out;
  for (auto& [n, c] : total) {
    const cplx v = c.value();
    if (std::abs(v) / std::sqrt(static_cast<double>(n)) >= lim.prune) out.emplace(n, v);
  }
  return DirichletPoly(out);
}

DirichletPoly truncated_exp(const DirichletPoly& poly, std::complex<double> lambda, int nu, double smooth_limit,
                            const SeriesLimits& lim) {
  if (nu < 1) throw DomainError("truncated_exp: nu must be at least 1");
  for (std::uint64_t n : poly.keys()) {
    if (static_cast<double>(n) > smooth_limit) throw DomainError("truncated_exp: support exceeds smooth_limit");
  }
  const bool prime_support =
      std::all_of(poly.keys().begin(), poly.keys().end(), [](std::uint64_t n) { return is_prime_u64(n); });
  if (!prime_support) return truncated_exp_series(poly, lambda, nu, lim);

  DirichletPoly::Terms out;
  out[1] = 1.0;
  if (lambda == cplx(0.0, 0.0) || poly.empty()) return DirichletPoly(out);
  const std::size_t m = poly.size();
  std::vector<cplx> la(m);
  double g = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    la[i] = lambda * poly.coeffs()[static_cast<Eigen::Index>(i)];
    g = std::max(g, std::abs(la[i]) / std::sqrt(static_cast<double>(poly.keys()[i])));
  }
  const bool monotone = g <= 1.0;
  // Depth-first over exponent vectors: coefficient prod (lambda a_p)^e / e!.
  auto recurse = [&](auto&& self, std::size_t idx, std::uint64_t n, cplx c, int omega) -> void {
    for (std::size_t i = idx; i < m; ++i) {
      const std::uint64_t p = poly.keys()[i];
      std::uint64_t nn = n;
      cplx cc = c;
      for (int e = 1; omega + e <= nu; ++e) {
        if (mul_overflows(nn, p, lim.max_length)) break;
        nn *= p;
        cc *= la[i] / static_cast<double>(e);
        const double w = std::abs(cc) / std::sqrt(static_cast<double>(nn));
        if (w < lim.prune) {
          if (monotone) break;
        } else {
          out[nn] += cc;
          if (out.size() > lim.term_budget) throw BudgetError("truncated_exp: term budget exceeded");
        }
        self(self, i + 1, nn, cc, omega + e);
      }
    }
  };
  recurse(recurse, 0, 1, cplx(1.0, 0.0), 0);
  return DirichletPoly(out);
}

MollifierParams make_mollifier_params(double T, int K, double theta) {
  if (K < 2) throw DomainError("mollifier: K must be at least 2");
  if (!(T > std::exp(1.0))) throw DomainError("mollifier: T must exceed e");
  MollifierParams p;
  p.T = T;
  p.K = K;
  p.theta = theta;
  p.X = prime_threshold(T, 1.0 - 1.0 / K);
  const double lt = std::log(T);
  p.nu_theta = std::max(1, static_cast<int>(std::floor(100.0 * K * std::exp(std::max(theta, 0.0)) * std::log(lt))));
  p.max_length = static_cast<std::uint64_t>(std::floor(std::pow(T, 0.75)));
  p.sigma0 = 0.5 + std::pow(lt, 3.0 / (2.0 * K)) / lt;
  return p;
}

DirichletPoly mollifier(const PrimeTable& table, const MollifierParams& params, std::size_t term_budget) {
  table.require(params.X);
  auto [first, last] = table.range(1.0, params.X);
  const auto& pr = table.primes();
  DirichletPoly::Terms out;
  out[1] = 1.0;
  const std::uint64_t cap = params.max_length;
  auto recurse = [&](auto&& self, std::size_t idx, std::uint64_t n, double sign, int omega) -> void {
    if (omega >= params.nu_theta) return;
    for (std::size_t i = idx; i < last; ++i) {
      if (mul_overflows(n, pr[i], cap)) break;  // primes ascending
      const std::uint64_t nn = n * pr[i];
      out.emplace_hint(out.end(), nn, -sign);
      if (out.size() > term_budget) throw BudgetError("mollifier: term budget exceeded");
      self(self, i + 1, nn, -sign, omega + 1);
    }
  };
  recurse(recurse, first, 1, 1.0, 0);
  return DirichletPoly(out);
}

double f_weight(double alpha, double beta, double theta, double T, std::uint64_t n) {
  if (n == 0) throw DomainError("f_weight: n must be positive");
  const double cut = std::pow(std::log(T), std::abs(theta));
  double w = 1.0;
  for (const auto& [p, e] : factorize(n)) {
    const double f = std::log(static_cast<double>(p)) <= cut ? alpha : beta;
    w *= std::pow(f, e);
  }
  return w;
}

MollificationProbe::MollificationProbe(const PrimeTable& table, const MollifierParams& params)
    : params_(params), m_(zf::mollifier(table, params)) {}

double MollificationProbe::residual(double tau, double h) const {
  const cplx s(params_.sigma0, tau + h);
  return std::abs(zeta(s) * m_(s) - 1.0);
}

double mollification_residual(const PrimeTable& table, double T, int K, double tau, double h) {
  return MollificationProbe(table, make_mollifier_params(T, K)).residual(tau, h);
}

std::string to_json(const DirichletPoly& poly) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const cplx c = poly.coeffs()[static_cast<Eigen::Index>(i)];
    doc[std::to_string(poly.keys()[i])] = {c.real(), c.imag()};
  }
  return doc.dump();
}

DirichletPoly poly_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (!doc.is_object()) throw DomainError("poly_from_json: expected an object");
  DirichletPoly::Terms terms;
  for (const auto& [key, val] : doc.items()) {
    std::uint64_t n = 0;
    const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), n);
    if (ec != std::errc() || end != key.data() + key.size() || !val.is_array() || val.size() != 2 ||
        !val[0].is_number() || !val[1].is_number()) {
      throw DomainError("poly_from_json: malformed entry " + key);
    }
    terms[n] = cplx(val[0].get<double>(), val[1].get<double>());
  }
  return DirichletPoly(terms);
}

}  // namespace zf
