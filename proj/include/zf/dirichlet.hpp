#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zf/primes.hpp"

namespace zf {

// Sparse Dirichlet polynomial sum a(n) n^{-s}, keys ascending, no zero
// coefficients. Immutable after construction.
class DirichletPoly {
 public:
  using Terms = std::map<std::uint64_t, std::complex<double>>;

  DirichletPoly() = default;
  explicit DirichletPoly(const Terms& terms);

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  std::uint64_t length() const { return keys_.empty() ? 0 : keys_.back(); }

  const std::vector<std::uint64_t>& keys() const { return keys_; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  const Eigen::VectorXd& logs() const { return logs_; }
  const std::vector<long double>& logs_extended() const { return logs_ld_; }

  std::complex<double> coefficient(std::uint64_t n) const;
  Terms terms() const;

  // Compensated evaluation at a single point.
  std::complex<double> operator()(std::complex<double> s) const;

  // sum |a(n)| n^{-sigma}
  double l1_norm(double sigma) const;

 private:
  std::vector<std::uint64_t> keys_;
  Eigen::VectorXcd coeffs_;
  Eigen::VectorXd logs_;
  std::vector<long double> logs_ld_;
};

// out[i] = sum a(n) n^{-sigma - i(t + h[i])}. Uniform grids use the per-term
// phase recurrence, re-seeded every 128 steps.
Eigen::VectorXcd evaluate_grid(const DirichletPoly& poly, double sigma, double t, const Eigen::VectorXd& h);

// Same with the per-point reference summation (no recurrence).
Eigen::VectorXcd evaluate_grid_naive(const DirichletPoly& poly, double sigma, double t, const Eigen::VectorXd& h);

// a(p) = 1 on primes p <= exp((ln T)^alpha); optionally a(p^k) = 1/k.
DirichletPoly prime_sum_poly(const PrimeTable& table, double T, double alpha, bool include_prime_powers);

// Sum over n <= T of (1 - n/T)^A n^{-s}, dropping weights below 1e-300.
DirichletPoly smoothed_approx_poly(double T, int A);

struct IncrementSystem {
  double T = 0;
  int K = 0;
  double sigma0 = 0;
  std::vector<double> bounds;          // J_j = (bounds[j], bounds[j+1]], bounds[0] = 1
  std::vector<DirichletPoly> increments;  // P_0 .. P_{K-2}
  std::vector<double> variances;        // s_j^2 = (1/2) sum p^{-2 sigma0}
};

IncrementSystem build_increments(const PrimeTable& table, double T, int K);

// Products and exponentials of Dirichlet polynomials.
struct SeriesLimits {
  std::uint64_t max_length = ~std::uint64_t{0};  // keep only n <= max_length
  std::size_t term_budget = 20'000'000;
  double prune = 1e-18;                          // drop |c| n^{-1/2} below this
};

DirichletPoly multiply(const DirichletPoly& a, const DirichletPoly& b, const SeriesLimits& lim = {});

// sum_{k <= nu} (lambda P)^k / k!, gathered by n. Prime-supported inputs are
// expanded exactly by the multinomial formula; other inputs by repeated
// multiplication. Throws BudgetError instead of truncating silently.
DirichletPoly truncated_exp(const DirichletPoly& poly, std::complex<double> lambda, int nu,
                            double smooth_limit, const SeriesLimits& lim = {});

// Same series by repeated sparse multiplication regardless of support.
DirichletPoly truncated_exp_series(const DirichletPoly& poly, std::complex<double> lambda, int nu,
                                   const SeriesLimits& lim = {});

struct MollifierParams {
  double T = 0;
  int K = 0;
  double X = 0;
  int nu_theta = 0;
  double theta = 0;
  std::uint64_t max_length = 0;  // length cap n <= max_length
  double sigma0 = 0;
};

// X = exp((ln T)^{1-1/K}), nu = floor(100 K e^{max(theta,0)} ln ln T),
// sigma0 = 1/2 + (ln T)^{3/(2K)}/ln T, length cap floor(T^{3/4}).
MollifierParams make_mollifier_params(double T, int K, double theta = 0.0);

// mu(n) on square-free X-smooth n <= max_length with Omega(n) <= nu.
DirichletPoly mollifier(const PrimeTable& table, const MollifierParams& params,
                        std::size_t term_budget = 20'000'000);

// Completely multiplicative weight: alpha per prime factor with ln p <=
// (ln T)^{|theta|}, beta otherwise.
double f_weight(double alpha, double beta, double theta, double T, std::uint64_t n);

// |zeta(s) M(s) - 1| at s = sigma0 + i(tau + h), mollifier built once.
class MollificationProbe {
 public:
  MollificationProbe(const PrimeTable& table, const MollifierParams& params);
  double residual(double tau, double h) const;
  const MollifierParams& params() const { return params_; }
  const DirichletPoly& mollifier() const { return m_; }

 private:
  MollifierParams params_;
  DirichletPoly m_;
};

double mollification_residual(const PrimeTable& table, double T, int K, double tau, double h);

// JSON document {"n": [re, im], ...}
std::string to_json(const DirichletPoly& poly);
DirichletPoly poly_from_json(const std::string& text);

}  // namespace zf
