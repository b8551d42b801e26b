#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zf/dirichlet.hpp"
#include "zf/primes.hpp"

namespace zf {

// Exponents of the short-interval moment and maximum laws; theta > -1.
double predict_m(double theta);
double predict_beta_c(double theta);
double predict_r(double theta);
double predict_f(double theta, double beta);
// Large-deviation exponent of the level set, 0 <= gamma <= m(theta).
double predict_E(double theta, double gamma);

struct ExponentPrediction {
  double theta = 0;
  double m = 0;
  double beta_c = 0;
  double r = 0;
};
ExponentPrediction predict(double theta);

// X_h = Re sum_{p <= cutoff} U_p p^{-1/2 - ih}, U_p uniform on the circle.
struct EulerProductField {
  double T = 0;
  double cutoff = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd logs;
  Eigen::VectorXcd weights;  // U_p p^{-1/2}
};
EulerProductField sample_euler_product(const PrimeTable& table, double T, double cutoff, std::uint64_t seed,
                                       std::uint64_t realization = 0);
double euler_eval(const EulerProductField& field, double h);
Eigen::VectorXd euler_eval(const EulerProductField& field, const Eigen::VectorXd& h);

// Hierarchical Gaussian field on a b-ary tree. L = n_levels ln b plays the
// role of ln ln T. For theta <= 0 a single tree of depth floor((1+theta) n)
// hangs below a shared path of the remaining levels; for theta > 0 there are
// R = round(e^{theta L}) independent trees of depth n.
struct CremConfig {
  int n_levels = 0;
  int branching = 2;
  double theta = 0;
  std::uint64_t seed = 0;

  double increment_variance() const;
  double L() const;
  int depth() const;
  std::uint64_t trees() const;
  double leaves() const;  // as a double so oversized configurations can be reported
};

inline constexpr double kLeafBudget = 67108864.0;  // 2^26

struct CremRecord {
  double beta = 0;
  double free_energy = 0;
  double free_energy_se = 0;
  double max_normalized = 0;
  double max_normalized_se = 0;
  long realizations = 0;
};

// One realization: free_energy[k] = (1/L) ln(e^{-L} sum_leaves e^{beta_k X})
// and max_normalized = max X / L.
struct Realization {
  std::vector<double> free_energy;
  double max_normalized = 0;
};

// Realizations first .. first + count - 1; realization r uses stream r of
// the configured seed, so chunked runs match a single run.
std::vector<Realization> crem_realizations(const CremConfig& cfg, const std::vector<double>& betas,
                                           std::uint64_t first, long count);
// Means and standard errors over realizations, in order.
std::vector<CremRecord> aggregate(const std::vector<double>& betas, const std::vector<Realization>& runs);

std::vector<CremRecord> simulate_crem(const CremConfig& cfg, const std::vector<double>& betas, long n_realizations);

// The Euler-product field on the window |h| <= (ln T)^theta with
// L = ln ln T: free_energy = (1/L) ln int e^{beta X_h} dh, max_normalized =
// max X_h / L, averaged over realizations.
struct EulerConfig {
  double T = 0;
  double cutoff = 0;
  double theta = 0;
  std::uint64_t seed = 0;
};
std::vector<Realization> euler_realizations(const PrimeTable& table, const EulerConfig& cfg,
                                            const std::vector<double>& betas, std::uint64_t first, long count);
std::vector<CremRecord> simulate_euler(const PrimeTable& table, const EulerConfig& cfg,
                                       const std::vector<double>& betas, long n_realizations);

// Paley-Zygmund counting. Retained blocks J..K-3 with J = 1 for theta >= 0
// and floor(K |theta|) + 1 otherwise; thresholds
// x_j = (1 + c/(a K)) gamma L/(a K), a = 1 + min(theta, 0).
struct PzOptions {
  int K = 12;
  double slack = 100.0;   // the constant c above
  double lambda = 0.5;    // success means N >= lambda E[N]
};

struct PzRecord {
  double EN = 0;
  double EN2 = 0;
  double ratio = 0;          // E[N^2] / E[N]^2, infinite when E[N] = 0
  double success_rate = 0;
  double pz_lower_bound = 0;  // (1 - lambda)^2 E[N]^2 / E[N^2]
  double full_length = 0;     // measure of the whole window
  double two_point_ratio = 0; // decoupled pairs, surrogate only
  long realizations = 0;
};

int pz_first_block(double theta, int K);
double pz_threshold(double theta, double gamma, double L, int K, double slack);

PzRecord paley_zygmund_count(const CremConfig& cfg, double gamma, long n_realizations, const PzOptions& opt = {});
PzRecord paley_zygmund_count(const PrimeTable& table, double T, double theta, double gamma, long n_shifts,
                             std::uint64_t seed, const PzOptions& opt = {});

struct TailRecord {
  double sigma = 0;
  double empirical_tail = 0;
  double gaussian_tail = 0;  // 1 - Phi(V / sigma)
  double bound = 0;          // exp(-V^2 / (2 sigma^2))
  double fitted_constant = 0;
  double standard_error = 0;
};

// Tail of Re sum_{p <= x} p^{-1/2 - i tau} over n stratified shifts in [T, 2T].
TailRecord gaussian_tail_check(const PrimeTable& table, double T, double x, double V, long n, std::uint64_t seed);

std::string to_jsonl(const CremConfig& cfg, const CremRecord& r);
std::string to_jsonl(const EulerConfig& cfg, const CremRecord& r);
CremRecord crem_record_from_json(const std::string& line);

}  // namespace zf
