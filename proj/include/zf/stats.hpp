#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zf/dirichlet.hpp"
#include "zf/primes.hpp"

namespace zf {

struct ShiftSample {
  double T = 0;
  double tau = 0;
  std::uint64_t seed = 0;
  std::uint64_t stratum = 0;
};

// Stratum i draws tau uniformly from [T + iT/n, T + (i+1)T/n] with the
// counter stream (seed, i), so any stratum can be recomputed on its own.
std::vector<ShiftSample> sample_shifts(double T, long n, std::uint64_t seed);
ShiftSample sample_shift(double T, long n, std::uint64_t seed, std::uint64_t stratum);

// |F(tau + h)| for a batch of offsets h.
using FieldEvaluator = std::function<Eigen::VectorXd(double tau, const Eigen::VectorXd& h)>;

// |zeta(1/2 + i(tau + h))| through the Riemann-Siegel path.
FieldEvaluator zeta_field();
// |D(sigma + i(tau + h))|.
FieldEvaluator poly_field(DirichletPoly poly, double sigma);
// |zeta(sigma + i(tau + h))| through the general evaluator (any sigma).
FieldEvaluator zeta_field_off_axis(double sigma);

// Uniform grid on |h| <= (ln T)^theta whose step is the largest value not
// exceeding 2 pi / ((2 + 3 eps) ln T) / refine that splits the window evenly.
struct WindowGrid {
  double half_width = 0;
  double step = 0;
  Eigen::VectorXd h;
};
WindowGrid window_grid(double T, double theta, int refine = 1, double eps = 0.1);

// Interval statistics sample the field on the discretization grid refined
// 8-fold: |zeta|^beta has cusps at zeros, and the unrefined trapezoid rule
// moves moments by up to 10% when the step is halved.
inline constexpr int kGridRefine = 8;

// Trapezoid rule of |F|^beta over the window.
double interval_moment(const FieldEvaluator& field, const ShiftSample& s, double theta, double beta,
                       int refine = kGridRefine);
// Grid maximum followed by golden-section search on the best cell.
double interval_max(const FieldEvaluator& field, const ShiftSample& s, double theta);
// step * #{grid points with |F| > (ln T)^a}, endpoints weighted 1/2.
double high_point_measure(const FieldEvaluator& field, const ShiftSample& s, double theta, double a, double T);

struct MomentRecord {
  double T = 0;
  double theta = 0;
  double beta = 0;
  double tau = 0;
  std::uint64_t seed = 0;
  std::uint64_t stratum = 0;
  double integral = 0;
  double maximum = 0;
  double grid_step = 0;
  std::map<double, double> high_point_measure;

  bool operator==(const MomentRecord&) const = default;
};

// One field evaluation on the window shared by every beta and level a.
std::vector<MomentRecord> moment_records(const FieldEvaluator& field, const ShiftSample& s, double theta,
                                         const std::vector<double>& betas, const std::vector<double>& levels);

struct CovarianceRecord {
  double distance = 0;
  double empirical = 0;
  double standard_error = 0;
  double predicted = 0;      // (1/2) sum cos(d ln p) p^{-2 sigma}
  double predicted_log = 0;  // (1/2) ln(1/d)
};

// Monte Carlo covariance of Re P(sigma + i(tau + h)), P the prime sum up to
// exp((ln T)^alpha), between h and h + d for each d.
std::vector<CovarianceRecord> covariance_scan(const PrimeTable& table, double T, double alpha, double sigma, double h,
                                              const std::vector<double>& distances, long n, std::uint64_t seed);
CovarianceRecord covariance_estimate(const PrimeTable& table, double T, double alpha, double sigma, double h,
                                     double h2, long n, std::uint64_t seed);

// P(tau_i) = sum_{p <= x} p^{-1/2 - i tau_i} on n stratified shifts.
Eigen::VectorXcd prime_sum_samples(const PrimeTable& table, double x, double T, long n, std::uint64_t seed);

enum class Statistic { moment, max };

struct Regression {
  double slope = 0;
  double intercept = 0;
  double stderr_slope = 0;
};

// Least squares of ln(median statistic) on ln ln T, one point per T.
Regression exponent_regression(const std::vector<MomentRecord>& records, Statistic statistic);
// Least squares of y on x with the slope standard error.
Regression linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double median(std::vector<double> v);
// sup |F_n - Phi| for the empirical distribution of x.
double ks_normal(std::vector<double> x);

struct SelbergSample {
  std::vector<double> normalized;  // ln|zeta(1/2 + i tau)| / sqrt((1/2) ln ln T)
  long resampled = 0;
};
SelbergSample selberg_sample(double T, long n, std::uint64_t seed);
double selberg_ks(double T, long n, std::uint64_t seed);

// Off-axis integral of |zeta|^beta over the window at sigma, and the on-axis
// integral over the doubled window.
struct OffAxisPair {
  double off_axis = 0;
  double on_axis = 0;
};
OffAxisPair off_axis_pair(const ShiftSample& s, double theta, double beta, double sigma);

std::string to_jsonl(const MomentRecord& r);
MomentRecord moment_record_from_json(const std::string& line);
std::string csv_header();
std::string to_csv(const MomentRecord& r);

}  // namespace zf
