#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zf/bandlimit.hpp"
#include "zf/dirichlet.hpp"
#include "zf/rng.hpp"

namespace zf {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0;
  double tolerance = 0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
  std::string to_json() const;
};

// pnt, moments, reconstruct, gabriel, phi, mollifier, covariance.
const std::vector<std::string>& suite_names();
// Throws DomainError for an unknown suite.
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 1);

// E[X^k], k = 0..k_max, for X = Re sum a_p U_p with independent uniform
// phases: the Taylor coefficients of prod I0(|a_p| z), times k!.
std::vector<double> bessel_moments(const std::vector<double>& moduli, int k_max);

struct Estimate {
  double mean = 0;
  double se = 0;
};
// Sample mean and standard error of x^k, k = 0..k_max.
std::vector<Estimate> sample_moments(const Eigen::VectorXd& x, int k_max);

// Dense polynomial sum_{n <= length} a(n) n^{-s} with standard complex normal a(n).
DirichletPoly random_poly(std::uint64_t length, CounterRng& rng);

// max |reconstruct - direct| / max |direct| over the h-grid.
double reconstruction_error(const DirichletPoly& D, double sigma, double t, double T, const Eigen::VectorXd& h,
                            long k_max);

// Gabriel inequality for D(z + i tau) Phi_{Delta,L}(z) across 1/2 <= Re z <= 1.
GabrielRecord gabriel_smoothed(const DirichletPoly& D, double tau, double Delta, double L);

}  // namespace zf
