#pragma once

#include <complex>

namespace zf {

// Asymptotic Riemann-Siegel theta; t >= 10.
double riemann_siegel_theta(double t);

// zeta(1/2 + it) for 0 <= t <= 1e12: Riemann-Siegel with corrections C0..C4
// for t >= 30, Borwein's alternating-series acceleration of eta below.
std::complex<double> zeta_critical(double t);

// Hardy Z-function e^{i theta(t)} zeta(1/2 + it), t >= 10.
double hardy_z(double t);

// zeta(s) for general s != 1. Uses Riemann-Siegel on the critical line for
// |t| >= 30 and Euler-Maclaurin elsewhere (O(|t|) terms).
std::complex<double> zeta(std::complex<double> s);

// Euler-Maclaurin summation with N = 20 + ceil(|t|/pi) terms.
std::complex<double> zeta_euler_maclaurin(std::complex<double> s);

struct SmoothedSum {
  std::complex<double> value;
  bool empty = false;  // set when no term carries weight (T <= 1)
};

// Sum over n <= T of n^{-sigma-it} (1 - n/T)^A.
SmoothedSum smoothed_dirichlet_approx(double sigma, double t, double T, int A);

}  // namespace zf
