#pragma once

#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Core>

#include "zf/dirichlet.hpp"

namespace zf {

// V = indicator of [a, b] convolved with the normalised C^inf bump
// exp(-1/(1-s^2)) of radius r: V = 1 on [a+r, b-r], supported in [a-r, b+r].
class BumpKernel {
 public:
  BumpKernel(double a, double b, double r);

  // Plateau [0, 1+eps], support [-eps, 1+2eps] (the sampling kernel).
  static BumpKernel discretization(double eps = 0.1);
  // Plateau [eps, 1+2eps], support [0, 1+3eps]; V(1) = 1 (for delta_eta).
  static BumpKernel half_line(double eps = 0.5);

  double eps() const { return 2.0 * r_; }
  double support_lo() const { return a_ - r_; }
  double support_hi() const { return b_ + r_; }
  double plateau_lo() const { return a_ + r_; }
  double plateau_hi() const { return b_ - r_; }

  double operator()(double x) const;

  // Fourier transform with the e^{-2 pi i xi x} convention. Cached for
  // |xi| <= 500 (step 0.01, cubic Hermite); computed by quadrature beyond.
  std::complex<double> fourier(double xi) const;
  std::complex<double> fourier_direct(double xi) const;

  // C (1 + |xi|)^{-6} with C fitted on the outer half of the cache.
  double fourier_majorant(double xi) const;

  static constexpr double kCacheLimit = 500.0;
  static constexpr double kCacheStep = 0.01;

  struct Cache;

 private:
  const Cache& cache() const;
  std::complex<double> box_fourier(double xi) const;
  double bump_hat(double omega) const;  // transform of the unit-radius bump

  double a_, b_, r_;
  std::shared_ptr<Cache> cache_;
};

double bump_eval(const BumpKernel& k, double x);
std::complex<double> bump_fourier(const BumpKernel& k, double xi);

// Bump profile psi(s) = exp(-1/(1-s^2)) / c on (-1, 1) and its CDF.
double bump_density(double s);
double bump_cdf(double s);

struct Reconstruction {
  Eigen::VectorXcd values;
  Eigen::VectorXd tail_bounds;
  bool tail_dominated = false;
};

// Right-hand side of the sampling identity
//   D(sigma+it+ih) = (1/W) sum_{|k|<=k_max} D(sigma+it+2 pi i k/(W ln T)) Vhat(h ln T/(2 pi) - k/W),
// W = 2 + 3 eps, evaluated for every h. D is sampled once on the union of nodes.
// Terms whose kernel argument lies beyond the V-hat cache are dropped from the
// value and bounded through the decay majorant in tail_bounds.
Reconstruction reconstruct(const DirichletPoly& D, double sigma, double t, double T, const Eigen::VectorXd& h,
                           const BumpKernel& V, long k_max);

std::complex<double> reconstruct(const DirichletPoly& D, double sigma, double t, double T, double h,
                                 const BumpKernel& V, long k_max);

// Smallest k_max admitted without the tail flag for window |h| <= h_max.
long min_k_max(double T, double h_max, const BumpKernel& V);

// Holder majorant of |D(sigma+it+ih)|^beta from the same samples (beta >= 1).
double holder_majorant(const DirichletPoly& D, double sigma, double t, double T, double h, double beta,
                       const BumpKernel& V, long k_max);

// delta_eta(z) = eta int_0^inf e^{-2 pi (z - 1/2) x} V(eta x) dx; Re z >= 1/2.
std::complex<double> delta_eta(std::complex<double> z, double eta, const BumpKernel& V);

struct RectKernel {
  RectKernel(double Delta, double L, double eps = 0.5);
  double Delta;
  double L;
  BumpKernel V;
};

// Phi_{Delta,L}(z) = (Delta/L) int_{-L}^{L} e^{-2 pi i u Delta/L} delta_{L/Delta}(z - iu) du,
// evaluated after exchanging the two integrals (single quadrature against a
// Dirichlet kernel).
std::complex<double> phi_rect(std::complex<double> z, const RectKernel& k);

// The defining double integral, quadrature nested in quadrature.
std::complex<double> phi_rect_direct(std::complex<double> z, const RectKernel& k);

// F(sigma + i t) for a vector of t.
using LineEvaluator = std::function<Eigen::VectorXcd(double sigma, const Eigen::VectorXd& t)>;

struct GabrielOptions {
  double cutoff = 50.0;     // integrate over |t| <= cutoff
  double step = 0.05;       // initial trapezoid step
  double rel_tol = 1e-9;    // stop halving when successive sums agree
  int max_halvings = 12;
  double tail_tol = 1e-6;   // tail mass on cutoff < |t| <= 2 cutoff, relative
};

struct GabrielRecord {
  double I_alpha = 0;
  double I_beta = 0;
  double I_gamma = 0;
  bool lhs_le_rhs = false;
  double slack = 0;  // rhs / lhs
};

double line_integral(const LineEvaluator& F, double sigma, double k, const GabrielOptions& opt = {});

GabrielRecord gabriel_check(const LineEvaluator& F, double alpha, double beta, double gamma, double k,
                            const GabrielOptions& opt = {});

}  // namespace zf
