#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zf/bandlimit.hpp"
#include "zf/checks.hpp"
#include "zf/errors.hpp"

using namespace zf;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Trapezoid rule for the Fourier transform of V; spectrally accurate for a
// smooth compactly supported integrand and independent of the adaptive rule.
cplx trapezoid_fourier(const BumpKernel& V, double xi, int n = 20000) {
  const double a = V.support_lo(), b = V.support_hi(), h = (b - a) / n;
  cplx acc = 0;
  for (int i = 1; i < n; ++i) {
    const double x = a + i * h;
    acc += V(x) * std::polar(1.0, -2 * kPi * xi * x);
  }
  return acc * h;
}

DirichletPoly random_poly(std::mt19937_64& rng, std::uint64_t length) {
  std::normal_distribution<double> g;
  DirichletPoly::Terms t;
  for (std::uint64_t n = 1; n <= length; ++n) t[n] = cplx(g(rng), g(rng));
  return DirichletPoly(t);
}

}  // namespace

TEST_CASE("bump kernel values") {
  const BumpKernel V = BumpKernel::discretization(0.1);
  CHECK(V(0.5) == 1.0);
  CHECK(V(2.0) == 0.0);
  CHECK(V.plateau_lo() == doctest::Approx(0.0));
  CHECK(V.plateau_hi() == doctest::Approx(1.1));
  CHECK(V.support_lo() == doctest::Approx(-0.1));
  CHECK(V.support_hi() == doctest::Approx(1.2));
  for (double x = -0.5; x <= 2.0; x += 1e-3) {
    const double v = bump_eval(V, x);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (x >= 0 && x <= 1.1) CHECK(std::abs(v - 1.0) <= 1e-12);
    if (x < -0.1 || x > 1.2) CHECK(v == 0.0);
  }
  // Monotone ramps.
  for (double x = -0.1; x < 0; x += 1e-3) CHECK(V(x) <= V(x + 1e-3) + 1e-15);
  CHECK(bump_cdf(-1) == 0.0);
  CHECK(bump_cdf(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bump_cdf(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(BumpKernel::discretization(0.0), DomainError);
  CHECK_THROWS_AS(BumpKernel::discretization(0.6), DomainError);
  CHECK_THROWS_AS(BumpKernel(0, 0.1, 0.1), DomainError);
}

TEST_CASE("Fourier transform of the bump kernel") {
  const BumpKernel V = BumpKernel::discretization(0.1);
  // Integral of V is the length of the indicator, 1 + 2 eps.
  CHECK(bump_fourier(V, 0).real() == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(std::abs(trapezoid_fourier(V, 0) - 1.2) < 1e-10);
  for (double xi : {0.005, 0.37, 1.0, 2.5, 7.77, 31.4, 120.03, 499.99}) {
    CAPTURE(xi);
    const cplx ref = trapezoid_fourier(V, xi);
    CHECK(std::abs(V.fourier(xi) - ref) < 1e-9);
    CHECK(std::abs(V.fourier_direct(xi) - ref) < 1e-10);
    CHECK(std::abs(V.fourier(-xi) - std::conj(V.fourier(xi))) < 1e-14);
  }
  CHECK(std::abs(V.fourier(612.3) - V.fourier_direct(612.3)) < 1e-12);
}

TEST_CASE("Fourier decay of order six") {
  // C_6 fitted on a 0.05 grid of |xi| <= 200 bounds V-hat on the 0.01 grid.
  const BumpKernel V = BumpKernel::discretization(0.1);
  double c6 = 0;
  for (double xi = 0; xi <= 200; xi += 0.05) c6 = std::max(c6, std::abs(V.fourier(xi)) * std::pow(1 + xi, 6));
  for (double xi = 0; xi <= 200; xi += 0.01) CHECK(std::abs(V.fourier(xi)) <= 1.05 * c6 * std::pow(1 + xi, -6));
  // The majorant fitted on the outer cache keeps dominating past the cache.
  for (double xi = 500; xi <= 1500; xi += 7.3) CHECK(std::abs(V.fourier_direct(xi)) <= V.fourier_majorant(xi));
  for (double xi = 250; xi <= 500; xi += 0.37) CHECK(std::abs(V.fourier(xi)) <= V.fourier_majorant(xi) * (1 + 1e-12));
}

TEST_CASE("reconstruction of the constant function") {
  const BumpKernel V = BumpKernel::discretization(0.1);
  const DirichletPoly one({{1, 1.0}});
  const double T = 1e6;
  const Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(401, -2, 2);
  const long k = 8 * min_k_max(T, 2, V);
  const Reconstruction r = reconstruct(one, 0.5, 123.0, T, h, V, k);
  CHECK_FALSE(r.tail_dominated);
  CHECK((r.values.array() - 1.0).abs().maxCoeff() < 1e-6);
}

TEST_CASE("reconstruction of a single term") {
  const BumpKernel V = BumpKernel::discretization(0.1);
  const double T = 1e6, sigma = 0.5, t = 2.5e6;
  const std::uint64_t n0 = 7919;
  const DirichletPoly d({{n0, 1.0}});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd h(100);
  for (auto& x : h) x = u(rng);
  const Reconstruction r = reconstruct(d, sigma, t, T, h, V, 8 * min_k_max(T, 1, V));
  const Eigen::VectorXcd ref = evaluate_grid_naive(d, sigma, t, h);
  CHECK((r.values - ref).cwiseAbs().maxCoeff() < 1e-6 * std::pow(n0, -sigma));
}

TEST_CASE("reconstruction of a length 1e4 polynomial") {
  const BumpKernel V = BumpKernel::discretization(0.1);
  const double T = 1e6;
  std::mt19937_64 rng(2);
  const DirichletPoly d = random_poly(rng, 10'000);
  const Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(201, -1, 1);
  for (double sigma : {0.5, 0.75}) {
    const double t = 1.7e6;
    const Reconstruction r = reconstruct(d, sigma, t, T, h, V, 8 * min_k_max(T, 1, V));
    const Eigen::VectorXcd ref = evaluate_grid_naive(d, sigma, t, h);
    const double rel = (r.values - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
    CHECK(rel < 1e-5);
    CHECK((r.tail_bounds.array() >= 0).all());
  }
}

TEST_CASE("reconstruction preconditions and tail flag") {
  const BumpKernel V = BumpKernel::discretization(0.1);
  const DirichletPoly d({{3, 1.0}});
  const Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(11, -1, 1);
  CHECK(reconstruct(d, 0.5, 0, 1e6, h, V, 10).tail_dominated);
  CHECK_FALSE(reconstruct(d, 0.5, 0, 1e6, h, V, min_k_max(1e6, 1, V)).tail_dominated);
  CHECK_THROWS_AS(reconstruct(d, 0.5, 0, 1e6, h, V, 0), DomainError);
  CHECK_THROWS_AS(reconstruct(d, 0.5, 0, 1.0, h, V, 10), DomainError);
  CHECK_THROWS_AS(reconstruct(DirichletPoly({{5000, 1.0}}), 0.5, 0, 1e3, h, V, 10), DomainError);
  CHECK_THROWS_AS(reconstruct(d, 0.5, 0, 1e6, h, BumpKernel::half_line(0.5), 10), DomainError);
  const cplx scalar = reconstruct(d, 0.5, 0, 1e6, 0.3, V, 8 * min_k_max(1e6, 1, V));
  CHECK(std::abs(scalar - d(cplx(0.5, 0.3))) < 1e-6);
}

TEST_CASE("Holder majorant dominates the grid maximum") {
  const BumpKernel V = BumpKernel::discretization(0.1);
  const double T = 1e5;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const Eigen::VectorXd h = Eigen::VectorXd::LinSpaced(101, -0.5, 0.5);
  const long k = 2 * min_k_max(T, 0.5, V);
  for (int i = 0; i < 20; ++i) {
    const DirichletPoly d = random_poly(rng, 200 + 50 * i);
    const double t = T * (1 + u(rng));
    const Eigen::VectorXd mod = evaluate_grid_naive(d, 0.5, t, h).cwiseAbs();
    for (double beta : {1.0, 2.0, 3.0}) {
      double worst = 0;
      for (Eigen::Index j = 0; j < h.size(); ++j) {
        const double maj = holder_majorant(d, 0.5, t, T, h[j], beta, V, k);
        worst = std::max(worst, std::pow(mod[j], beta) / maj);
      }
      CAPTURE(i);
      CAPTURE(beta);
      CHECK(worst <= 1.0);
    }
  }
  CHECK_THROWS_AS(holder_majorant(DirichletPoly({{2, 1.0}}), 0.5, 0, T, 0, 0.5, V, k), DomainError);
}

TEST_CASE("delta_eta") {
  const BumpKernel V = BumpKernel::half_line(0.5);
  CHECK(V(1.0) == 1.0);
  CHECK(V.support_lo() == doctest::Approx(0.0));
  for (double eta : {0.5, 2.0, 10.0}) {
    for (double v : {-3.0, 0.0, 0.7, 5.0, 20.0}) {
      CHECK(std::abs(delta_eta(cplx(0.5, v), eta, V) - V.fourier(v / eta)) < 1e-8);
    }
  }
  // Scaling limit towards the integral of V: the gap is at most
  // 2 pi |z - 1/2| int y V(y) dy / eta <= 2 pi |z - 1/2| 2.5 V-hat(0) / eta.
  const cplx z(0.51, 0.2);
  for (double eta : {1.0, 10.0, 100.0, 1000.0}) {
    const double gap = std::abs(delta_eta(z, eta, V) - V.fourier(0));
    CHECK(gap <= 2 * kPi * std::abs(z - 0.5) * 2.5 * V.fourier(0).real() / eta);
  }
  // At sigma = 1/2 + eta, |delta_eta| <= int_0^inf e^{-2 pi y} V(y) dy <= 1/(2 pi).
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 20; ++i) {
    const double eta = 0.1 + 10 * u(rng), v = 200 * (u(rng) - 0.5);
    CHECK(std::abs(delta_eta(cplx(0.5 + eta, v), eta, V)) <= 1 / (2 * kPi));
  }
  CHECK_THROWS_AS(delta_eta(cplx(0.4, 0), 1.0, V), DomainError);
  CHECK_THROWS_AS(delta_eta(cplx(0.5, 0), 0.0, V), DomainError);
  CHECK_THROWS_AS(delta_eta(cplx(0.5, 0), 1.0, BumpKernel::discretization()), DomainError);
}

TEST_CASE("rectangle kernel Phi") {
  const RectKernel k(10, 100);
  CHECK(std::abs(std::abs(phi_rect(cplx(0.5, 0), k)) - 1) < 0.01);
  CHECK(std::abs(phi_rect(cplx(0.5, 300), k)) < 0.01);
  double prev = 2;
  for (double d : {0.0, 0.5, 1.0, 5.0, 10.0}) {
    const double m = std::abs(phi_rect(cplx(0.5 + d, 0), k));
    CHECK(m < prev);
    prev = m;
  }
  CHECK(std::abs(phi_rect(cplx(0.5 + 50 * 100 / 100.0, 0), k)) < 0.1);
  CHECK_THROWS_AS(RectKernel(10, 5), DomainError);
  CHECK_THROWS_AS(RectKernel(0, 5), DomainError);
  CHECK_THROWS_AS(phi_rect(cplx(0.3, 0), k), DomainError);
}

TEST_CASE("Phi properties with frozen constants") {
  const SuiteReport r = run_suite("phi", 1);
  for (const auto& c : r.checks) {
    CAPTURE(c.name);
    CAPTURE(c.value);
    CHECK(c.pass);
  }
}

TEST_CASE("three-lines convexity of L^k norms") {
  const LineEvaluator gauss = [](double sigma, const Eigen::VectorXd& t) {
    Eigen::VectorXcd out(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) out[i] = std::exp(cplx(sigma, t[i]) * cplx(sigma, t[i]));
    return out;
  };
  const GabrielRecord r = gabriel_check(gauss, 0.5, 2.0, 1.0, 2);
  CHECK(r.lhs_le_rhs);
  CHECK(r.slack >= 1.0);
  // |e^{z^2}|^2 = e^{2 sigma^2 - 2 t^2}: closed-form line integrals.
  for (auto [sigma, I] : {std::pair{0.5, r.I_alpha}, {1.0, r.I_gamma}, {2.0, r.I_beta}}) {
    CHECK(I == doctest::Approx(std::exp(2 * sigma * sigma) * std::sqrt(kPi / 2)).epsilon(1e-8));
  }
  const GabrielRecord same = gabriel_check(gauss, 0.5, 2.0, 0.5, 2);
  CHECK(same.lhs_le_rhs);
  CHECK(same.slack == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gabriel_check(gauss, 1.0, 2.0, 0.5, 2), DomainError);
  const LineEvaluator flat = [](double, const Eigen::VectorXd& t) {
    return Eigen::VectorXcd(t.unaryExpr([](double x) { return cplx(1 / (1 + std::abs(x)), 0); }));
  };
  CHECK_THROWS_AS(line_integral(flat, 0.5, 2), InconclusiveError);
}
