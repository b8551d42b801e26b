#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zf/errors.hpp"
#include "zf/stats.hpp"
#include "zf/zeta.hpp"

using namespace zf;
using cplx = std::complex<double>;

namespace {

struct Ref {
  double t;
  cplx value;
};

// zeta(1/2 + it) from mpmath at 40 digits (tests/oracles/generate.py).
const Ref kCritical[] = {
    {0.0, {-1.4603545088095868, 0.0}},
    {20.0, {0.42991386043784337, -1.0642914430805891}},
    {35.0, {2.6003424052083713, 1.1077909170807176}},
    {100.0, {2.6926198856813241, -0.020386029602598162}},
    {1000.0, {0.35633436719439606, 0.93199783123299367}},
    {12345.678, {0.87775548256339309, -0.037627073720102788}},
    {1e5, {1.0730320148577531, 5.780848544363504}},
    {112345.678, {0.0058750001806196833, -0.020230582420119751}},
    {1e6, {0.0760890697382271, 2.805102101019299}},
    {1e7 + 0.5, {1.8963696811825753, -3.504096299176139}},
};

}  // namespace

TEST_CASE("zeta on the critical line against mpmath") {
  for (const auto& r : kCritical) {
    CAPTURE(r.t);
    CHECK(std::abs(zeta_critical(r.t) - r.value) < 1e-6);
  }
}

TEST_CASE("first nontrivial zero") {
  CHECK(std::abs(zeta_critical(14.134725)) < 1e-3);
  CHECK(hardy_z(14.13) * hardy_z(14.14) < 0);
  // Bisection on the sign change of Z recovers the mpmath zero.
  double lo = 14.1, hi = 14.2;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (hardy_z(lo) * hardy_z(mid) <= 0 ? hi : lo) = mid;
  }
  CHECK(lo == doctest::Approx(14.134725141734694).epsilon(1e-9));
}

TEST_CASE("general zeta against mpmath") {
  const std::pair<cplx, cplx> refs[] = {
      {{2, 0}, {1.6449340668482264, 0.0}},
      {{0.75, 10}, {1.461434953126222, -0.11416177125806473}},
      {{1.5, -3}, {0.71983412483453085, 0.1184490831887597}},
      {{0.5, 25}, {0.0049845933640356754, -0.014012301962583383}},
      {{0.8, 40}, {0.83305926966098732, -0.65620312186830793}},
      {{3, 50}, {0.88575317457178229, 0.048491476392560986}},
  };
  for (const auto& [s, v] : refs) {
    CAPTURE(s);
    CHECK(std::abs(zeta(s) - v) < 1e-9 * std::max(1.0, std::abs(v)));
  }
  CHECK_THROWS_AS(zeta(cplx(1, 0)), DomainError);
}

TEST_CASE("Riemann-Siegel theta") {
  // Im log Gamma(1/4 + 50i) - 50 ln pi from mpmath.
  CHECK(riemann_siegel_theta(100) == doctest::Approx(87.972165231787219625).epsilon(1e-12));
  const double t = 1e6, d = 0.01;
  const double diff = riemann_siegel_theta(t + d) - riemann_siegel_theta(t);
  CHECK(diff == doctest::Approx(0.5 * d * std::log(t / (2 * std::numbers::pi))).epsilon(1e-6));
  // theta'(t) = (1/2) ln(t / 2 pi) up to O(t^-2): equal to 1 at 2 pi e^2, larger beyond.
  const double t0 = 2 * std::numbers::pi * std::exp(2.0);
  auto slope = [](double x) { return (riemann_siegel_theta(x + 1e-3) - riemann_siegel_theta(x - 1e-3)) / 2e-3; };
  CHECK(slope(t0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(slope(1.1 * t0) > 1);
  CHECK_THROWS_AS(riemann_siegel_theta(9.99), DomainError);
}

TEST_CASE("Hardy Z is real") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lt(std::log(10.0), std::log(1e9));
  for (int i = 0; i < 200; ++i) {
    const double t = std::exp(lt(rng));
    const cplx z = std::polar(1.0, riemann_siegel_theta(t)) * zeta_critical(t);
    CAPTURE(t);
    CHECK(std::abs(z.imag()) <= 1e-6 * std::max(1.0, std::abs(z)));
    CHECK(hardy_z(t) == doctest::Approx(z.real()).epsilon(1e-9));
  }
  CHECK_THROWS_AS(hardy_z(5), DomainError);
}

TEST_CASE("Riemann-Siegel and Euler-Maclaurin agree on the overlap band") {
  for (double t = 25; t <= 40; t += 0.25) {
    CAPTURE(t);
    CHECK(std::abs(zeta_critical(t) - zeta_euler_maclaurin(cplx(0.5, t))) < 1e-5);
  }
}

TEST_CASE("conjugate symmetry through the general path") {
  for (double t : {3.0, 17.5, 31.0, 250.0, 4321.0}) {
    const cplx up = zeta(cplx(0.5, t));
    const cplx down = zeta(cplx(0.5, -t));
    CHECK(std::abs(down - std::conj(up)) <= 1e-9 * std::abs(up));
    CHECK(std::abs(up - zeta_critical(t)) < 1e-6);
  }
}

TEST_CASE("zeta_critical domain") {
  CHECK_THROWS_AS(zeta_critical(-1), DomainError);
  CHECK_THROWS_AS(zeta_critical(2e12), DomainError);
  CHECK_THROWS_AS(zeta_critical(std::nan("")), DomainError);
}

TEST_CASE("smoothed Dirichlet approximation") {
  const SmoothedSum one = smoothed_dirichlet_approx(0.5, 3.0, 1.0, 2);
  CHECK(one.empty);
  CHECK(one.value == cplx(0, 0));
  // Direct 20-digit summation in mpmath.
  CHECK(std::abs(smoothed_dirichlet_approx(0.5, 112345.678, 1e5, 2).value -
                 cplx(0.227113367306085, 0.0235433320871947)) < 1e-9);
  CHECK(std::abs(smoothed_dirichlet_approx(0.75, 112345.678, 1e5, 2).value -
                 cplx(0.387599120696727, 0.154578080888457)) < 1e-9);
  CHECK(std::abs(smoothed_dirichlet_approx(0.5, 1000, 500, 3).value - cplx(0.88532200571982, 0.544528139537327)) <
        1e-10);
  const SmoothedSum far = smoothed_dirichlet_approx(2.0, 0.0, 1e5, 10);
  CHECK(std::abs(far.value.real() - 1.64390794731065) < 1e-12);
  CHECK(std::abs(far.value - std::numbers::pi * std::numbers::pi / 6) < 0.05);
  // Off the critical line the smoothed sum tracks zeta at this height; on it
  // the discrepancy stays of order one.
  const double t = 1e5 + 12345.678;
  CHECK(std::abs(smoothed_dirichlet_approx(0.75, t, 1e5, 2).value - zeta(cplx(0.75, t))) < 0.05);
  CHECK(std::abs(smoothed_dirichlet_approx(0.5, t, 1e5, 2).value - zeta_critical(t)) > 0.1);
  CHECK_THROWS_AS(smoothed_dirichlet_approx(0.5, 1, 10, 0), DomainError);
}

TEST_CASE("Selberg central limit at T = 1e7") {
  CHECK(selberg_ks(1e7, 5000, 1) < 0.05);
}
