#include "zf/zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "zf/errors.hpp"
#include "zf/kahan.hpp"

namespace zf {

namespace {

#include "rs_coefficients.inc"

using cplx = std::complex<double>;
constexpr long double kTwoPiL = 6.283185307179586476925286766559L;
constexpr long double kPiL = 3.141592653589793238462643383279L;

long double theta_long(long double t) {
  return t / 2 * std::log(t / kTwoPiL) - t / 2 - kPiL / 8 + 1 / (48 * t) + 7 / (5760 * t * t * t);
}

template <std::size_t N>
double horner(const double (&c)[N], double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
  return r;
}

void check_finite(double t) {
  if (!std::isfinite(t)) throw DomainError("zeta: non-finite argument");
}

cplx zeta_borwein(double t) {
  // eta(s) = sum (-1)^k (k+1)^{-s}, accelerated with Borwein's d_k weights.
  constexpr int n = 64;
  std::array<long double, n + 1> d{};
  long double term = 1.0L / n;
  long double acc = term;
  d[0] = n * acc;
  for (int i = 1; i <= n; ++i) {
    term *= 4.0L * (n + i - 1) * (n - i + 1) / ((2.0L * i) * (2.0L * i - 1));
    acc += term;
    d[i] = n * acc;
  }
  const cplx s(0.5, t);
  KahanSum<cplx> sum;
  for (int k = 0; k < n; ++k) {
    const double w = static_cast<double>((d[k] - d[n]) / d[n]);
    const double lk = std::log(static_cast<double>(k + 1));
    const cplx v = std::exp(-s * lk) * w;
    sum += (k % 2 == 0) ? v : -v;
  }
  const cplx eta = -sum.value();
  return eta / (1.0 - std::exp((1.0 - s) * std::numbers::ln2));
}

cplx zeta_riemann_siegel(double t) {
  const long double tl = t;
  const long double th = theta_long(tl);
  const double a = std::sqrt(t / (2 * std::numbers::pi));
  const auto N = static_cast<long>(std::floor(a));
  const double p = a - static_cast<double>(N);
  KahanSum<double> main;
  for (long n = 1; n <= N; ++n) {
    const long double ph = std::fmod(th - tl * std::log(static_cast<long double>(n)), kTwoPiL);
    main += std::cos(static_cast<double>(ph)) / std::sqrt(static_cast<double>(n));
  }
  const double x = p - 0.5;
  const double ia = 1.0 / a;
  const double corr = horner(kC0, x) +
                      ia * (horner(kC1, x) + ia * (horner(kC2, x) + ia * (horner(kC3, x) + ia * horner(kC4, x))));
  const double sign = (N % 2 == 1) ? 1.0 : -1.0;
  const double z = 2.0 * main.value() + sign * corr / std::sqrt(a);
  const double thr = static_cast<double>(std::fmod(th, kTwoPiL));
  return std::polar(z, -thr);
}

struct EulerMaclaurinTable {
  static constexpr int kTerms = 30;
  std::array<double, kTerms + 1> c{};  // c[k] = B_{2k}/(2k)!
  EulerMaclaurinTable() {
    for (int k = 1; k <= kTerms; ++k) {
      long double z;
      if (k == 1) {
        z = kPiL * kPiL / 6;
      } else if (k == 2) {
        z = kPiL * kPiL * kPiL * kPiL / 90;
      } else {
        z = 0;
        for (int n = 1000; n >= 1; --n) z += std::pow(static_cast<long double>(n), -2.0L * k);
      }
      const long double v = 2 * z / std::pow(kTwoPiL, 2.0L * k);
      c[k] = static_cast<double>(k % 2 == 1 ? v : -v);
    }
  }
};

}  // namespace

double riemann_siegel_theta(double t) {
  check_finite(t);
  if (t < 10) throw DomainError("riemann_siegel_theta: t must be at least 10");
  return static_cast<double>(theta_long(t));
}

std::complex<double> zeta_critical(double t) {
  check_finite(t);
  if (t < 0 || t > 1e12) throw DomainError("zeta_critical: t outside [0, 1e12]");
  const cplx v = t >= 30 ? zeta_riemann_siegel(t) : zeta_borwein(t);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw DomainError("zeta_critical: evaluation produced a non-finite value");
  }
  return v;
}

double hardy_z(double t) {
  if (t < 10) throw DomainError("hardy_z: t must be at least 10");
  const cplx v = zeta_critical(t);
  const double th = static_cast<double>(std::fmod(theta_long(t), kTwoPiL));
  return (std::polar(1.0, th) * v).real();
}

std::complex<double> zeta_euler_maclaurin(std::complex<double> s) {
  check_finite(s.real());
  check_finite(s.imag());
  if (s == cplx(1.0, 0.0)) throw DomainError("zeta: pole at s = 1");
  static const EulerMaclaurinTable table;
  const double t = std::abs(s.imag());
  const auto N = static_cast<long>(20 + std::ceil(t / std::numbers::pi));
  // Plain sums inside blocks of 1024 terms, compensated across blocks.
  KahanSum<cplx> sum;
  const double sigma = s.real(), ts = s.imag();
  for (long hi = N - 1; hi >= 1; hi -= 1024) {
    const long lo = std::max(1L, hi - 1023);
    double re = 0.0, im = 0.0;
    for (long n = hi; n >= lo; --n) {
      const double ln = std::log(static_cast<double>(n));
      const double amp = std::exp(-sigma * ln);
      re += amp * std::cos(ts * ln);
      im -= amp * std::sin(ts * ln);
    }
    sum += cplx(re, im);
  }
  const double lN = std::log(static_cast<double>(N));
  const cplx nms = std::exp(-s * lN);
  cplx tail = static_cast<double>(N) * nms / (s - 1.0) + 0.5 * nms;
  // Rising factorial (s)_{2k-1} times N^{-s-2k+1}.
  cplx rf = s / static_cast<double>(N) * nms;
  const double invN2 = 1.0 / (static_cast<double>(N) * static_cast<double>(N));
  for (int k = 1; k <= EulerMaclaurinTable::kTerms; ++k) {
    const cplx term = table.c[k] * rf;
    tail += term;
    if (std::abs(term) < 1e-17 * std::abs(sum.value() + tail)) break;
    rf *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k) * invN2;
  }
  return sum.value() + tail;
}

std::complex<double> zeta(std::complex<double> s) {
  check_finite(s.real());
  check_finite(s.imag());
  const double t = s.imag();
  if (s.real() == 0.5 && std::abs(t) >= 30) {
    const cplx v = zeta_critical(std::abs(t));
    return t < 0 ? std::conj(v) : v;
  }
  return zeta_euler_maclaurin(s);
}

SmoothedSum smoothed_dirichlet_approx(double sigma, double t, double T, int A) {
  if (A < 1) throw DomainError("smoothed_dirichlet_approx: A must be at least 1");
  if (!(T >= 1)) return {cplx(0.0, 0.0), true};
  const auto n_max = static_cast<long>(std::floor(T));
  KahanSum<cplx> sum;
  bool empty = true;
  for (long n = n_max; n >= 1; --n) {
    const double w = std::pow(1.0 - static_cast<double>(n) / T, A);
    if (w == 0.0) continue;
    empty = false;
    const double ln = std::log(static_cast<double>(n));
    sum += std::polar(w * std::exp(-sigma * ln), -t * ln);
  }
  return {sum.value(), empty};
}

}  // namespace zf
