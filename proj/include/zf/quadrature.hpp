#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "zf/errors.hpp"

namespace zf {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 1 << 16;
};

template <typename Scalar>
struct QuadratureResult {
  Scalar value{};
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208643474262, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <typename Scalar, typename F>
std::pair<Scalar, double> gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Scalar fc = f(c);
  Scalar kron = fc * kWgk[10];
  Scalar gauss{};
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    Scalar s = f(c - dx) + f(c + dx);
    kron += s * kWgk[j];
    if (j % 2 == 1) gauss += s * kWg[j / 2];
  }
  return {kron * h, std::abs(kron - gauss) * std::abs(h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature over [a, b] split at
// the given breakpoints. Scalar is deduced from the integrand.
template <typename F>
auto integrate(F&& f, const std::vector<double>& points, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(0.0))>> {
  using Scalar = std::decay_t<decltype(f(0.0))>;
  struct Piece {
    double a, b;
    Scalar value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  Scalar total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] == points[i]) continue;
    auto [v, e] = detail::gk21<Scalar>(f, points[i], points[i + 1]);
    heap.push({points[i], points[i + 1], v, e});
    total += v;
    total_err += e;
  }
  int count = static_cast<int>(heap.size());
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (!heap.empty() && total_err > target()) {
    if (count >= opt.max_intervals) {
      throw QuadratureError("adaptive quadrature hit the subdivision cap", total_err);
    }
    Piece p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      throw QuadratureError("adaptive quadrature interval underflow", total_err);
    }
    auto [v1, e1] = detail::gk21<Scalar>(f, p.a, m);
    auto [v2, e2] = detail::gk21<Scalar>(f, m, p.b);
    total += (v1 + v2) - p.value;
    total_err += (e1 + e2) - p.error;
    heap.push({p.a, m, v1, e1});
    heap.push({m, p.b, v2, e2});
    ++count;
  }
  // Re-sum to remove drift from the running updates.
  Scalar sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(std::abs(sum))) {
    throw QuadratureError("non-finite integrand", err);
  }
  return {sum, err, count};
}

template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace zf
