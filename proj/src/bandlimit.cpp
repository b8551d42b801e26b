#include "zf/bandlimit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "zf/errors.hpp"
#include "zf/kahan.hpp"
#include "zf/quadrature.hpp"

namespace zf {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double raw_bump(double s) {
  const double q = 1.0 - s * s;
  return q > 0 ? std::exp(-1.0 / q) : 0.0;
}

// Cumulative integral of the normalised bump on a fine grid, cubic Hermite
// in between (the derivative is the density itself).
struct CdfTable {
  static constexpr int kCells = 8192;
  double norm = 0;
  std::vector<double> cdf;

  CdfTable() : cdf(kCells + 1) {
    const double h = 2.0 / kCells;
    std::vector<double> cell(kCells);
    for (int i = 0; i < kCells; ++i) {
      auto f = [](double s) { return raw_bump(s); };
      cell[i] = detail::gk21<double>(f, -1.0 + i * h, -1.0 + (i + 1) * h).first;
    }
    KahanSum<double> acc;
    cdf[0] = 0.0;
    for (int i = 0; i < kCells; ++i) {
      acc += cell[i];
      cdf[i + 1] = acc.value();
    }
    norm = cdf[kCells];
    for (double& v : cdf) v /= norm;
    cdf[kCells] = 1.0;
  }

  double operator()(double s) const {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double h = 2.0 / kCells;
    const double pos = (s + 1.0) / h;
    const int i = std::min(kCells - 1, static_cast<int>(pos));
    const double u = pos - i;
    const double s0 = -1.0 + i * h;
    const double d0 = raw_bump(s0) / norm * h;
    const double d1 = raw_bump(s0 + h) / norm * h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * cdf[i] + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * cdf[i + 1] +
           (u3 - u2) * d1;
  }
};

const CdfTable& cdf_table() {
  static const CdfTable table;
  return table;
}

// Transform of the unit bump and its omega-derivative, by quadrature.
cplx bump_hat_and_slope(double omega) {
  const double norm = cdf_table().norm;
  auto f = [&](double s) {
    const double w = raw_bump(s) / norm;
    const double arg = 2.0 * kPi * omega * s;
    return cplx(2.0 * w * std::cos(arg), -4.0 * kPi * s * w * std::sin(arg));
  };
  const int pieces = 2 + static_cast<int>(std::ceil(2.0 * omega));
  std::vector<double> pts(pieces + 1);
  for (int i = 0; i <= pieces; ++i) pts[i] = static_cast<double>(i) / pieces;
  QuadratureOptions opt;
  opt.abs_tol = 1e-13;
  return integrate(f, pts, opt).value;
}

std::vector<double> panel_points(std::initializer_list<double> edges, int per_piece) {
  std::vector<double> e(edges);
  std::sort(e.begin(), e.end());
  std::vector<double> pts;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (e[i + 1] <= e[i]) continue;
    for (int j = 0; j < per_piece; ++j) pts.push_back(e[i] + (e[i + 1] - e[i]) * j / per_piece);
  }
  pts.push_back(e.back());
  return pts;
}

}  // namespace

double bump_density(double s) { return raw_bump(s) / cdf_table().norm; }
double bump_cdf(double s) { return cdf_table()(s); }

struct BumpKernel::Cache {
  std::once_flag once;
  std::vector<double> value;  // bump transform at omega_j = j * step * r
  std::vector<double> slope;
  double majorant = 0;
};

namespace {

// Kernels with identical parameters share one cache for the process lifetime.
std::shared_ptr<BumpKernel::Cache> shared_cache(double a, double b, double r) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double>, std::shared_ptr<BumpKernel::Cache>> registry;
  std::lock_guard lock(mu);
  auto& slot = registry[{a, b, r}];
  if (!slot) slot = std::make_shared<BumpKernel::Cache>();
  return slot;
}

}  // namespace

BumpKernel::BumpKernel(double a, double b, double r) : a_(a), b_(b), r_(r) {
  if (!(r > 0) || !(b - a >= 2 * r)) throw DomainError("BumpKernel: need r > 0 and b - a >= 2r");
  cache_ = shared_cache(a, b, r);
}

BumpKernel BumpKernel::discretization(double eps) {
  if (!(eps > 0 && eps <= 0.5)) throw DomainError("BumpKernel: eps must lie in (0, 1/2]");
  return BumpKernel(-eps / 2, 1 + 1.5 * eps, eps / 2);
}

BumpKernel BumpKernel::half_line(double eps) {
  if (!(eps > 0 && eps <= 0.5)) throw DomainError("BumpKernel: eps must lie in (0, 1/2]");
  return BumpKernel(eps / 2, 1 + 2.5 * eps, eps / 2);
}

double BumpKernel::operator()(double x) const {
  const CdfTable& c = cdf_table();
  return c((x - a_) / r_) - c((x - b_) / r_);
}

cplx BumpKernel::box_fourier(double xi) const {
  const double len = b_ - a_;
  const double arg = kPi * xi * len;
  const double sinc = std::abs(arg) < 1e-8 ? 1.0 - arg * arg / 6.0 : std::sin(arg) / arg;
  return std::polar(len * sinc, -kPi * xi * (a_ + b_));
}

const BumpKernel::Cache& BumpKernel::cache() const {
  std::call_once(cache_->once, [this] {
    const int n = static_cast<int>(std::lround(kCacheLimit / kCacheStep));
    cache_->value.resize(n + 1);
    cache_->slope.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
      const cplx v = bump_hat_and_slope(j * kCacheStep * r_);
      cache_->value[j] = v.real();
      cache_->slope[j] = v.imag();
    }
    double c = 0;
    for (int j = n / 2; j <= n; ++j) {
      const double xi = j * kCacheStep;
      c = std::max(c, std::abs(box_fourier(xi)) * std::abs(cache_->value[j]) * std::pow(1 + xi, 6));
    }
    cache_->majorant = c;
  });
  return *cache_;
}

double BumpKernel::bump_hat(double omega) const {
  omega = std::abs(omega);
  const double step = kCacheStep * r_;
  const Cache& c = cache();
  const int n = static_cast<int>(c.value.size()) - 1;
  const double pos = omega / step;
  if (pos > n) return bump_hat_and_slope(omega).real();
  const int i = std::min(n - 1, static_cast<int>(pos));
  const double u = pos - i;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * c.value[i] + (u3 - 2 * u2 + u) * c.slope[i] * step +
         (-2 * u3 + 3 * u2) * c.value[i + 1] + (u3 - u2) * c.slope[i + 1] * step;
}

cplx BumpKernel::fourier(double xi) const { return box_fourier(xi) * bump_hat(r_ * xi); }

cplx BumpKernel::fourier_direct(double xi) const {
  return box_fourier(xi) * bump_hat_and_slope(std::abs(r_ * xi)).real();
}

double BumpKernel::fourier_majorant(double xi) const { return cache().majorant * std::pow(1 + std::abs(xi), -6); }

double bump_eval(const BumpKernel& k, double x) { return k(x); }
cplx bump_fourier(const BumpKernel& k, double xi) { return k.fourier(xi); }

namespace {

struct SampleSet {
  double W, L;
  Eigen::VectorXcd d;  // D at k = -k_max .. k_max
};

SampleSet sample(const DirichletPoly& D, double sigma, double t, double T, const BumpKernel& V, long k_max) {
  if (!(T > 1)) throw DomainError("reconstruct: T must exceed 1");
  if (k_max < 1) throw DomainError("reconstruct: k_max must be positive");
  SampleSet s;
  s.W = 2.0 + 3.0 * V.eps();
  s.L = std::log(T);
  if (V.plateau_lo() > 0 || (!D.empty() && std::log(static_cast<double>(D.length())) / s.L > V.plateau_hi())) {
    throw DomainError("reconstruct: polynomial length exceeds T^{1+eps}");
  }
  Eigen::VectorXd nodes(2 * k_max + 1);
  for (long k = -k_max; k <= k_max; ++k) nodes[k + k_max] = 2.0 * kPi * k / (s.W * s.L);
  s.d = evaluate_grid(D, sigma, t, nodes);
  return s;
}

}  // namespace

long min_k_max(double T, double h_max, const BumpKernel& V) {
  const double W = 2.0 + 3.0 * V.eps();
  return static_cast<long>(std::ceil(2.0 * W * (std::abs(h_max) * std::log(T) / (2 * kPi) + 50.0)));
}

Reconstruction reconstruct(const DirichletPoly& D, double sigma, double t, double T, const Eigen::VectorXd& h,
                           const BumpKernel& V, long k_max) {
  const SampleSet s = sample(D, sigma, t, T, V, k_max);
  Reconstruction out;
  out.values.resize(h.size());
  out.tail_bounds.resize(h.size());
  const double l1 = D.l1_norm(sigma);
  constexpr double lim = BumpKernel::kCacheLimit;
  // |Vhat| from the cache, or its decay majorant beyond the cache.
  auto bound = [&](double xi) { return std::abs(xi) <= lim ? std::abs(V.fourier(xi)) : V.fourier_majorant(xi); };
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double phi = h[i] * s.L / (2 * kPi);
    KahanSum<cplx> acc;
    // Terms are bounded by |D| <= l1 on the line. Samples whose kernel value
    // lies beyond the cache enter only through the majorant.
    double tail = 0;
    for (long k = -k_max; k <= k_max; ++k) {
      const double xi = phi - k / s.W;
      if (std::abs(xi) <= lim) {
        acc += s.d[k + k_max] * V.fourier(xi);
      } else {
        tail += V.fourier_majorant(xi);
      }
    }
    out.values[i] = acc.value() / s.W;
    const long k_far = std::max(k_max, static_cast<long>(std::ceil(s.W * (std::abs(phi) + lim))));
    for (long k = k_max + 1; k <= k_far; ++k) tail += bound(phi - k / s.W) + bound(phi + k / s.W);
    const double xi_far = std::max(0.0, k_far / s.W - std::abs(phi));
    tail += 2.0 * s.W * V.fourier_majorant(xi_far) * (1 + xi_far) / 5.0;
    out.tail_bounds[i] = l1 * tail / s.W;
    if (k_max < min_k_max(T, h[i], V) || out.tail_bounds[i] > std::abs(out.values[i])) out.tail_dominated = true;
  }
  return out;
}

cplx reconstruct(const DirichletPoly& D, double sigma, double t, double T, double h, const BumpKernel& V,
                 long k_max) {
  Eigen::VectorXd hv(1);
  hv[0] = h;
  return reconstruct(D, sigma, t, T, hv, V, k_max).values[0];
}

double holder_majorant(const DirichletPoly& D, double sigma, double t, double T, double h, double beta,
                       const BumpKernel& V, long k_max) {
  if (beta < 1) throw DomainError("holder_majorant: beta must be at least 1");
  const SampleSet s = sample(D, sigma, t, T, V, k_max);
  const double phi = h * s.L / (2 * kPi);
  double a = 0, b = 0;
  for (long k = -k_max; k <= k_max; ++k) {
    const double xi = phi - k / s.W;
    const double v = std::abs(xi) <= BumpKernel::kCacheLimit ? std::abs(V.fourier(xi)) : V.fourier_majorant(xi);
    a += std::pow(std::abs(s.d[k + k_max]), beta) * v;
    b += v;
  }
  return (a / s.W) * std::pow(b / s.W, beta - 1);
}

cplx delta_eta(cplx z, double eta, const BumpKernel& V) {
  if (!(z.real() >= 0.5)) throw DomainError("delta_eta: Re z must be at least 1/2");
  if (!(eta > 0)) throw DomainError("delta_eta: eta must be positive");
  if (V.support_lo() < 0) throw DomainError("delta_eta: kernel must be supported in [0, inf)");
  const cplx c = -2.0 * kPi * (z - 0.5) / eta;
  auto f = [&](double y) { return std::exp(c * y) * V(y); };
  const double lo = V.support_lo(), hi = V.support_hi();
  const int per = 2 + static_cast<int>(std::ceil(std::abs(z.imag()) / eta * (hi - lo)));
  return integrate(f, panel_points({lo, V.plateau_lo(), V.plateau_hi(), hi}, per)).value;
}

RectKernel::RectKernel(double Delta_, double L_, double eps) : Delta(Delta_), L(L_), V(BumpKernel::half_line(eps)) {
  if (!(Delta > 0) || !(L >= Delta)) throw DomainError("RectKernel: need 0 < Delta <= L");
}

cplx phi_rect(cplx z, const RectKernel& k) {
  if (!(z.real() >= 0.5)) throw DomainError("phi_rect: Re z must be at least 1/2");
  const double eta = k.L / k.Delta;
  const cplx c = -2.0 * kPi * (z - 0.5) / eta;
  const double D = k.Delta;
  auto f = [&](double y) {
    const double u = y - 1.0;
    const double a = 2.0 * kPi * D * u;
    const double dk = std::abs(a) < 1e-6 ? 2.0 * D * (1.0 - a * a / 6.0) : std::sin(a) / (kPi * u);
    return std::exp(c * y) * (k.V(y) * dk);
  };
  const BumpKernel& V = k.V;
  const double span = V.support_hi() - V.support_lo();
  const int per = 2 + static_cast<int>(std::ceil(2.0 * (D + std::abs(z.imag()) / eta) * span / 3.0));
  return integrate(f, panel_points({V.support_lo(), V.plateau_lo(), 1.0, V.plateau_hi(), V.support_hi()}, per))
      .value;
}

cplx phi_rect_direct(cplx z, const RectKernel& k) {
  if (!(z.real() >= 0.5)) throw DomainError("phi_rect: Re z must be at least 1/2");
  const double eta = k.L / k.Delta;
  auto f = [&](double u) {
    return std::polar(1.0, -2.0 * kPi * u * k.Delta / k.L) * delta_eta(z - cplx(0.0, u), eta, k.V);
  };
  const int pieces = 4 + static_cast<int>(std::ceil(4.0 * k.Delta));
  std::vector<double> pts(pieces + 1);
  for (int i = 0; i <= pieces; ++i) pts[i] = -k.L + 2.0 * k.L * i / pieces;
  QuadratureOptions opt;
  opt.abs_tol = 1e-9;
  return (k.Delta / k.L) * integrate(f, pts, opt).value;
}

double line_integral(const LineEvaluator& F, double sigma, double k, const GabrielOptions& opt) {
  const double C = opt.cutoff;
  long n = std::max<long>(2, static_cast<long>(std::ceil(2 * C / opt.step)));
  double h = 2 * C / static_cast<double>(n);
  auto power_sum = [&](const Eigen::VectorXd& t) {
    const Eigen::VectorXcd v = F(sigma, t);
    return v.cwiseAbs().array().pow(k).sum();
  };
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(n + 1, -C, C);
  const Eigen::VectorXcd v0 = F(sigma, t);
  const Eigen::ArrayXd p0 = v0.cwiseAbs().array().pow(k);
  double sum = p0.sum() - 0.5 * (p0[0] + p0[n]);
  double I = h * sum;
  bool converged = false;
  for (int it = 0; it < opt.max_halvings; ++it) {
    Eigen::VectorXd mid = Eigen::VectorXd::LinSpaced(n, -C + 0.5 * h, C - 0.5 * h);
    sum += power_sum(mid);
    n *= 2;
    h *= 0.5;
    const double next = h * sum;
    const bool close = std::abs(next - I) <= opt.rel_tol * std::abs(next);
    I = next;
    if (close) {
      converged = true;
      break;
    }
  }
  if (!converged) throw QuadratureError("line_integral: trapezoid refinement did not converge", std::abs(I));
  const long m = static_cast<long>(std::ceil(C / h));
  const double tail = (h * power_sum(Eigen::VectorXd::LinSpaced(m, C + h, 2 * C)) +
                       h * power_sum(Eigen::VectorXd::LinSpaced(m, -2 * C, -C - h)));
  if (tail > opt.tail_tol * I) {
    throw InconclusiveError("line_integral: tail mass " + std::to_string(tail / I) + " of the integral beyond cutoff");
  }
  return I;
}

GabrielRecord gabriel_check(const LineEvaluator& F, double alpha, double beta, double gamma, double k,
                            const GabrielOptions& opt) {
  if (!(alpha <= gamma && gamma <= beta)) throw DomainError("gabriel_check: need alpha <= gamma <= beta");
  GabrielRecord r;
  r.I_alpha = line_integral(F, alpha, k, opt);
  r.I_beta = beta == alpha ? r.I_alpha : line_integral(F, beta, k, opt);
  r.I_gamma = gamma == alpha ? r.I_alpha : (gamma == beta ? r.I_beta : line_integral(F, gamma, k, opt));
  double rhs = r.I_alpha;
  if (beta > alpha) {
    const double wa = (beta - gamma) / (beta - alpha);
    const double wb = (gamma - alpha) / (beta - alpha);
    rhs = std::exp(wa * std::log(r.I_alpha) + wb * std::log(r.I_beta));
  }
  r.slack = rhs / r.I_gamma;
  r.lhs_le_rhs = r.I_gamma <= rhs * (1 + 10 * opt.rel_tol);
  return r;
}

}  // namespace zf
