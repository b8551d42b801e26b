#include "zf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/QR>

#include "json.hpp"

#include "zf/errors.hpp"
#include "zf/kahan.hpp"
#include "zf/parallel.hpp"
#include "zf/rng.hpp"
#include "zf/zeta.hpp"

namespace zf {

namespace {

constexpr double kPi = std::numbers::pi;

double trapezoid(const Eigen::ArrayXd& f, double step) {
  const Eigen::Index n = f.size();
  if (n == 1) return 0.0;
  KahanSum<double> acc;
  acc += 0.5 * f[0];
  for (Eigen::Index i = 1; i + 1 < n; ++i) acc += f[i];
  acc += 0.5 * f[n - 1];
  return step * acc.value();
}

double moment_from(const Eigen::VectorXd& values, double beta, double step) {
  if (beta == 0) return trapezoid(Eigen::ArrayXd::Ones(values.size()), step);
  return trapezoid(values.array().pow(beta), step);
}

double measure_from(const Eigen::VectorXd& values, double level, double step) {
  double count = 0;
  const Eigen::Index n = values.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values[i] > level) count += (i == 0 || i == n - 1) ? 0.5 : 1.0;
  }
  return count * step;
}

double refine_max(const FieldEvaluator& field, double tau, const WindowGrid& g, const Eigen::VectorXd& values) {
  Eigen::Index best;
  const double grid_max = values.maxCoeff(&best);
  double lo = g.h[std::max<Eigen::Index>(0, best - 1)];
  double hi = g.h[std::min<Eigen::Index>(g.h.size() - 1, best + 1)];
  auto f = [&](double x) {
    Eigen::VectorXd h(1);
    h[0] = x;
    return field(tau, h)[0];
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  double found = std::max(f1, f2);
  for (int it = 0; it < 40 && hi - lo > 1e-10 * (1 + std::abs(tau)); ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
      found = std::max(found, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
      found = std::max(found, f2);
    }
  }
  return std::max(grid_max, found);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

ShiftSample sample_shift(double T, long n, std::uint64_t seed, std::uint64_t stratum) {
  if (n < 1) throw DomainError("sample_shifts: n must be at least 1");
  if (!(T > 0)) throw DomainError("sample_shifts: T must be positive");
  CounterRng rng(seed, stratum);
  const double u = rng.uniform();
  return {T, T + T * (static_cast<double>(stratum) + u) / static_cast<double>(n), seed, stratum};
}

std::vector<ShiftSample> sample_shifts(double T, long n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_shifts: n must be at least 1");
  std::vector<ShiftSample> out;
  out.reserve(n);
  for (long i = 0; i < n; ++i) out.push_back(sample_shift(T, n, seed, i));
  return out;
}

FieldEvaluator zeta_field() {
  return [](double tau, const Eigen::VectorXd& h) {
    Eigen::VectorXd out(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) out[i] = std::abs(zeta_critical(tau + h[i]));
    return out;
  };
}

FieldEvaluator poly_field(DirichletPoly poly, double sigma) {
  return [poly = std::move(poly), sigma](double tau, const Eigen::VectorXd& h) -> Eigen::VectorXd {
    return evaluate_grid(poly, sigma, tau, h).cwiseAbs();
  };
}

FieldEvaluator zeta_field_off_axis(double sigma) {
  return [sigma](double tau, const Eigen::VectorXd& h) {
    Eigen::VectorXd out(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) out[i] = std::abs(zeta({sigma, tau + h[i]}));
    return out;
  };
}

WindowGrid window_grid(double T, double theta, int refine, double eps) {
  if (!(T > std::numbers::e)) throw DomainError("window_grid: T must exceed e");
  if (refine < 1) throw DomainError("window_grid: refine must be positive");
  const double L = std::log(T);
  const double nominal = 2.0 * kPi / ((2.0 + 3.0 * eps) * L) / refine;
  WindowGrid g;
  g.half_width = std::pow(L, theta);
  if (2.0 * g.half_width < nominal) throw DomainError("window_grid: window shorter than one grid step");
  const long cells = static_cast<long>(std::ceil(2.0 * g.half_width / nominal - 1e-12));
  g.step = 2.0 * g.half_width / static_cast<double>(cells);
  g.h = Eigen::VectorXd::LinSpaced(cells + 1, -g.half_width, g.half_width);
  return g;
}

double interval_moment(const FieldEvaluator& field, const ShiftSample& s, double theta, double beta, int refine) {
  if (!(beta >= 0)) throw DomainError("interval_moment: beta must be nonnegative");
  const WindowGrid g = window_grid(s.T, theta, refine);
  return moment_from(field(s.tau, g.h), beta, g.step);
}

double interval_max(const FieldEvaluator& field, const ShiftSample& s, double theta) {
  const WindowGrid g = window_grid(s.T, theta, kGridRefine);
  return refine_max(field, s.tau, g, field(s.tau, g.h));
}

double high_point_measure(const FieldEvaluator& field, const ShiftSample& s, double theta, double a, double T) {
  const WindowGrid g = window_grid(s.T, theta, kGridRefine);
  return measure_from(field(s.tau, g.h), std::pow(std::log(T), a), g.step);
}

std::vector<MomentRecord> moment_records(const FieldEvaluator& field, const ShiftSample& s, double theta,
                                         const std::vector<double>& betas, const std::vector<double>& levels) {
  const WindowGrid g = window_grid(s.T, theta, kGridRefine);
  const Eigen::VectorXd values = field(s.tau, g.h);
  const double maximum = refine_max(field, s.tau, g, values);
  std::map<double, double> high;
  for (double a : levels) high[a] = measure_from(values, std::pow(std::log(s.T), a), g.step);
  std::vector<MomentRecord> out;
  for (double beta : betas) {
    if (!(beta >= 0)) throw DomainError("moment_records: beta must be nonnegative");
    MomentRecord r;
    r.T = s.T;
    r.theta = theta;
    r.beta = beta;
    r.tau = s.tau;
    r.seed = s.seed;
    r.stratum = s.stratum;
    r.integral = moment_from(values, beta, g.step);
    r.maximum = maximum;
    r.grid_step = g.step;
    r.high_point_measure = high;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CovarianceRecord> covariance_scan(const PrimeTable& table, double T, double alpha, double sigma, double h,
                                              const std::vector<double>& distances, long n, std::uint64_t seed) {
  if (!(sigma >= 0.5)) throw DomainError("covariance_estimate: sigma must be at least 1/2");
  if (n < 1000) throw DomainError("covariance_estimate: n must be at least 1000");
  const DirichletPoly P = prime_sum_poly(table, T, alpha, false);
  const Eigen::Index m = static_cast<Eigen::Index>(distances.size()) + 1;
  Eigen::VectorXd hs(m);
  hs[0] = h;
  for (Eigen::Index j = 1; j < m; ++j) hs[j] = h + distances[j - 1];
  // Offset phases do not depend on tau: one matrix-vector product per shift.
  const Eigen::Index N = static_cast<Eigen::Index>(P.size());
  Eigen::MatrixXcd offsets(m, N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const double lp = P.logs()[k];
    for (Eigen::Index j = 0; j < m; ++j) offsets(j, k) = std::polar(std::exp(-sigma * lp), -hs[j] * lp);
  }
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  Eigen::MatrixXd x(m, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const ShiftSample s = sample_shift(T, n, seed, i);
    Eigen::VectorXcd base(N);
    for (Eigen::Index k = 0; k < N; ++k) {
      const double phase = static_cast<double>(std::fmod(s.tau * P.logs_extended()[k], two_pi));
      base[k] = std::polar(1.0, -phase);
    }
    x.col(static_cast<Eigen::Index>(i)) = (offsets * base).real();
  });
  const Eigen::VectorXd mean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - mean;
  const double threshold = prime_threshold(T, alpha);
  const auto [first, last] = table.range(1.0, threshold);
  std::vector<CovarianceRecord> out;
  for (Eigen::Index j = 1; j < m; ++j) {
    CovarianceRecord r;
    r.distance = distances[j - 1];
    const Eigen::ArrayXd prod = centered.row(0).array() * centered.row(j).array();
    r.empirical = prod.sum() / static_cast<double>(n - 1);
    const double var = (prod - prod.mean()).square().sum() / static_cast<double>(n - 1);
    r.standard_error = std::sqrt(var / static_cast<double>(n));
    const double d = std::abs(r.distance);
    if (sigma == 0.5) {
      r.predicted = 0.5 * cosine_prime_sum(table, 1.0, threshold, d);
    } else {
      KahanSum<double> acc;
      for (std::size_t k = last; k-- > first;) {
        acc += std::cos(d * table.logs()[k]) * std::exp(-2.0 * sigma * table.logs()[k]);
      }
      r.predicted = 0.5 * acc.value();
    }
    r.predicted_log = d > 0 ? 0.5 * std::log(1.0 / d) : INFINITY;
    out.push_back(r);
  }
  return out;
}

CovarianceRecord covariance_estimate(const PrimeTable& table, double T, double alpha, double sigma, double h,
                                     double h2, long n, std::uint64_t seed) {
  return covariance_scan(table, T, alpha, sigma, h, {h2 - h}, n, seed).front();
}

Eigen::VectorXcd prime_sum_samples(const PrimeTable& table, double x, double T, long n, std::uint64_t seed) {
  if (!(x >= 2)) throw DomainError("prime_sum_samples: cutoff must be at least 2");
  if (n < 1) throw DomainError("prime_sum_samples: n must be positive");
  table.require(x);
  const auto [first, last] = table.range(1.0, x);
  std::vector<long double> logs(table.primes().begin() + first, table.primes().begin() + last);
  for (auto& v : logs) v = std::log(v);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  Eigen::VectorXcd out(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const ShiftSample s = sample_shift(T, n, seed, i);
    KahanSum<std::complex<double>> acc;
    for (std::size_t k = logs.size(); k-- > 0;) {
      const double phase = static_cast<double>(std::fmod(s.tau * logs[k], two_pi));
      acc += std::polar(std::exp(-0.5 * static_cast<double>(logs[k])), -phase);
    }
    out[static_cast<Eigen::Index>(i)] = acc.value();
  });
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw DomainError("median: empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

Regression linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("linear_fit: need at least two paired points");
  const double sxx = (x.array() - x.mean()).square().sum();
  if (!(sxx > 1e-12 * (1 + x.squaredNorm()))) throw DomainError("linear_fit: degenerate spread in x");
  Eigen::MatrixXd A(n, 2);
  A.col(0).setOnes();
  A.col(1) = x;
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  Regression r;
  r.intercept = c[0];
  r.slope = c[1];
  if (n > 2) {
    const double rss = (A * c - y).squaredNorm();
    r.stderr_slope = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return r;
}

Regression exponent_regression(const std::vector<MomentRecord>& records, Statistic statistic) {
  std::map<double, std::vector<double>> groups;
  for (const auto& r : records) groups[r.T].push_back(statistic == Statistic::moment ? r.integral : r.maximum);
  if (groups.size() < 3) throw DomainError("exponent_regression: need at least 3 distinct T");
  if (groups.rbegin()->first < 100.0 * groups.begin()->first) {
    throw DomainError("exponent_regression: T values must span two decades");
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(groups.size())), y(x.size());
  Eigen::Index i = 0;
  for (const auto& [T, v] : groups) {
    const double med = median(v);
    if (!(med > 0)) throw DomainError("exponent_regression: nonpositive median statistic");
    x[i] = std::log(std::log(T));
    y[i] = std::log(med);
    ++i;
  }
  return linear_fit(x, y);
}

double ks_normal(std::vector<double> x) {
  if (x.empty()) throw DomainError("ks_normal: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = normal_cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

SelbergSample selberg_sample(double T, long n, std::uint64_t seed) {
  if (n < 1) throw DomainError("selberg_sample: n must be positive");
  if (!(T >= 1e6)) throw DomainError("selberg_sample: T must be at least 1e6");
  const double scale = std::sqrt(0.5 * std::log(std::log(T)));
  SelbergSample out;
  out.normalized.resize(n);
  std::vector<int> redraws(n, 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    CounterRng rng(seed, i);
    for (;;) {
      const double tau = T + T * (static_cast<double>(i) + rng.uniform()) / static_cast<double>(n);
      const double z = std::abs(zeta_critical(tau));
      if (z > 0) {
        out.normalized[i] = std::log(z) / scale;
        return;
      }
      ++redraws[i];
    }
  });
  for (int r : redraws) out.resampled += r;
  return out;
}

double selberg_ks(double T, long n, std::uint64_t seed) {
  if (n < 1000) throw DomainError("selberg_ks: n must be at least 1000");
  return ks_normal(selberg_sample(T, n, seed).normalized);
}

OffAxisPair off_axis_pair(const ShiftSample& s, double theta, double beta, double sigma) {
  OffAxisPair p;
  p.off_axis = interval_moment(zeta_field_off_axis(sigma), s, theta, beta);
  const double doubled = theta + std::log(2.0) / std::log(std::log(s.T));
  p.on_axis = interval_moment(zeta_field(), s, doubled, beta);
  return p;
}

std::string to_jsonl(const MomentRecord& r) {
  nlohmann::json j;
  j["T"] = r.T;
  j["theta"] = r.theta;
  j["beta"] = r.beta;
  j["tau"] = r.tau;
  j["seed"] = r.seed;
  j["stratum"] = r.stratum;
  j["integral"] = r.integral;
  j["maximum"] = r.maximum;
  j["grid_step"] = r.grid_step;
  nlohmann::json hp = nlohmann::json::array();
  for (const auto& [a, m] : r.high_point_measure) hp.push_back({a, m});
  j["high_point_measure"] = hp;
  return j.dump();
}

MomentRecord moment_record_from_json(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  MomentRecord r;
  r.T = j.at("T").get<double>();
  r.theta = j.at("theta").get<double>();
  r.beta = j.at("beta").get<double>();
  r.tau = j.at("tau").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.stratum = j.at("stratum").get<std::uint64_t>();
  r.integral = j.at("integral").get<double>();
  r.maximum = j.at("maximum").get<double>();
  r.grid_step = j.at("grid_step").get<double>();
  for (const auto& e : j.at("high_point_measure")) r.high_point_measure[e[0].get<double>()] = e[1].get<double>();
  return r;
}

std::string csv_header() { return "T,theta,beta,tau,integral,maximum,grid_step,seed"; }

std::string to_csv(const MomentRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu", r.T, r.theta, r.beta, r.tau,
                r.integral, r.maximum, r.grid_step, static_cast<unsigned long long>(r.seed));
  return buf;
}

}  // namespace zf
