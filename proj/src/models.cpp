#include "zf/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "json.hpp"

#include "zf/errors.hpp"
#include "zf/kahan.hpp"
#include "zf/parallel.hpp"
#include "zf/rng.hpp"
#include "zf/stats.hpp"

namespace zf {

namespace {

void check_theta(double theta) {
  if (!(theta > -1.0)) throw DomainError("theta must exceed -1");
}

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct MeanSe {
  double mean = 0;
  double se = 0;
};

MeanSe mean_se(const std::vector<double>& v) {
  KahanSum<double> s;
  for (double x : v) s += x;
  const double n = static_cast<double>(v.size());
  MeanSe out;
  out.mean = s.value() / n;
  if (v.size() > 1) {
    KahanSum<double> q;
    for (double x : v) q += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(q.value() / (n - 1) / n);
  }
  return out;
}

// Level-by-level state of the nodes of one piece of the tree.
struct Nodes {
  Eigen::ArrayXd value;
  Eigen::ArrayXd block;  // running sum inside the current block
  Eigen::ArrayXd alive;  // 1 while every finished retained block cleared its threshold
};

// Walks a realization of the tree. Levels below `shared` do not branch.
// Pieces of at most 2^16 leaves are handed to `leaf_chunk(nodes, top_index)`.
class TreeWalker {
 public:
  TreeWalker(const CremConfig& cfg, std::vector<double> thresholds_by_level = {}, std::vector<char> block_ends = {})
      : n_(cfg.n_levels),
        b_(cfg.branching),
        shared_(cfg.n_levels - cfg.depth()),
        roots_(static_cast<Eigen::Index>(cfg.trees())),
        sd_(std::sqrt(cfg.increment_variance())),
        check_(std::move(thresholds_by_level)),
        ends_(std::move(block_ends)) {
    // Split so that the subtrees below `split_` hold at most 2^16 leaves and
    // the first branching level is resolved in the top part.
    split_ = std::min(n_, shared_ + 1);
    while (std::pow(b_, n_ - split_) > 65536.0) ++split_;
  }

  int split() const { return split_; }

  void run(CounterRng& rng, const std::function<void(const Nodes&, Eigen::Index)>& leaf_chunk) const {
    Nodes top;
    top.value = Eigen::ArrayXd::Zero(roots_);
    top.block = Eigen::ArrayXd::Zero(roots_);
    top.alive = Eigen::ArrayXd::Ones(roots_);
    for (int level = 0; level < split_; ++level) step(top, level, rng);
    for (Eigen::Index i = 0; i < top.value.size(); ++i) {
      Nodes sub;
      sub.value = Eigen::ArrayXd::Constant(1, top.value[i]);
      sub.block = Eigen::ArrayXd::Constant(1, top.block[i]);
      sub.alive = Eigen::ArrayXd::Constant(1, top.alive[i]);
      for (int level = split_; level < n_; ++level) step(sub, level, rng);
      leaf_chunk(sub, i);
    }
  }

 private:
  void step(Nodes& s, int level, CounterRng& rng) const {
    if (level >= shared_) {
      const Eigen::Index m = s.value.size();
      Nodes next;
      next.value.resize(m * b_);
      next.block.resize(m * b_);
      next.alive.resize(m * b_);
      for (Eigen::Index i = 0; i < m; ++i) {
        next.value.segment(i * b_, b_).setConstant(s.value[i]);
        next.block.segment(i * b_, b_).setConstant(s.block[i]);
        next.alive.segment(i * b_, b_).setConstant(s.alive[i]);
      }
      s = std::move(next);
    }
    Eigen::ArrayXd z(s.value.size());
    rng.fill_normal(z);
    z *= sd_;
    s.value += z;
    s.block += z;
    if (!check_.empty() && !std::isnan(check_[level])) {
      s.alive *= (s.block > check_[level]).cast<double>();
    }
    if (!check_.empty() && block_end(level)) s.block.setZero();
  }

  bool block_end(int level) const { return ends_[level + 1] != 0; }

  int n_, b_, shared_;
  Eigen::Index roots_;
  double sd_;
  std::vector<double> check_;  // threshold tested after this level, NaN if none
  std::vector<char> ends_;     // ends_[l] set when a block starts at level l
  int split_ = 0;
};

std::vector<int> block_bounds(int n_levels, int K) {
  std::vector<int> bounds(K + 1);
  for (int j = 0; j <= K; ++j) bounds[j] = static_cast<int>((static_cast<long>(j) * n_levels) / K);
  return bounds;
}

}  // namespace

double predict_m(double theta) {
  check_theta(theta);
  return theta <= 0 ? 1.0 + theta : std::sqrt(1.0 + theta);
}

double predict_beta_c(double theta) {
  check_theta(theta);
  return theta <= 0 ? 2.0 : 2.0 * std::sqrt(1.0 + theta);
}

double predict_r(double theta) {
  check_theta(theta);
  return theta <= 0 ? 0.75 : 0.25 / std::sqrt(1.0 + theta);
}

double predict_f(double theta, double beta) {
  check_theta(theta);
  if (!(beta > 0)) throw DomainError("predict_f: beta must be positive");
  const double a = 1.0 + std::min(theta, 0.0);
  if (beta <= predict_beta_c(theta)) return beta * beta * a / 4.0 + theta;
  return beta * predict_m(theta) - 1.0;
}

double predict_E(double theta, double gamma) {
  check_theta(theta);
  const double m = predict_m(theta);
  if (!(gamma >= 0 && gamma <= m)) throw DomainError("predict_E: gamma must lie in [0, m(theta)]");
  return theta - gamma * gamma / (1.0 + std::min(theta, 0.0));
}

ExponentPrediction predict(double theta) {
  return {theta, predict_m(theta), predict_beta_c(theta), predict_r(theta)};
}

EulerProductField sample_euler_product(const PrimeTable& table, double T, double cutoff, std::uint64_t seed,
                                       std::uint64_t realization) {
  if (!(cutoff >= 2)) throw DomainError("sample_euler_product: cutoff must be at least 2");
  table.require(cutoff);
  const auto [first, last] = table.range(1.0, cutoff);
  EulerProductField f;
  f.T = T;
  f.cutoff = cutoff;
  f.seed = seed;
  const Eigen::Index n = static_cast<Eigen::Index>(last - first);
  f.logs.resize(n);
  f.weights.resize(n);
  CounterRng rng(seed, realization);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lp = table.logs()[first + k];
    f.logs[k] = lp;
    f.weights[k] = std::polar(std::exp(-0.5 * lp), 2.0 * std::numbers::pi * rng.uniform());
  }
  return f;
}

double euler_eval(const EulerProductField& field, double h) {
  KahanSum<double> acc;
  for (Eigen::Index k = 0; k < field.logs.size(); ++k) {
    acc += (field.weights[k] * std::polar(1.0, -h * field.logs[k])).real();
  }
  return acc.value();
}

Eigen::VectorXd euler_eval(const EulerProductField& field, const Eigen::VectorXd& h) {
  Eigen::VectorXd out(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) out[i] = euler_eval(field, h[i]);
  return out;
}

double CremConfig::increment_variance() const { return std::log(static_cast<double>(branching)) / 2.0; }
double CremConfig::L() const { return n_levels * std::log(static_cast<double>(branching)); }

int CremConfig::depth() const {
  if (theta > 0) return n_levels;
  return static_cast<int>(std::floor((1.0 + theta) * n_levels + 1e-9));
}

std::uint64_t CremConfig::trees() const {
  if (theta <= 0) return 1;
  return static_cast<std::uint64_t>(std::max(1.0, std::round(std::exp(theta * L()))));
}

double CremConfig::leaves() const { return std::pow(static_cast<double>(branching), depth()) * trees(); }

namespace {

void check_crem(const CremConfig& cfg) {
  check_theta(cfg.theta);
  if (cfg.branching < 2) throw DomainError("crem: branching must be at least 2");
  if (cfg.n_levels < 1) throw DomainError("crem: n_levels must be positive");
  if (cfg.depth() < 1) throw DomainError("crem: tree depth is zero for this theta");
  if (cfg.leaves() > kLeafBudget) {
    throw BudgetError("crem: " + std::to_string(cfg.leaves()) + " leaves exceed the 2^26 budget");
  }
}

}  // namespace

std::vector<Realization> crem_realizations(const CremConfig& cfg, const std::vector<double>& betas,
                                           std::uint64_t first, long count) {
  check_crem(cfg);
  if (count < 0) throw DomainError("crem_realizations: negative count");
  for (double b : betas) {
    if (!(b >= 0)) throw DomainError("simulate_crem: beta must be nonnegative");
  }
  const TreeWalker walker(cfg);
  const double L = cfg.L();
  const std::size_t nb = betas.size();
  std::vector<Realization> out(count);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    CounterRng rng(cfg.seed, first + i);
    std::vector<double> log_sum(nb, -INFINITY);
    double best = -INFINITY;
    walker.run(rng, [&](const Nodes& s, Eigen::Index) {
      const double cmax = s.value.maxCoeff();
      best = std::max(best, cmax);
      const Eigen::ArrayXd shifted = s.value - cmax;
      for (std::size_t k = 0; k < nb; ++k) {
        log_sum[k] = log_add(log_sum[k], betas[k] * cmax + std::log((betas[k] * shifted).exp().sum()));
      }
    });
    out[i].free_energy.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) out[i].free_energy[k] = (log_sum[k] - L) / L;
    out[i].max_normalized = best / L;
  });
  return out;
}

std::vector<CremRecord> aggregate(const std::vector<double>& betas, const std::vector<Realization>& runs) {
  if (runs.empty()) throw DomainError("aggregate: no realizations");
  std::vector<double> maxima;
  for (const auto& r : runs) maxima.push_back(r.max_normalized);
  const MeanSe mx = mean_se(maxima);
  std::vector<CremRecord> out;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    std::vector<double> fe;
    for (const auto& r : runs) fe.push_back(r.free_energy.at(k));
    const MeanSe f = mean_se(fe);
    out.push_back({betas[k], f.mean, f.se, mx.mean, mx.se, static_cast<long>(runs.size())});
  }
  return out;
}

std::vector<CremRecord> simulate_crem(const CremConfig& cfg, const std::vector<double>& betas, long n_realizations) {
  if (n_realizations < 1) throw DomainError("simulate_crem: need at least one realization");
  return aggregate(betas, crem_realizations(cfg, betas, 0, n_realizations));
}

std::vector<Realization> euler_realizations(const PrimeTable& table, const EulerConfig& cfg,
                                            const std::vector<double>& betas, std::uint64_t first, long count) {
  check_theta(cfg.theta);
  if (count < 0) throw DomainError("euler_realizations: negative count");
  const WindowGrid g = window_grid(cfg.T, cfg.theta, kGridRefine);
  const double L = std::log(std::log(cfg.T));
  const std::size_t nb = betas.size();
  std::vector<Realization> out(count);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    const EulerProductField f = sample_euler_product(table, cfg.T, cfg.cutoff, cfg.seed, first + i);
    const Eigen::ArrayXd x = euler_eval(f, g.h).array();
    const double top = x.maxCoeff();
    Eigen::ArrayXd w = Eigen::ArrayXd::Constant(x.size(), g.step);
    w[0] *= 0.5;
    w[w.size() - 1] *= 0.5;
    out[i].free_energy.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      out[i].free_energy[k] = (betas[k] * top + std::log((w * (betas[k] * (x - top)).exp()).sum())) / L;
    }
    out[i].max_normalized = top / L;
  });
  return out;
}

std::vector<CremRecord> simulate_euler(const PrimeTable& table, const EulerConfig& cfg,
                                       const std::vector<double>& betas, long n_realizations) {
  if (n_realizations < 1) throw DomainError("simulate_euler: need at least one realization");
  return aggregate(betas, euler_realizations(table, cfg, betas, 0, n_realizations));
}

int pz_first_block(double theta, int K) {
  check_theta(theta);
  return theta >= 0 ? 1 : static_cast<int>(std::floor(K * std::abs(theta))) + 1;
}

double pz_threshold(double theta, double gamma, double L, int K, double slack) {
  const double a = 1.0 + std::min(theta, 0.0);
  return (1.0 + slack / (a * K)) * gamma * L / (a * K);
}

namespace {

void check_pz(double theta, double gamma, int K, long n) {
  if (K < 4) throw DomainError("paley_zygmund_count: K must be at least 4");
  if (!(gamma >= 0 && gamma < predict_m(theta))) throw DomainError("paley_zygmund_count: need 0 <= gamma < m(theta)");
  if (pz_first_block(theta, K) > K - 3) throw DomainError("paley_zygmund_count: retained block range is empty");
  if (n < 2) throw DomainError("paley_zygmund_count: need at least two realizations");
}

PzRecord summarize(const std::vector<double>& N, double lambda, double full_length) {
  PzRecord rec;
  rec.realizations = static_cast<long>(N.size());
  rec.full_length = full_length;
  KahanSum<double> s1, s2;
  for (double x : N) {
    s1 += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(N.size());
  rec.EN = s1.value() / n;
  rec.EN2 = s2.value() / n;
  rec.ratio = rec.EN > 0 ? rec.EN2 / (rec.EN * rec.EN) : INFINITY;
  long hits = 0;
  for (double x : N) hits += (rec.EN > 0 && x >= lambda * rec.EN) ? 1 : 0;
  rec.success_rate = static_cast<double>(hits) / n;
  rec.pz_lower_bound = rec.EN > 0 ? (1 - lambda) * (1 - lambda) / rec.ratio : 0.0;
  return rec;
}

}  // namespace

PzRecord paley_zygmund_count(const CremConfig& cfg, double gamma, long n_realizations, const PzOptions& opt) {
  check_crem(cfg);
  check_pz(cfg.theta, gamma, opt.K, n_realizations);
  if (opt.K > cfg.n_levels) throw DomainError("paley_zygmund_count: K exceeds the number of levels");
  const int J = pz_first_block(cfg.theta, opt.K);
  const std::vector<int> bounds = block_bounds(cfg.n_levels, opt.K);
  const double x = pz_threshold(cfg.theta, gamma, cfg.L(), opt.K, opt.slack);
  std::vector<double> check(cfg.n_levels, std::nan(""));
  for (int j = J; j <= opt.K - 3; ++j) check[bounds[j + 1] - 1] = x;
  std::vector<char> ends(cfg.n_levels + 1, 0);
  for (int j = 1; j <= opt.K; ++j) ends[bounds[j]] = 1;
  const TreeWalker walker(cfg, check, ends);

  // Groups: the subtrees below the first branching level. Pairs from
  // different groups share no retained block.
  const int shared = cfg.n_levels - cfg.depth();
  const bool decoupled = shared <= bounds[J];
  const double groups = static_cast<double>(cfg.trees()) * cfg.branching;
  const double top_nodes = static_cast<double>(cfg.trees()) * std::pow(cfg.branching, walker.split() - shared);
  const Eigen::Index per_group = static_cast<Eigen::Index>(std::llround(top_nodes / groups));

  const double weight = std::exp(-cfg.L());
  std::vector<double> N(n_realizations), pair(n_realizations), single(n_realizations);
  parallel_for(static_cast<std::size_t>(n_realizations), [&](std::size_t r) {
    CounterRng rng(cfg.seed, r);
    std::vector<double> count(static_cast<std::size_t>(groups), 0.0);
    walker.run(rng, [&](const Nodes& s, Eigen::Index top) { count[top / per_group] += s.alive.sum(); });
    double s1 = 0, s2 = 0;
    for (double c : count) {
      s1 += c;
      s2 += c * c;
    }
    N[r] = weight * s1;
    pair[r] = (s1 * s1 - s2) / (groups * (groups - 1));
    single[r] = s1 / groups;
  });
  PzRecord rec = summarize(N, opt.lambda, weight * cfg.leaves());
  const double mean_single = mean_se(single).mean;
  rec.two_point_ratio = decoupled && mean_single > 0 ? mean_se(pair).mean / (mean_single * mean_single) : std::nan("");
  return rec;
}

PzRecord paley_zygmund_count(const PrimeTable& table, double T, double theta, double gamma, long n_shifts,
                             std::uint64_t seed, const PzOptions& opt) {
  check_pz(theta, gamma, opt.K, n_shifts);
  const IncrementSystem sys = build_increments(table, T, opt.K);
  const int J = pz_first_block(theta, opt.K);
  const double x = pz_threshold(theta, gamma, std::log(std::log(T)), opt.K, opt.slack);
  const WindowGrid g = window_grid(T, theta, kGridRefine);
  const Eigen::Index m = g.h.size();
  std::vector<double> N(n_shifts);
  parallel_for(static_cast<std::size_t>(n_shifts), [&](std::size_t i) {
    const ShiftSample s = sample_shift(T, n_shifts, seed, i);
    Eigen::ArrayXd alive = Eigen::ArrayXd::Ones(m);
    for (int j = J; j <= opt.K - 3; ++j) {
      const Eigen::ArrayXd p = evaluate_grid(sys.increments[j], sys.sigma0, s.tau, g.h).real().array();
      alive *= (p > x).cast<double>();
    }
    alive[0] *= 0.5;
    alive[m - 1] *= 0.5;
    N[i] = g.step * alive.sum();
  });
  PzRecord rec = summarize(N, opt.lambda, 2.0 * g.half_width);
  rec.two_point_ratio = std::nan("");
  return rec;
}

TailRecord gaussian_tail_check(const PrimeTable& table, double T, double x, double V, long n, std::uint64_t seed) {
  if (!(x >= 2)) throw DomainError("gaussian_tail_check: cutoff must be at least 2");
  if (!(T > x)) throw DomainError("gaussian_tail_check: T must exceed the cutoff");
  if (n < 1) throw DomainError("gaussian_tail_check: n must be positive");
  table.require(x);
  const auto [first, last] = table.range(1.0, x);
  KahanSum<double> var;
  for (std::size_t k = last; k-- > first;) var += 0.5 / static_cast<double>(table.primes()[k]);
  TailRecord rec;
  rec.sigma = std::sqrt(var.value());
  const long k_max = static_cast<long>(std::floor(std::log(T) / std::log(x)));
  if (V > 2.0 * k_max * var.value()) throw DomainError("gaussian_tail_check: V outside the moment validity band");

  const Eigen::VectorXcd samples = prime_sum_samples(table, x, T, n, seed);
  long hits = 0;
  for (Eigen::Index i = 0; i < samples.size(); ++i) hits += samples[i].real() > V ? 1 : 0;
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  rec.empirical_tail = p;
  rec.standard_error = std::sqrt(p * (1 - p) / static_cast<double>(n));
  rec.gaussian_tail = 0.5 * std::erfc(V / rec.sigma / std::numbers::sqrt2);
  rec.bound = std::exp(-V * V / (2.0 * var.value()));
  rec.fitted_constant = p / rec.bound;
  return rec;
}

std::string to_jsonl(const CremConfig& cfg, const CremRecord& r) {
  nlohmann::json j;
  j["kind"] = "crem";
  j["theta"] = cfg.theta;
  j["n_levels"] = cfg.n_levels;
  j["b"] = cfg.branching;
  j["beta"] = r.beta;
  j["free_energy"] = r.free_energy;
  j["max_normalized"] = r.max_normalized;
  j["free_energy_se"] = r.free_energy_se;
  j["max_normalized_se"] = r.max_normalized_se;
  j["realizations"] = r.realizations;
  j["seed"] = cfg.seed;
  return j.dump();
}

std::string to_jsonl(const EulerConfig& cfg, const CremRecord& r) {
  nlohmann::json j;
  j["kind"] = "euler_product";
  j["theta"] = cfg.theta;
  j["T"] = cfg.T;
  j["cutoff"] = cfg.cutoff;
  j["beta"] = r.beta;
  j["free_energy"] = r.free_energy;
  j["max_normalized"] = r.max_normalized;
  j["free_energy_se"] = r.free_energy_se;
  j["max_normalized_se"] = r.max_normalized_se;
  j["realizations"] = r.realizations;
  j["seed"] = cfg.seed;
  return j.dump();
}

CremRecord crem_record_from_json(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  CremRecord r;
  r.beta = j.at("beta").get<double>();
  r.free_energy = j.at("free_energy").get<double>();
  r.max_normalized = j.at("max_normalized").get<double>();
  r.realizations = j.at("realizations").get<long>();
  if (j.contains("free_energy_se")) r.free_energy_se = j["free_energy_se"].get<double>();
  if (j.contains("max_normalized_se")) r.max_normalized_se = j["max_normalized_se"].get<double>();
  return r;
}

}  // namespace zf
