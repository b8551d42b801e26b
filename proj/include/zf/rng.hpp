#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>

namespace zf {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: the i-th draw of stream (seed, stream) is a pure
// function of (seed, stream, i), so tasks can be split without coordination.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform()));
    double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Fills `out` with standard normals (Box-Muller, vectorised through Eigen).
  void fill_normal(Eigen::Ref<Eigen::ArrayXd> out) {
    const Eigen::Index n = out.size();
    const Eigen::Index half = (n + 1) / 2;
    Eigen::ArrayXd u1(half), u2(half);
    for (Eigen::Index i = 0; i < half; ++i) {
      u1[i] = uniform();
      u2[i] = uniform();
    }
    Eigen::ArrayXd r = (-2.0 * u1.log()).sqrt();
    Eigen::ArrayXd a = (2.0 * std::numbers::pi) * u2;
    out.head(n / 2) = r.head(n / 2) * a.head(n / 2).cos();
    out.segment(n / 2, half) = r * a.sin();
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace zf
