#pragma once

namespace zf {

// Compensated (Neumaier) accumulator; Scalar may be real or std::complex.
template <typename Scalar>
class KahanSum {
 public:
  KahanSum() = default;
  explicit KahanSum(Scalar init) : sum_(init) {}

  KahanSum& operator+=(Scalar x) {
    Scalar t = sum_ + x;
    comp_ += correction(sum_, x, t);
    sum_ = t;
    return *this;
  }

  Scalar value() const { return sum_ + comp_; }

 private:
  template <typename S>
  static S correction(S s, S x, S t) {
    if constexpr (requires(S v) { v.imag(); }) {
      return S(correction(s.real(), x.real(), t.real()), correction(s.imag(), x.imag(), t.imag()));
    } else {
      S as = s < 0 ? -s : s;
      S ax = x < 0 ? -x : x;
      return as >= ax ? (s - t) + x : (x - t) + s;
    }
  }

  Scalar sum_{};
  Scalar comp_{};
};

}  // namespace zf
