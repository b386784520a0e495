#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmod {

using cplx = std::complex<double>;
using i64 = std::int64_t;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Input outside the domain of an operation (bad discriminant, point on a cut, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure did not reach its requested accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int sgn(i64 x) noexcept { return (x > 0) - (x < 0); }
constexpr int sgn(double x) noexcept { return (x > 0.0) - (x < 0.0); }

/// Neumaier-compensated accumulator for complex sums.
class CompensatedSum {
 public:
  void add(cplx x) noexcept {
    add_part(re_, cre_, x.real());
    add_part(im_, cim_, x.imag());
  }
  void add(const CompensatedSum& other) noexcept {
    add(other.value());
  }
  [[nodiscard]] cplx value() const noexcept { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add_part(double& s, double& c, double x) noexcept {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  double re_ = 0.0, cre_ = 0.0, im_ = 0.0, cim_ = 0.0;
};

}  // namespace qmod
