#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "nctorus/errors.hpp"

namespace nct {

using Complex = std::complex<double>;

struct Rational {
  std::int64_t p = 0;
  std::int64_t q = 1;

  [[nodiscard]] double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Continued-fraction convergents of the double `x` (taken as the exact binary
/// rational it stores), in increasing denominator, stopping before q > max_q.
inline std::vector<Rational> convergents(double x, std::int64_t max_q = 100000) {
  if (!(x > 0.0 && x < 1.0)) {
    throw PreconditionError("convergents: value must lie in (0,1)");
  }
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  if (53 - exponent > 120) {
    throw PreconditionError("convergents: value too small for exact expansion");
  }
  // Exact Euclid on num / den with den a power of two.
  __int128 num = static_cast<__int128>(std::ldexp(mantissa, 53));
  __int128 den = static_cast<__int128>(1) << (53 - exponent);

  std::vector<Rational> out;
  __int128 h_prev = 1, h_prev2 = 0;
  __int128 k_prev = 0, k_prev2 = 1;
  while (den != 0) {
    const __int128 a = num / den;
    const __int128 rem = num - a * den;
    const __int128 h = a * h_prev + h_prev2;
    const __int128 k = a * k_prev + k_prev2;
    if (k > max_q) break;
    out.push_back({static_cast<std::int64_t>(h), static_cast<std::int64_t>(k)});
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    num = den;
    den = rem;
  }
  return out;
}

/// The deformation parameter theta in (0,1) together with an optional rational
/// approximation p/q used by the finite-dimensional representations.
class ThetaParam {
 public:
  static constexpr std::int64_t kDefaultConvergentCap = 2000;

  explicit ThetaParam(double value, std::optional<Rational> rational = std::nullopt)
      : value_(value), rational_(rational) {
    if (!std::isfinite(value) || !(value > 0.0 && value < 1.0)) {
      throw PreconditionError("theta must lie in the open interval (0,1)");
    }
    if (rational_) {
      const auto [p, q] = *rational_;
      if (q < 1 || p < 0 || std::gcd(p, q) != 1) {
        throw PreconditionError("rational approximation must be a reduced fraction with q >= 1");
      }
      const double err = std::abs(value_ - rational_->value());
      const double qd = static_cast<double>(q);
      if (err > 1.0 / (qd * qd) * (1.0 + 1e-12)) {
        throw PreconditionError("rational approximation violates |theta - p/q| <= 1/q^2");
      }
    }
  }

  /// Largest continued-fraction convergent of `value` with q <= q_cap attached.
  static ThetaParam with_convergent(double value, std::int64_t q_cap = kDefaultConvergentCap) {
    const ThetaParam bare(value);
    const auto cs = convergents(value, q_cap);
    if (cs.empty()) return bare;
    return ThetaParam(value, cs.back());
  }

  /// (sqrt(5) - 1) / 2.
  static ThetaParam golden(std::int64_t q_cap = kDefaultConvergentCap) {
    return with_convergent((std::sqrt(5.0) - 1.0) / 2.0, q_cap);
  }

  [[nodiscard]] double value() const { return value_; }
  [[nodiscard]] const std::optional<Rational>& rational() const { return rational_; }

  [[nodiscard]] ThetaParam with_rational(std::optional<Rational> r) const { return ThetaParam(value_, r); }

  /// Compatibility is decided by the angle alone.
  [[nodiscard]] bool same_angle(const ThetaParam& other) const { return value_ == other.value_; }

  friend bool operator==(const ThetaParam&, const ThetaParam&) = default;

 private:
  double value_;
  std::optional<Rational> rational_;
};

/// e^{2 pi i k theta}; k*theta is reduced modulo 1 in extended precision first.
inline Complex turn_phase(std::int64_t k, double theta) {
  long double x = static_cast<long double>(k) * static_cast<long double>(theta);
  x -= std::nearbyint(x);
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(x));
}

/// e^{i pi k theta}, reduced modulo 2.
inline Complex half_turn_phase(std::int64_t k, double theta) {
  long double x = static_cast<long double>(k) * static_cast<long double>(theta);
  x -= 2.0L * std::nearbyint(x / 2.0L);
  return std::polar(1.0, std::numbers::pi * static_cast<double>(x));
}

}  // namespace nct
