#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "nctorus/lattice_algebra.hpp"

namespace nct {

/// Polynomial in the formal dilation variable r; entry d is the r^d coefficient.
using RPoly = std::vector<Complex>;

namespace detail {

inline void trim(RPoly& p) {
  while (!p.empty() && std::abs(p.back()) < TorusElement::kDropTolerance) p.pop_back();
}

inline bool is_zero(const RPoly& p) {
  return std::all_of(p.begin(), p.end(), [](Complex c) { return std::abs(c) < TorusElement::kDropTolerance; });
}

/// out += factor * x * y, truncated to degrees <= max_degree (negative = no cap).
inline void convolve_add(RPoly& out, const RPoly& x, const RPoly& y, Complex factor, std::int64_t max_degree) {
  if (x.empty() || y.empty()) return;
  std::size_t len = x.size() + y.size() - 1;
  if (max_degree >= 0) len = std::min<std::size_t>(len, static_cast<std::size_t>(max_degree) + 1);
  if (out.size() < len) out.resize(len);
  for (std::size_t i = 0; i < x.size() && i < len; ++i) {
    if (x[i] == Complex{}) continue;
    const Complex xi = factor * x[i];
    for (std::size_t j = 0; j < y.size() && i + j < len; ++j) out[i + j] += xi * y[j];
  }
}

}  // namespace detail

/// Element whose coefficients are polynomials in r: the exact carrier for x_r.
class GradedElement {
 public:
  using Coefficients = std::map<LatticeIndex, RPoly>;

  explicit GradedElement(ThetaParam theta) : theta_(std::move(theta)) {}

  GradedElement(ThetaParam theta, Coefficients coeffs) : theta_(std::move(theta)), coeffs_(std::move(coeffs)) {
    for (auto& [idx, poly] : coeffs_) detail::trim(poly);
    std::erase_if(coeffs_, [](const auto& kv) { return kv.second.empty(); });
  }

  /// Degree-0 embedding of a plain element.
  static GradedElement lift(const TorusElement& a) {
    Coefficients out;
    for (const auto& [idx, c] : a.coeffs()) out.emplace(idx, RPoly{c});
    return GradedElement(a.theta(), std::move(out));
  }

  [[nodiscard]] const ThetaParam& theta() const { return theta_; }
  [[nodiscard]] const Coefficients& coeffs() const { return coeffs_; }
  [[nodiscard]] bool empty() const { return coeffs_.empty(); }

  /// Smallest r-degree carrying a nonzero coefficient (-1 if empty).
  [[nodiscard]] std::int64_t min_degree() const {
    std::int64_t best = -1;
    for (const auto& [idx, poly] : coeffs_) {
      for (std::size_t d = 0; d < poly.size(); ++d) {
        if (std::abs(poly[d]) >= TorusElement::kDropTolerance) {
          if (best < 0 || static_cast<std::int64_t>(d) < best) best = static_cast<std::int64_t>(d);
          break;
        }
      }
    }
    return best;
  }

  /// Substitutes a numeric value for r.
  [[nodiscard]] TorusElement evaluate(double r) const {
    TorusElement::Coefficients out;
    for (const auto& [idx, poly] : coeffs_) {
      Complex acc{};
      for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * r + *it;
      out.emplace(idx, acc);
    }
    return TorusElement(theta_, std::move(out));
  }

 private:
  ThetaParam theta_;
  Coefficients coeffs_;
};

/// How the dilation assigns r-degrees to modes.
struct DilationMode {
  enum class Kind { kGeneral, kDiagonal };
  Kind kind = Kind::kGeneral;
  std::int64_t slope = 0;

  static DilationMode general() { return {Kind::kGeneral, 0}; }
  static DilationMode diagonal(std::int64_t s) {
    if (s == 0) throw PreconditionError("diagonal dilation needs a nonzero slope");
    return {Kind::kDiagonal, s};
  }
};

/// x_r = P_r(a) - 1: mode (m,n) is scaled by r^{|m|+|n|}; on the diagonal class
/// this is r^{(1+|s|)|n|}. Requires tau(a) = 1.
inline GradedElement dilate(const TorusElement& a, DilationMode mode = DilationMode::general()) {
  if (std::abs(trace(a) - Complex{1.0}) > 1e-12) {
    throw NormalizationError("dilate: element must satisfy tau(a) = 1; divide by tau(a) first");
  }
  GradedElement::Coefficients out;
  for (const auto& [idx, c] : a.coeffs()) {
    if (idx.is_zero()) continue;
    std::int64_t degree = idx.weight();
    if (mode.kind == DilationMode::Kind::kDiagonal) {
      if (idx.n != mode.slope * idx.m) {
        throw PreconditionError("dilate: element is not in the diagonal class of the given slope");
      }
      degree = (1 + std::abs(mode.slope)) * std::abs(idx.m);
    }
    RPoly poly(static_cast<std::size_t>(degree) + 1);
    poly[static_cast<std::size_t>(degree)] = c;
    out.emplace(idx, std::move(poly));
  }
  return GradedElement(a.theta(), std::move(out));
}

/// Twisted product with r-polynomials convolved; degrees above max_degree are
/// discarded when max_degree >= 0.
inline GradedElement multiply_graded(const GradedElement& x, const GradedElement& y, std::int64_t max_degree = -1) {
  if (!x.theta().same_angle(y.theta())) {
    throw IncompatibleElements("multiply_graded: operands carry different theta values");
  }
  const double theta = x.theta().value();
  GradedElement::Coefficients out;
  for (const auto& [ix, px] : x.coeffs()) {
    for (const auto& [iy, py] : y.coeffs()) {
      detail::convolve_add(out[ix + iy], px, py, turn_phase(-iy.m * ix.n, theta), max_degree);
    }
  }
  return GradedElement(x.theta(), std::move(out));
}

inline GradedElement power_graded(const GradedElement& x, std::int64_t k, std::int64_t max_degree = -1) {
  if (k < 1) throw PreconditionError("power_graded: exponent must be >= 1");
  GradedElement acc = x;
  for (std::int64_t i = 1; i < k; ++i) acc = multiply_graded(acc, x, max_degree);
  return acc;
}

/// tau of a graded element: the r-polynomial at mode (0,0).
inline RPoly trace_graded(const GradedElement& x) {
  const auto it = x.coeffs().find({0, 0});
  return it == x.coeffs().end() ? RPoly{} : it->second;
}

}  // namespace nct
