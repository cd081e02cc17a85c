#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <utility>

#include "nctorus/errors.hpp"
#include "nctorus/theta.hpp"

namespace nct {

/// Fourier mode (m, n) of the monomial U^m V^n.
struct LatticeIndex {
  std::int64_t m = 0;
  std::int64_t n = 0;

  auto operator<=>(const LatticeIndex&) const = default;

  LatticeIndex operator-() const { return {-m, -n}; }
  friend LatticeIndex operator+(LatticeIndex a, LatticeIndex b) { return {a.m + b.m, a.n + b.n}; }
  friend LatticeIndex operator-(LatticeIndex a, LatticeIndex b) { return {a.m - b.m, a.n - b.n}; }

  /// |m| + |n|, the dilation degree of the mode.
  [[nodiscard]] std::int64_t weight() const { return std::abs(m) + std::abs(n); }
  [[nodiscard]] bool is_zero() const { return m == 0 && n == 0; }
};

/// Finitely supported element sum a_{m,n} U^m V^n of the rotation algebra.
/// Coefficients below kDropTolerance are never stored.
class TorusElement {
 public:
  using Coefficients = std::map<LatticeIndex, Complex>;
  static constexpr double kDropTolerance = 1e-15;

  explicit TorusElement(ThetaParam theta) : theta_(std::move(theta)) {}

  TorusElement(ThetaParam theta, Coefficients coeffs) : theta_(std::move(theta)), coeffs_(std::move(coeffs)) {
    std::erase_if(coeffs_, [](const auto& kv) { return std::abs(kv.second) < kDropTolerance; });
  }

  static TorusElement identity(ThetaParam theta) { return scalar(std::move(theta), 1.0); }

  static TorusElement scalar(ThetaParam theta, Complex c) { return monomial(std::move(theta), {0, 0}, c); }

  static TorusElement monomial(ThetaParam theta, LatticeIndex idx, Complex c = 1.0) {
    return TorusElement(std::move(theta), Coefficients{{idx, c}});
  }

  [[nodiscard]] const ThetaParam& theta() const { return theta_; }
  [[nodiscard]] const Coefficients& coeffs() const { return coeffs_; }

  [[nodiscard]] Complex coeff(LatticeIndex idx) const {
    const auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? Complex{} : it->second;
  }

  [[nodiscard]] bool empty() const { return coeffs_.empty(); }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }

  /// max(|m|, |n|) over the support; 0 for the empty element.
  [[nodiscard]] std::int64_t support_radius() const {
    std::int64_t r = 0;
    for (const auto& [idx, c] : coeffs_) r = std::max({r, std::abs(idx.m), std::abs(idx.n)});
    return r;
  }

  /// Same coefficients, different theta metadata (used to attach convergents).
  [[nodiscard]] TorusElement with_theta(ThetaParam theta) const { return TorusElement(std::move(theta), coeffs_); }

  friend bool operator==(const TorusElement&, const TorusElement&) = default;

 private:
  ThetaParam theta_;
  Coefficients coeffs_;
};

namespace detail {

inline void require_compatible(const TorusElement& a, const TorusElement& b, const char* op) {
  if (!a.theta().same_angle(b.theta())) {
    throw IncompatibleElements(std::string(op) + ": operands carry different theta values");
  }
}

}  // namespace detail

inline TorusElement add(const TorusElement& a, const TorusElement& b) {
  detail::require_compatible(a, b, "add");
  auto out = a.coeffs();
  for (const auto& [idx, c] : b.coeffs()) out[idx] += c;
  return TorusElement(a.theta(), std::move(out));
}

inline TorusElement scale(const TorusElement& a, Complex factor) {
  auto out = a.coeffs();
  for (auto& [idx, c] : out) c *= factor;
  return TorusElement(a.theta(), std::move(out));
}

inline TorusElement subtract(const TorusElement& a, const TorusElement& b) { return add(a, scale(b, -1.0)); }

/// Twisted convolution: U^m V^n * U^p V^q = e^{-2 pi i p n theta} U^{m+p} V^{n+q}.
inline TorusElement multiply(const TorusElement& a, const TorusElement& b) {
  detail::require_compatible(a, b, "multiply");
  const double theta = a.theta().value();
  TorusElement::Coefficients out;
  for (const auto& [ia, ca] : a.coeffs()) {
    for (const auto& [ib, cb] : b.coeffs()) {
      out[ia + ib] += ca * cb * turn_phase(-ib.m * ia.n, theta);
    }
  }
  return TorusElement(a.theta(), std::move(out));
}

/// (a*)_{m,n} = conj(a_{-m,-n}) e^{-2 pi i m n theta}.
inline TorusElement adjoint(const TorusElement& a) {
  const double theta = a.theta().value();
  TorusElement::Coefficients out;
  for (const auto& [idx, c] : a.coeffs()) {
    const LatticeIndex target = -idx;
    out[target] = std::conj(c) * turn_phase(-target.m * target.n, theta);
  }
  return TorusElement(a.theta(), std::move(out));
}

/// Largest violation of a_{m,n} = conj(a_{-m,-n}) e^{-2 pi i m n theta}.
inline double self_adjoint_residual(const TorusElement& a) {
  const double theta = a.theta().value();
  double worst = 0.0;
  auto check = [&](LatticeIndex idx) {
    const Complex lhs = a.coeff(idx);
    const Complex rhs = std::conj(a.coeff(-idx)) * turn_phase(-idx.m * idx.n, theta);
    worst = std::max(worst, std::abs(lhs - rhs));
  };
  for (const auto& [idx, c] : a.coeffs()) {
    check(idx);
    check(-idx);
  }
  return worst;
}

inline bool is_self_adjoint(const TorusElement& a, double tol) {
  if (tol < 0.0) throw PreconditionError("is_self_adjoint: tolerance must be nonnegative");
  return self_adjoint_residual(a) <= tol;
}

/// tau(a) = a_{0,0}.
inline Complex trace(const TorusElement& a) { return a.coeff({0, 0}); }

inline double l2_norm_squared(const TorusElement& a) {
  double s = 0.0;
  for (const auto& [idx, c] : a.coeffs()) s += std::norm(c);
  return s;
}

inline double l2_norm(const TorusElement& a) { return std::sqrt(l2_norm_squared(a)); }

/// Sum of |a_{m,n}| over the support.
inline double l1_norm(const TorusElement& a) {
  double s = 0.0;
  for (const auto& [idx, c] : a.coeffs()) s += std::abs(c);
  return s;
}

/// sum (|m| + |n|) |a_{m,n}|^2.
inline double dirichlet_weight(const TorusElement& a) {
  double s = 0.0;
  for (const auto& [idx, c] : a.coeffs()) s += static_cast<double>(idx.weight()) * std::norm(c);
  return s;
}

/// Entrywise product of coefficients.
inline TorusElement hadamard(const TorusElement& a, const TorusElement& b) {
  detail::require_compatible(a, b, "hadamard");
  TorusElement::Coefficients out;
  for (const auto& [idx, c] : a.coeffs()) {
    const Complex other = b.coeff(idx);
    if (other != Complex{}) out[idx] = c * other;
  }
  return TorusElement(a.theta(), std::move(out));
}

/// Keeps the modes with |m| <= j and |n| <= j.
inline TorusElement truncate(const TorusElement& a, std::int64_t j) {
  if (j < 0) throw PreconditionError("truncate: box size must be nonnegative");
  TorusElement::Coefficients out;
  for (const auto& [idx, c] : a.coeffs()) {
    if (std::abs(idx.m) <= j && std::abs(idx.n) <= j) out.emplace(idx, c);
  }
  return TorusElement(a.theta(), std::move(out));
}

// ---------------------------------------------------------------------------
// Diagonal class  sum a_n U^n V^{s n}

class DiagonalElement {
 public:
  using Coefficients = std::map<std::int64_t, Complex>;

  DiagonalElement(std::int64_t slope, Coefficients coeffs, ThetaParam theta)
      : slope_(slope), coeffs_(std::move(coeffs)), theta_(std::move(theta)) {
    if (slope_ == 0) throw PreconditionError("diagonal element: slope must be nonzero");
    std::erase_if(coeffs_, [](const auto& kv) { return std::abs(kv.second) < TorusElement::kDropTolerance; });
  }

  [[nodiscard]] std::int64_t slope() const { return slope_; }
  [[nodiscard]] const Coefficients& coeffs() const { return coeffs_; }
  [[nodiscard]] const ThetaParam& theta() const { return theta_; }

  [[nodiscard]] Complex coeff(std::int64_t n) const {
    const auto it = coeffs_.find(n);
    return it == coeffs_.end() ? Complex{} : it->second;
  }

  /// max |n| over the support.
  [[nodiscard]] std::int64_t support_radius() const {
    std::int64_t r = 0;
    for (const auto& [n, c] : coeffs_) r = std::max(r, std::abs(n));
    return r;
  }

  [[nodiscard]] TorusElement to_torus() const {
    TorusElement::Coefficients out;
    for (const auto& [n, c] : coeffs_) out.emplace(LatticeIndex{n, slope_ * n}, c);
    return TorusElement(theta_, std::move(out));
  }

  /// Restriction of `a` to the diagonal class of slope s; throws if `a` has
  /// support off the line n = s m.
  static DiagonalElement from_torus(const TorusElement& a, std::int64_t slope) {
    if (slope == 0) throw PreconditionError("diagonal element: slope must be nonzero");
    Coefficients out;
    for (const auto& [idx, c] : a.coeffs()) {
      if (idx.n != slope * idx.m) {
        throw PreconditionError("element does not lie in the diagonal class of the requested slope");
      }
      out.emplace(idx.m, c);
    }
    return DiagonalElement(slope, std::move(out), a.theta());
  }

 private:
  std::int64_t slope_;
  Coefficients coeffs_;
  ThetaParam theta_;
};

/// Slope s such that every mode of `a` lies on n = s m, if one exists.
/// A scalar element reports slope 1.
inline std::optional<std::int64_t> detect_slope(const TorusElement& a) {
  std::optional<std::int64_t> slope;
  for (const auto& [idx, c] : a.coeffs()) {
    if (idx.is_zero()) continue;
    if (idx.m == 0 || idx.n % idx.m != 0) return std::nullopt;
    const std::int64_t s = idx.n / idx.m;
    if (s == 0) return std::nullopt;
    if (slope && *slope != s) return std::nullopt;
    slope = s;
  }
  return slope.value_or(1);
}

/// sum (1 + |s|) |n| |a_n|^2.
inline double dirichlet_weight(const DiagonalElement& a) {
  double s = 0.0;
  const double factor = 1.0 + static_cast<double>(std::abs(a.slope()));
  for (const auto& [n, c] : a.coeffs()) s += factor * static_cast<double>(std::abs(n)) * std::norm(c);
  return s;
}

}  // namespace nct
