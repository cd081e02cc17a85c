#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nctorus/clock_shift.hpp"
#include "nctorus/graded.hpp"
#include "nctorus/lattice_algebra.hpp"

namespace nct {

inline constexpr double kEigenvalueFloor = 1e-12;
inline constexpr double kSelfAdjointTolerance = 1e-10;
inline constexpr int kDilationGridPoints = 33;

struct SpectralData {
  Rational at;
  std::vector<double> eigenvalues;  // ascending
  double min_eig = 0.0;
  double max_eig = 0.0;
  double positivity_margin = 0.0;  // == min_eig
};

// ---------------------------------------------------------------------------
// Convergent selection

namespace detail {

inline bool usable_convergent(const Rational& r, std::int64_t radius) {
  return r.p > 0 && r.p < r.q && r.q > 2 * radius;
}

}  // namespace detail

/// The primary convergent (theta's attached rational, else the largest
/// continued-fraction convergent with q <= 2000) and the previous usable one,
/// which drives the convergence estimate.
struct ConvergentPair {
  Rational primary;
  std::optional<Rational> previous;
};

inline ConvergentPair verification_convergents(const ThetaParam& theta, std::int64_t support_radius) {
  const auto all = convergents(theta.value(), 100000);
  std::optional<Rational> primary = theta.rational();
  if (!primary) {
    for (const auto& c : all) {
      if (c.q <= ThetaParam::kDefaultConvergentCap && detail::usable_convergent(c, support_radius)) primary = c;
    }
  }
  if (!primary || !detail::usable_convergent(*primary, support_radius)) {
    throw PreconditionError("no usable rational approximation of theta for support radius " +
                            std::to_string(support_radius));
  }
  std::optional<Rational> previous;
  for (const auto& c : all) {
    if (c.q < primary->q && detail::usable_convergent(c, support_radius)) previous = c;
  }
  return {*primary, previous};
}

// ---------------------------------------------------------------------------
// Spectra

/// Spectrum of `a` at theta ~ p/q. The element is first carried to p/q by
/// transfer_to_rational, which must leave it self-adjoint there.
inline SpectralData spectrum(const TorusElement& a, std::int64_t p, std::int64_t q) {
  const TorusElement moved = transfer_to_rational(a, {p, q});
  const double residual = self_adjoint_residual(moved);
  if (residual > kSelfAdjointTolerance) {
    throw NotSelfAdjoint("spectrum: element is not self-adjoint (residual " + std::to_string(residual) + ")");
  }
  SpectralData out;
  out.at = {p, q};
  out.eigenvalues = hermitian_band_eigenvalues(moved, p, q);
  out.min_eig = out.eigenvalues.front();
  out.max_eig = out.eigenvalues.back();
  out.positivity_margin = out.min_eig;
  return out;
}

inline SpectralData spectrum(const TorusElement& a) {
  const auto pair = verification_convergents(a.theta(), a.support_radius());
  return spectrum(a, pair.primary.p, pair.primary.q);
}

/// Dense Hermitian functional calculus f(A) via eigendecomposition.
inline Eigen::MatrixXcd hermitian_function(const Eigen::MatrixXcd& A, const std::function<double(double)>& f) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("dense Hermitian eigensolver failed");
  Eigen::VectorXd fx = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fx.asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// Circle symbol of the diagonal class

/// Coefficients of the circle function f(z) = sum b_n z^n for a diagonal
/// element: U^n V^{sn} = e^{i pi s n(n-1) theta} W^n with W = U V^s, so
/// b_n = a_n e^{i pi s n(n-1) theta}.
inline std::map<std::int64_t, Complex> symbol_coefficients(const DiagonalElement& a) {
  std::map<std::int64_t, Complex> out;
  const double theta = a.theta().value();
  for (const auto& [n, c] : a.coeffs()) out.emplace(n, c * half_turn_phase(a.slope() * n * (n - 1), theta));
  return out;
}

inline Complex evaluate_symbol(const std::map<std::int64_t, Complex>& coeffs, double t) {
  Complex acc{};
  for (const auto& [n, c] : coeffs) {
    long double x = static_cast<long double>(n) * static_cast<long double>(t);
    x -= std::nearbyint(x);
    acc += c * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(x));
  }
  return acc;
}

struct CircleSymbol {
  std::vector<double> values;  // f(j / samples)
  double max_imag = 0.0;
};

inline void require_self_adjoint(const DiagonalElement& a, const char* op) {
  if (!is_self_adjoint(a.to_torus(), kSelfAdjointTolerance)) {
    throw NotSelfAdjoint(std::string(op) + ": element is not self-adjoint");
  }
}

inline CircleSymbol circle_symbol(const DiagonalElement& a, std::int64_t samples) {
  require_self_adjoint(a, "circle_symbol");
  if (samples < 4 * a.support_radius() + 1) throw PreconditionError("circle_symbol: too few samples");
  const auto coeffs = symbol_coefficients(a);
  CircleSymbol out;
  out.values.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t j = 0; j < samples; ++j) {
    const Complex v = evaluate_symbol(coeffs, static_cast<double>(j) / static_cast<double>(samples));
    out.values.push_back(v.real());
    out.max_imag = std::max(out.max_imag, std::abs(v.imag()));
  }
  return out;
}

/// Default sample count for quadrature of trigonometric polynomials.
inline std::int64_t default_symbol_samples(const DiagonalElement& a) { return 8 * a.support_radius() + 1; }

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t samples = 0;
};

/// Trapezoid rule for the circle average of g(f(t)), f(t) = sum c_n e^{2 pi i n t},
/// doubling the sample count from `start` until two successive values agree to
/// ~1e-14 (relative).
inline QuadratureResult circle_average(const std::map<std::int64_t, Complex>& coeffs,
                                       const std::function<double(double)>& g, std::int64_t start) {
  std::int64_t n = std::max<std::int64_t>(start, 16);
  auto rule = [&](std::int64_t samples) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < samples; ++j) {
      acc += g(evaluate_symbol(coeffs, static_cast<double>(j) / static_cast<double>(samples)).real());
    }
    return acc / static_cast<double>(samples);
  };
  double prev = rule(n);
  constexpr std::int64_t kMaxSamples = std::int64_t{1} << 22;
  while (true) {
    n *= 2;
    const double next = rule(n);
    const double diff = std::abs(next - prev);
    if (diff <= 1e-14 * std::max(1.0, std::abs(next)) || n >= kMaxSamples) return {next, diff, n};
    prev = next;
  }
}

inline QuadratureResult circle_average(const DiagonalElement& a, const std::function<double(double)>& g) {
  require_self_adjoint(a, "circle_average");
  return circle_average(symbol_coefficients(a), g, default_symbol_samples(a));
}

/// Minimum of the (real) circle function, by dense sampling plus golden-section
/// refinement around the lowest samples.
inline double circle_minimum(const std::map<std::int64_t, Complex>& coeffs) {
  std::int64_t radius = 0;
  for (const auto& [k, c] : coeffs) radius = std::max(radius, std::abs(k));
  const auto f = [&](double t) { return evaluate_symbol(coeffs, t).real(); };
  const std::int64_t n = std::max<std::int64_t>(1024, 64 * (radius + 1));
  std::vector<double> values(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) values[static_cast<std::size_t>(j)] = f(static_cast<double>(j) / static_cast<double>(n));
  double best = *std::min_element(values.begin(), values.end());
  const double h = 1.0 / static_cast<double>(n);
  for (std::int64_t j = 0; j < n; ++j) {
    const double here = values[static_cast<std::size_t>(j)];
    const double left = values[static_cast<std::size_t>((j + n - 1) % n)];
    const double right = values[static_cast<std::size_t>((j + 1) % n)];
    if (here > left || here > right) continue;
    double lo = static_cast<double>(j) * h - h;
    double hi = static_cast<double>(j) * h + h;
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = f(x2);
      }
    }
    best = std::min({best, f1, f2});
  }
  return best;
}

inline double circle_minimum(const DiagonalElement& a) {
  require_self_adjoint(a, "circle_minimum");
  return circle_minimum(symbol_coefficients(a));
}

// ---------------------------------------------------------------------------
// Positivity

struct PositivityReport {
  bool positive = false;
  double margin = 0.0;  // min eigenvalue at the primary convergent
  Rational at;
  std::optional<double> symbol_minimum;  // diagonal class only
  bool consistent = true;                // matrix and symbol minima agree
};

namespace detail {

/// Consistency window between the matrix minimum (f sampled at the spectrum of
/// W, a union of rotated grids with spacing gcd(s,q)/q) and the true minimum.
inline bool minima_consistent(const DiagonalElement& d, double symbol_min, double matrix_min, std::int64_t q) {
  double curvature = 0.0;
  for (const auto& [n, c] : d.coeffs()) {
    const double k = 2.0 * std::numbers::pi * static_cast<double>(n);
    curvature += std::abs(c) * k * k;
  }
  const double spacing = static_cast<double>(std::gcd(d.slope(), q)) / static_cast<double>(q);
  const double grid_gap = 0.5 * curvature * (spacing / 2.0) * (spacing / 2.0);
  return matrix_min >= symbol_min - 1e-6 && matrix_min <= symbol_min + 1e-6 + grid_gap;
}

}  // namespace detail

inline PositivityReport is_positive(const TorusElement& a, double margin) {
  const auto pair = verification_convergents(a.theta(), a.support_radius());
  const SpectralData sd = spectrum(a, pair.primary.p, pair.primary.q);
  PositivityReport out;
  out.margin = sd.min_eig;
  out.positive = sd.min_eig > margin;
  out.at = pair.primary;
  if (const auto slope = detect_slope(a)) {
    const DiagonalElement d = DiagonalElement::from_torus(a, *slope);
    const double smin = circle_minimum(d);
    out.symbol_minimum = smin;
    out.consistent = detail::minima_consistent(d, smin, sd.min_eig, pair.primary.q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral bounds of the dilation family P_r(a)

struct DilationGridPoint {
  double r = 0.0;
  double min_eig = 0.0;
  double max_eig = 0.0;
};

struct SpectralBounds {
  double lower = 0.0;  // B1: smallest grid margin
  double upper = 0.0;  // B2 = 1 + sum |a_{m,n}| over nonconstant modes
  Rational at;
  std::vector<DilationGridPoint> grid;
};

inline SpectralBounds spectral_bounds(const TorusElement& a, int grid_points = kDilationGridPoints) {
  if (grid_points < 2) throw PreconditionError("spectral_bounds: need at least two grid points");
  const GradedElement x = dilate(a);
  const auto pair = verification_convergents(a.theta(), a.support_radius());
  SpectralBounds out;
  out.at = pair.primary;
  out.upper = 1.0;
  for (const auto& [idx, c] : a.coeffs()) {
    if (!idx.is_zero()) out.upper += std::abs(c);
  }
  out.lower = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const TorusElement pr = add(TorusElement::identity(a.theta()), x.evaluate(r));
    const SpectralData sd = spectrum(pr, pair.primary.p, pair.primary.q);
    out.grid.push_back({r, sd.min_eig, sd.max_eig});
    out.lower = std::min(out.lower, sd.min_eig);
  }
  if (out.lower <= 0.0) {
    throw PositivityError("spectral_bounds: P_r(a) is not strictly positive on the r-grid (min eigenvalue " +
                          std::to_string(out.lower) + ")");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entropy tau(a^2 log a)

struct EntropyEstimate {
  double value = 0.0;
  double error_estimate = 0.0;  // |value(q_k) - value(q_{k-1})|; +inf if no previous convergent
  Rational at;
  std::optional<Rational> previous;
  double min_eig = 0.0;
  double max_eig = 0.0;
};

namespace detail {

inline double entropy_from_eigenvalues(const std::vector<double>& eigenvalues) {
  if (eigenvalues.front() <= kEigenvalueFloor) {
    throw PositivityError("entropy: eigenvalue " + std::to_string(eigenvalues.front()) +
                          " is below the positivity floor");
  }
  long double acc = 0.0L;
  for (const double x : eigenvalues) acc += static_cast<long double>(x) * x * std::log(static_cast<long double>(x));
  return static_cast<double>(acc / static_cast<long double>(eigenvalues.size()));
}

}  // namespace detail

inline EntropyEstimate entropy_functional(const TorusElement& a) {
  const auto pair = verification_convergents(a.theta(), a.support_radius());
  const SpectralData sd = spectrum(a, pair.primary.p, pair.primary.q);
  EntropyEstimate out;
  out.at = pair.primary;
  out.previous = pair.previous;
  out.min_eig = sd.min_eig;
  out.max_eig = sd.max_eig;
  out.value = detail::entropy_from_eigenvalues(sd.eigenvalues);
  if (pair.previous) {
    const SpectralData coarse = spectrum(a, pair.previous->p, pair.previous->q);
    out.error_estimate = std::abs(out.value - detail::entropy_from_eigenvalues(coarse.eigenvalues));
  } else {
    out.error_estimate = std::numeric_limits<double>::infinity();
  }
  return out;
}

/// Circle-quadrature value of tau(a^2 log a) on the diagonal class.
inline QuadratureResult circle_entropy(const DiagonalElement& a) {
  return circle_average(a, [](double f) {
    if (f <= 0.0) throw PositivityError("circle_entropy: circle function is not positive");
    return f * f * std::log(f);
  });
}

// ---------------------------------------------------------------------------
// log(1 + x) as a power series in the algebra

struct LogSeries {
  TorusElement value;
  double tail_bound = 0.0;
  double rho = 0.0;
};

inline LogSeries log_series(const TorusElement& x, int terms) {
  if (terms < 1) throw PreconditionError("log_series: need at least one term");
  const double rho = l1_norm(x);
  if (rho >= 1.0) throw NumericalError("log_series: sum |x_{m,n}| >= 1, series may diverge");
  TorusElement acc(x.theta());
  TorusElement power = x;
  for (int k = 1; k <= terms; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    acc = add(acc, scale(power, sign / static_cast<double>(k)));
    if (k < terms) power = multiply(power, x);
  }
  const double kp1 = static_cast<double>(terms + 1);
  return {acc, std::pow(rho, kp1) / (kp1 * (1.0 - rho)), rho};
}

}  // namespace nct
