#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#ifndef lapack_complex_double
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include "nctorus/lattice_algebra.hpp"

namespace nct {

/// Clock and shift matrices at theta = p/q: U = diag(w^j), V e_k = e_{k+1}
/// with w = e^{2 pi i p / q}, so that U V = w V U.
struct ClockShiftRep {
  std::int64_t p = 0;
  std::int64_t q = 1;
  Eigen::MatrixXcd clock;
  Eigen::MatrixXcd shift;
};

namespace detail {

inline std::int64_t mod(std::int64_t a, std::int64_t q) {
  const std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

/// Representative of a mod q in (-q/2, q/2].
inline std::int64_t centered_mod(std::int64_t a, std::int64_t q) {
  std::int64_t r = mod(a, q);
  if (2 * r > q) r -= q;
  return r;
}

/// Table of e^{2 pi i j / q}, j = 0..q-1.
inline std::vector<Complex> roots_of_unity(std::int64_t q) {
  std::vector<Complex> w(static_cast<std::size_t>(q));
  for (std::int64_t j = 0; j < q; ++j) {
    w[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q));
  }
  return w;
}

inline void check_representable(const TorusElement& a, std::int64_t p, std::int64_t q) {
  if (q < 1 || std::gcd(p, q) != 1) throw PreconditionError("represent: p and q must be coprime with q >= 1");
  if (q <= 2 * a.support_radius()) {
    throw PreconditionError("represent: q = " + std::to_string(q) + " too small for support radius " +
                            std::to_string(a.support_radius()) + " (modes would alias)");
  }
}

inline std::int64_t modular_inverse(std::int64_t a, std::int64_t q) {
  std::int64_t t = 0, new_t = 1, r = q, new_r = mod(a, q);
  while (new_r != 0) {
    const std::int64_t quotient = r / new_r;
    t = std::exchange(new_t, t - quotient * new_t);
    r = std::exchange(new_r, r - quotient * new_r);
  }
  return r == 1 ? mod(t, q) : 0;
}

/// Position of index i in the ordering 0, q-1, 1, q-2, 2, ...; a cyclic band of
/// half-width d becomes an ordinary band of half-width <= 2d.
inline std::int64_t zigzag_position(std::int64_t i, std::int64_t q) {
  return 2 * i <= q - 1 ? 2 * i : 2 * (q - 1 - i) + 1;
}

}  // namespace detail

inline ClockShiftRep clock_shift(std::int64_t p, std::int64_t q) {
  if (q < 1 || std::gcd(p, q) != 1) throw PreconditionError("clock_shift: p and q must be coprime with q >= 1");
  const auto w = detail::roots_of_unity(q);
  ClockShiftRep rep{p, q, Eigen::MatrixXcd::Zero(q, q), Eigen::MatrixXcd::Zero(q, q)};
  for (std::int64_t j = 0; j < q; ++j) {
    rep.clock(j, j) = w[static_cast<std::size_t>(detail::mod(p * j, q))];
    rep.shift(detail::mod(j + 1, q), j) = 1.0;
  }
  return rep;
}

/// sum a_{m,n} U^m V^n at theta = p/q as a dense q x q matrix; entry (j, k) of
/// U^m V^n is w^{m j} when j = k + n mod q.
inline Eigen::MatrixXcd represent(const TorusElement& a, std::int64_t p, std::int64_t q) {
  detail::check_representable(a, p, q);
  const auto w = detail::roots_of_unity(q);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(q, q);
  for (const auto& [idx, c] : a.coeffs()) {
    const std::int64_t phase_step = detail::mod(p * idx.m, q);
    for (std::int64_t j = 0; j < q; ++j) {
      const std::int64_t k = detail::mod(j - idx.n, q);
      out(j, k) += c * w[static_cast<std::size_t>(detail::mod(phase_step * j, q))];
    }
  }
  return out;
}

/// Moves `a` from its theta to p/q keeping the symmetric-ordering coefficients
/// a_{m,n} e^{i pi m n theta} fixed. The result is self-adjoint at p/q exactly
/// when `a` is self-adjoint at theta, and has the same coefficient moduli.
inline TorusElement transfer_to_rational(const TorusElement& a, Rational r) {
  if (!(r.p > 0 && r.p < r.q)) throw PreconditionError("transfer_to_rational: p/q must lie in (0,1)");
  const ThetaParam target(r.value(), r);
  if (a.theta().value() == r.value()) return a.with_theta(target);
  TorusElement::Coefficients out;
  const double theta = a.theta().value();
  const std::int64_t two_q = 2 * r.q;
  for (const auto& [idx, c] : a.coeffs()) {
    const std::int64_t mn = idx.m * idx.n;
    // e^{-i pi mn p / q} with the exponent reduced exactly modulo 2q
    const std::int64_t e = detail::mod(-mn * r.p, two_q);
    const Complex exact = std::polar(1.0, std::numbers::pi * static_cast<double>(e) / static_cast<double>(r.q));
    out.emplace(idx, c * half_turn_phase(mn, theta) * exact);
  }
  return TorusElement(target, std::move(out));
}

/// Eigenvalues (ascending) of the Hermitian matrix represent(a, p, q), computed
/// from its cyclic band structure: the basis is relabelled j -> u j mod q for
/// the unit u giving the narrowest band, then zigzag-ordered, and LAPACK's
/// band solver is applied. Only the lower triangle of the matrix is read.
inline std::vector<double> hermitian_band_eigenvalues(const TorusElement& a, std::int64_t p, std::int64_t q) {
  detail::check_representable(a, p, q);
  if (a.empty()) return std::vector<double>(static_cast<std::size_t>(q), 0.0);

  std::set<std::int64_t> shifts;
  for (const auto& [idx, c] : a.coeffs()) shifts.insert(detail::mod(idx.n, q));

  auto band_after = [&](std::int64_t u) {
    std::int64_t width = 0;
    for (const auto s : shifts) width = std::max(width, std::abs(detail::centered_mod(u * s, q)));
    return width;
  };
  std::int64_t best_unit = 1;
  std::int64_t best_width = band_after(1);
  for (const auto s : shifts) {
    if (s == 0) continue;
    const std::int64_t inv = detail::modular_inverse(s, q);
    if (inv == 0) continue;
    const std::int64_t width = band_after(inv);
    if (width < best_width) {
      best_width = width;
      best_unit = inv;
    }
  }

  std::vector<std::int64_t> pos(static_cast<std::size_t>(q));
  for (std::int64_t j = 0; j < q; ++j) {
    pos[static_cast<std::size_t>(j)] = detail::zigzag_position(detail::mod(best_unit * j, q), q);
  }

  std::int64_t kd = 0;
  for (const auto s : shifts) {
    for (std::int64_t j = 0; j < q; ++j) {
      const std::int64_t k = detail::mod(j - s, q);
      kd = std::max(kd, std::abs(pos[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(k)]));
    }
  }

  const auto w = detail::roots_of_unity(q);
  const std::int64_t ldab = kd + 1;
  std::vector<Complex> band(static_cast<std::size_t>(ldab * q), Complex{});
  for (const auto& [idx, c] : a.coeffs()) {
    const std::int64_t phase_step = detail::mod(p * idx.m, q);
    for (std::int64_t j = 0; j < q; ++j) {
      const std::int64_t k = detail::mod(j - idx.n, q);
      const std::int64_t row = pos[static_cast<std::size_t>(j)];
      const std::int64_t col = pos[static_cast<std::size_t>(k)];
      if (row < col) continue;  // upper triangle is implied by hermiticity
      band[static_cast<std::size_t>((row - col) + col * ldab)] +=
          c * w[static_cast<std::size_t>(detail::mod(phase_step * j, q))];
    }
  }

  std::vector<double> eigenvalues(static_cast<std::size_t>(q));
  const lapack_int info = LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(q),
                                        static_cast<lapack_int>(kd), band.data(), static_cast<lapack_int>(ldab),
                                        eigenvalues.data(), nullptr, 1);
  if (info != 0) {
    throw NumericalError("band eigensolver failed (zhbev info = " + std::to_string(info) + ") at q = " +
                         std::to_string(q));
  }
  return eigenvalues;
}

}  // namespace nct
