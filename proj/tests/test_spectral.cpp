#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nctorus/clock_shift.hpp"
#include "nctorus/spectral.hpp"
#include "nctorus/verify.hpp"

using namespace nct;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ThetaParam rational_theta(std::int64_t p, std::int64_t q) {
  return ThetaParam(static_cast<double>(p) / static_cast<double>(q), Rational{p, q});
}

/// 1 + c (W + W*) with W = U V^s.
TorusElement cosine_element(const ThetaParam& th, double c, std::int64_t s = 1) {
  const auto w = TorusElement::monomial(th, {1, s}, c);
  return add(TorusElement::identity(th), add(w, adjoint(w)));
}

TorusElement random_small(std::mt19937_64& rng, const ThetaParam& th, double rho) {
  TorusElement::Coefficients c;
  for (int i = 0; i < 4; ++i) c[{uniform_int(rng, -2, 2), uniform_int(rng, -2, 2)}] += random_coefficient(rng, 1.0);
  c.erase({0, 0});
  TorusElement x(th, std::move(c));
  x = scale(add(x, adjoint(x)), 0.5);
  return scale(x, rho / l1_norm(x));
}

}  // namespace

TEST(ClockShift, RelationAndUnitarity) {
  for (auto [p, q] : {std::pair{1, 5}, std::pair{3, 10}, std::pair{55, 89}}) {
    const auto rep = clock_shift(p, q);
    const Complex w = std::polar(1.0, kTwoPi * p / q);
    EXPECT_LE((rep.clock * rep.shift - w * rep.shift * rep.clock).norm(), 1e-13);
    const auto I = Eigen::MatrixXcd::Identity(q, q);
    EXPECT_LE((rep.clock.adjoint() * rep.clock - I).norm(), 1e-13);
    EXPECT_LE((rep.shift.adjoint() * rep.shift - I).norm(), 1e-13);
  }
}

TEST(Represent, ExamplesAndErrors) {
  const auto th = rational_theta(1, 5);
  EXPECT_LE((represent(TorusElement::identity(th), 1, 5) - Eigen::MatrixXcd::Identity(5, 5)).norm(), 0.0);
  EXPECT_NEAR(std::abs(represent(TorusElement::monomial(th, {1, 1}), 1, 5).trace()) / 5.0, 0.0, 1e-15);
  EXPECT_THROW(represent(TorusElement::monomial(th, {3, 0}), 1, 5), PreconditionError);
  EXPECT_THROW(represent(TorusElement::identity(th), 2, 4), PreconditionError);
}

TEST(Represent, HomomorphismAndTrace) {
  std::mt19937_64 rng(2);
  for (auto [p, q] : {std::pair{3, 10}, std::pair{13, 21}, std::pair{21, 34}}) {
    const auto th = rational_theta(p, q);
    for (int i = 0; i < 10; ++i) {
      auto a = random_small(rng, th, 1.0), b = random_small(rng, th, 1.0);
      a = add(a, TorusElement::scalar(th, {0.3, 0.2}));
      const auto lhs = represent(multiply(a, b), p, q);
      EXPECT_LE((lhs - represent(a, p, q) * represent(b, p, q)).norm(), 1e-10 * q);
      EXPECT_NEAR(std::abs(represent(a, p, q).trace() / static_cast<double>(q) - trace(a)), 0.0, 1e-12);
    }
  }
}

TEST(Spectrum, ClosedForms) {
  const auto th = rational_theta(3, 10);
  for (double e : spectrum(TorusElement::identity(th), 3, 10).eigenvalues) EXPECT_NEAR(e, 1.0, 1e-14);

  const auto u = TorusElement::monomial(th, {1, 0});
  auto got = spectrum(add(u, adjoint(u)), 3, 10).eigenvalues;
  std::vector<double> want;
  for (int k = 0; k < 10; ++k) want.push_back(2.0 * std::cos(kTwoPi * 3 * k / 10.0));
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-13);

  EXPECT_THROW(spectrum(u, 3, 10), NotSelfAdjoint);
}

TEST(Spectrum, CosineElementMatchesCircleSamples) {
  const auto th = rational_theta(55, 89);
  const auto sd = spectrum(cosine_element(th, 0.5), 55, 89);
  std::vector<double> want;
  for (int k = 0; k < 89; ++k) want.push_back(1.0 + std::cos(kTwoPi * k / 89.0));
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(sd.eigenvalues[i], want[i], 1e-8);
  EXPECT_GE(sd.min_eig, 0.0);
}

TEST(Spectrum, BandSolverAgreesWithDense) {
  std::mt19937_64 rng(4);
  for (auto [p, q] : {std::pair{13, 21}, std::pair{55, 89}, std::pair{89, 144}}) {
    const auto th = rational_theta(p, q);
    for (int s : {1, 2, 3}) {
      if (2 * 4 * s >= q) continue;  // b has radius 2, so a reaches n = 4s
      const auto a = gen_random_positive({DilationMode::diagonal(s), 2, 1.0, 0.05, rng()}, th);
      const auto band = hermitian_band_eigenvalues(a, p, q);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(represent(a, p, q), Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < q; ++i) EXPECT_NEAR(band[i], es.eigenvalues()(i), 1e-12);
    }
    const auto g = gen_random_positive({DilationMode::general(), 2, 1.0, 0.05, rng()}, th);
    const auto band = hermitian_band_eigenvalues(g, p, q);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(represent(g, p, q), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < q; ++i) EXPECT_NEAR(band[i], es.eigenvalues()(i), 1e-12);
  }
}

TEST(Transfer, PreservesSelfAdjointnessAndModuli) {
  std::mt19937_64 rng(8);
  const auto th = ThetaParam::golden();
  for (int i = 0; i < 20; ++i) {
    const auto a = gen_random_positive({DilationMode::general(), 2, 1.0, 0.05, rng()}, th);
    const auto moved = transfer_to_rational(a, {610, 987});
    EXPECT_LE(self_adjoint_residual(moved), 1e-13);
    for (const auto& [idx, c] : a.coeffs()) EXPECT_NEAR(std::abs(moved.coeff(idx)), std::abs(c), 1e-15);
  }
}

TEST(Positivity, Examples) {
  const auto th = ThetaParam::golden();
  const auto one = is_positive(TorusElement::identity(th), 0.0);
  EXPECT_TRUE(one.positive);
  EXPECT_NEAR(one.margin, 1.0, 1e-13);
  const auto u = TorusElement::monomial(th, {1, 0});
  const auto cosine = is_positive(add(u, adjoint(u)), 0.0);
  EXPECT_FALSE(cosine.positive);
  EXPECT_NEAR(cosine.margin, -2.0, 1e-5);
  EXPECT_TRUE(cosine.consistent);

  std::mt19937_64 rng(12);
  for (int i = 0; i < 10; ++i) {
    TorusElement::Coefficients c;
    for (int k = 0; k < 5; ++k) c[{uniform_int(rng, -2, 2), uniform_int(rng, -2, 2)}] += random_coefficient(rng, 1.0);
    const TorusElement b(th, std::move(c));
    const auto a = add(multiply(adjoint(b), b), TorusElement::scalar(th, 0.1));
    const auto rep = is_positive(scale(add(a, adjoint(a)), 0.5), 0.0);
    EXPECT_TRUE(rep.positive);
    EXPECT_GE(rep.margin, 0.1 - 1e-6);
  }
}

TEST(Positivity, DiagonalCrossCheckIsConsistent) {
  std::mt19937_64 rng(13);
  const auto th = ThetaParam::golden();
  for (int s : {1, -1, 2, -2, 3}) {
    const auto a = gen_random_positive({DilationMode::diagonal(s), 3, 1.0, 0.05, rng()}, th);
    const auto rep = is_positive(a, 0.0);
    ASSERT_TRUE(rep.symbol_minimum.has_value());
    EXPECT_TRUE(rep.consistent) << "s=" << s << " matrix " << rep.margin << " symbol " << *rep.symbol_minimum;
  }
}

TEST(SpectralBounds, Examples) {
  const auto th = ThetaParam::golden(400);
  const auto one = spectral_bounds(TorusElement::identity(th));
  EXPECT_NEAR(one.lower, 1.0, 1e-13);
  EXPECT_NEAR(one.upper, 1.0, 0.0);
  const auto b = spectral_bounds(cosine_element(th, 0.25));
  EXPECT_NEAR(b.upper, 1.5, 1e-15);
  EXPECT_NEAR(b.lower, 0.5, 1e-4);
  for (const auto& g : b.grid) EXPECT_LE(g.max_eig, b.upper + 1e-9);
  EXPECT_THROW(spectral_bounds(cosine_element(th, 0.75)), PositivityError);
}

TEST(Entropy, ScalarsAndCosine) {
  const auto th = ThetaParam::golden();
  EXPECT_NEAR(entropy_functional(TorusElement::identity(th)).value, 0.0, 1e-15);
  const double c = 2.5;
  EXPECT_NEAR(entropy_functional(TorusElement::scalar(th, c)).value, c * c * std::log(c), 1e-13);
  // int_0^1 (1 + cos 2 pi t)^2 log(1 + cos 2 pi t) dt, 20-digit quadrature
  const auto e = entropy_functional(cosine_element(th, 0.5));
  EXPECT_NEAR(e.value, 0.71027922916008203587, 1e-6);
  EXPECT_EQ(e.at, (Rational{987, 1597}));
  ASSERT_TRUE(e.previous.has_value());
  EXPECT_EQ(*e.previous, (Rational{610, 987}));
  EXPECT_THROW(entropy_functional(TorusElement::scalar(th, -1.0)), PositivityError);
}

TEST(Entropy, TwoRouteAgreementOnDiagonalClass) {
  std::mt19937_64 rng(21);
  const auto th = ThetaParam::golden();
  for (int i = 0; i < 20; ++i) {
    const std::int64_t s = (i % 2 == 0 ? 1 : -2);
    const auto a = gen_random_positive({DilationMode::diagonal(s), 1 + i % 3, 1.0, 0.05, rng()}, th);
    const auto m = entropy_functional(a);
    const auto c = circle_entropy(DiagonalElement::from_torus(a, s));
    EXPECT_LE(std::abs(m.value - c.value), std::max(1e-6, 10.0 * m.error_estimate));
  }
}

TEST(CircleSymbol, ExamplesAndParseval) {
  const auto th = ThetaParam::golden();
  const DiagonalElement one(1, {{0, 1.0}}, th);
  for (double v : circle_symbol(one, 9).values) EXPECT_NEAR(v, 1.0, 1e-15);

  const auto cos_el = DiagonalElement::from_torus(cosine_element(th, 0.5), 1);
  const auto sym = circle_symbol(cos_el, 33);
  for (std::size_t j = 0; j < sym.values.size(); ++j) {
    EXPECT_NEAR(sym.values[j], 1.0 + std::cos(kTwoPi * j / 33.0), 1e-13);
  }
  EXPECT_LE(sym.max_imag, 1e-10);

  std::mt19937_64 rng(30);
  for (int s : {1, -1, 2, 3}) {
    const auto a = gen_random_positive({DilationMode::diagonal(s), 3, 1.0, 0.05, rng()}, th);
    const auto d = DiagonalElement::from_torus(a, s);
    const auto f = circle_symbol(d, default_symbol_samples(d));
    double mean_sq = 0.0;
    for (double v : f.values) mean_sq += v * v;
    mean_sq /= static_cast<double>(f.values.size());
    EXPECT_NEAR(mean_sq, l2_norm_squared(a), 1e-10);
    EXPECT_LE(f.max_imag, 1e-10);
  }
  EXPECT_THROW(circle_symbol(DiagonalElement(1, {{1, 1.0}}, th), 9), NotSelfAdjoint);
}

TEST(LogSeries, ScalarAndTwoRoutes) {
  const auto th = ThetaParam::golden();
  EXPECT_TRUE(log_series(TorusElement(th), 5).value.empty());
  const auto scalar = log_series(TorusElement::scalar(th, 0.4), 30);
  EXPECT_NEAR(std::abs(trace(scalar.value) - std::log(1.4)), 0.0, scalar.tail_bound);
  EXPECT_THROW(log_series(TorusElement::scalar(th, 1.0), 5), NumericalError);

  std::mt19937_64 rng(40);
  for (int i = 0; i < 5; ++i) {
    const auto x = random_small(rng, th, 0.3);
    const auto one_plus_x = add(TorusElement::identity(th), x);
    const auto L = log_series(x, 40);
    const double series = trace(multiply(multiply(one_plus_x, one_plus_x), L.value)).real();
    EXPECT_NEAR(series, entropy_functional(one_plus_x).value, 1e-6);
  }
}

TEST(LogSeries, AgreesWithEigenLogarithm) {
  std::mt19937_64 rng(41);
  const auto th = rational_theta(89, 144);
  for (int i = 0; i < 5; ++i) {
    const auto x = random_small(rng, th, 0.5);
    const auto L = log_series(x, 25);
    const Eigen::MatrixXcd A = represent(add(TorusElement::identity(th), x), 89, 144);
    const Eigen::MatrixXcd exact = hermitian_function(A, [](double v) { return std::log(v); });
    const double dist = (represent(L.value, 89, 144) - exact).norm() / std::sqrt(144.0);
    EXPECT_LE(dist, L.tail_bound + 1e-9);
  }
}

TEST(PositiveDilations, EigenvaluesInsideBounds) {
  std::mt19937_64 rng(50);
  const auto th = ThetaParam::golden(400);
  for (int i = 0; i < 5; ++i) {
    const auto a = gen_random_positive({DilationMode::general(), 1 + i % 2, 1.0, 0.05, rng()}, th);
    const auto b = spectral_bounds(a);
    EXPECT_GT(b.lower, 0.0);
    for (const auto& g : b.grid) EXPECT_LE(g.max_eig, b.upper + 1e-9);
  }
}
