#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nctorus/element_io.hpp"
#include "nctorus/lattice_algebra.hpp"
#include "nctorus/lsi_combinatorics.hpp"
#include "nctorus/spectral.hpp"

namespace nct {

inline constexpr double kDefaultSlackTolerance = 1e-7;

// ---------------------------------------------------------------------------
// Deterministic randomness

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of trial i, derived from (master, i) alone.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) {
  return mix64(master + (i + 1) * 0x9e3779b97f4a7c15ULL);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<std::int64_t>(rng() % span);
}

inline Complex random_coefficient(std::mt19937_64& rng, double magnitude) {
  const double r = magnitude * uniform01(rng);
  const double phase = 2.0 * std::numbers::pi * uniform01(rng);
  return std::polar(r, phase);
}

// ---------------------------------------------------------------------------
// Random positive elements

struct GeneratorSpec {
  DilationMode kind = DilationMode::general();
  std::int64_t support_radius = 1;  // radius of b in a = b* b + eps
  double magnitude = 1.0;
  double positivity_floor = 0.05;
  std::uint64_t seed = 0;

  void validate() const {
    if (support_radius < 1) throw PreconditionError("generator: support_radius must be >= 1");
    if (!(positivity_floor > 0.0)) throw PreconditionError("generator: positivity floor must be > 0");
    if (!(magnitude >= 0.0)) throw PreconditionError("generator: magnitude must be >= 0");
  }
};

namespace detail {

/// b drawn on the box |m|,|n| <= R, or on the diagonal line n = s m with |m| <= R.
inline TorusElement draw_generator_factor(const GeneratorSpec& spec, const ThetaParam& theta) {
  std::mt19937_64 rng(spec.seed);
  TorusElement::Coefficients b;
  const std::int64_t R = spec.support_radius;
  if (spec.kind.kind == DilationMode::Kind::kDiagonal) {
    for (std::int64_t n = -R; n <= R; ++n) b.emplace(LatticeIndex{n, spec.kind.slope * n}, random_coefficient(rng, spec.magnitude));
  } else {
    for (std::int64_t m = -R; m <= R; ++m) {
      for (std::int64_t n = -R; n <= R; ++n) b.emplace(LatticeIndex{m, n}, random_coefficient(rng, spec.magnitude));
    }
  }
  return TorusElement(theta, std::move(b));
}

}  // namespace detail

/// a = (b* b + eps) / tau(b* b + eps).
inline TorusElement gen_random_positive(const GeneratorSpec& spec, const ThetaParam& theta) {
  spec.validate();
  const TorusElement bb = detail::draw_generator_factor(spec, theta);
  TorusElement a = add(multiply(adjoint(bb), bb), TorusElement::scalar(theta, spec.positivity_floor));
  // b* b is self-adjoint only up to rounding; symmetrize so the stored element is exactly balanced
  a = scale(add(a, adjoint(a)), 0.5);
  return scale(a, 1.0 / trace(a).real());
}

/// Random self-adjoint element (not necessarily positive) with the given number
/// of modes of weight <= radius.
inline TorusElement gen_random_self_adjoint(std::mt19937_64& rng, const ThetaParam& theta, std::int64_t radius,
                                            std::size_t pairs, double magnitude = 1.0) {
  TorusElement::Coefficients c;
  c.emplace(LatticeIndex{0, 0}, Complex{uniform01(rng) * magnitude, 0.0});
  for (std::size_t i = 0; i < pairs; ++i) {
    LatticeIndex mu{uniform_int(rng, -radius, radius), uniform_int(rng, -radius, radius)};
    if (mu.is_zero()) continue;
    c[mu] = random_coefficient(rng, magnitude);
  }
  const TorusElement a(theta, std::move(c));
  return scale(add(a, adjoint(a)), 0.5);
}

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { kHolds, kInconclusive, kViolated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kInconclusive:
      return "inconclusive";
    case Verdict::kViolated:
      return "violated";
  }
  return "?";
}

/// holds when slack >= -tol; otherwise inconclusive when the shortfall is
/// within the entropy error estimate; otherwise violated.
inline Verdict classify(double slack, double error_estimate, double tol) {
  if (slack >= -tol) return Verdict::kHolds;
  if (-slack <= error_estimate) return Verdict::kInconclusive;
  return Verdict::kViolated;
}

struct InequalityReport {
  std::string label;  // "theorem", "conjecture" or "baseline"
  std::string element_digest;
  double entropy = 0.0;
  double energy = 0.0;
  double l2 = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double entropy_error_estimate = 0.0;
  std::optional<double> stronger_slack;        // energy + ||x||^2 / 2 - entropy, normalized element
  std::optional<double> alternate_slack;       // baseline only: the f^2 log f form
  std::optional<double> circle_entropy;        // diagonal only
  std::optional<double> convergence_estimate;  // |value(q_k) - value(q_{k-1})|
  std::optional<Rational> convergent;
  std::optional<double> min_eig;
  std::optional<GCoefficients> coefficient_signs;
  Verdict verdict = Verdict::kHolds;

  /// Smallest reported Taylor coefficient of G (NaN when none were computed).
  [[nodiscard]] double min_coeff() const {
    return coefficient_signs ? coefficient_signs->min_coefficient() : std::numeric_limits<double>::quiet_NaN();
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["label"] = label;
    j["digest"] = element_digest;
    j["entropy"] = entropy;
    j["energy"] = energy;
    j["l2"] = l2;
    j["rhs"] = rhs;
    j["slack"] = slack;
    j["entropy_err"] = entropy_error_estimate;
    if (stronger_slack) j["stronger_slack"] = *stronger_slack;
    if (alternate_slack) j["f2_slack"] = *alternate_slack;
    if (circle_entropy) j["circle_entropy"] = *circle_entropy;
    if (convergence_estimate) j["convergence_estimate"] = *convergence_estimate;
    if (convergent) j["convergent"] = {convergent->p, convergent->q};
    if (min_eig) j["min_eig"] = *min_eig;
    if (coefficient_signs) {
      j["coefficients"] = coefficient_signs->to_json();
      j["min_coeff"] = coefficient_signs->min_coefficient();
    }
    j["verdict"] = to_string(verdict);
    return j;
  }
};

struct VerifyOptions {
  double tol = kDefaultSlackTolerance;
  std::int64_t max_degree = -1;  // -1: diagonal 2(1+|s|)*5, general 8; 0 disables coefficients
};

namespace detail {

/// energy + ||x||^2/2 - tau(a^2 log a) for a / tau(a), from the unnormalized values.
inline double stronger_slack(double entropy, double energy, double l2_sq, double tau) {
  const double c2 = tau * tau;
  const double entropy_norm = (entropy - std::log(tau) * l2_sq) / c2;
  return energy / c2 + 0.5 * (l2_sq / c2 - 1.0) - entropy_norm;
}

inline void fill_rhs(InequalityReport& r, double l2_sq) {
  r.l2 = std::sqrt(l2_sq);
  r.rhs = r.energy + (l2_sq > 0.0 ? l2_sq * std::log(r.l2) : 0.0);
  r.slack = r.rhs - r.entropy;
}

inline double positive_trace(const TorusElement& a) {
  const Complex t = trace(a);
  if (!(t.real() > 0.0) || std::abs(t.imag()) > 1e-12) {
    throw PositivityError("verify: tau(a) must be real and positive for a positive element");
  }
  return t.real();
}

}  // namespace detail

/// Theorem-backed check on the diagonal class.
inline InequalityReport verify_diagonal(const DiagonalElement& a, const VerifyOptions& opt = {}) {
  const TorusElement ta = a.to_torus();
  if (!is_self_adjoint(ta, kSelfAdjointTolerance)) throw NotSelfAdjoint("verify_diagonal: element is not self-adjoint");
  const double tau = detail::positive_trace(ta);

  InequalityReport r;
  r.label = "theorem";
  r.element_digest = digest(ta);
  const EntropyEstimate e = entropy_functional(ta);
  const QuadratureResult circle = circle_entropy(a);
  r.entropy = e.value;
  r.circle_entropy = circle.value;
  r.convergence_estimate = e.error_estimate;
  r.convergent = e.at;
  r.min_eig = e.min_eig;
  r.entropy_error_estimate = std::max(std::abs(e.value - circle.value), std::isfinite(e.error_estimate) ? e.error_estimate : 0.0);
  r.energy = dirichlet_weight(a);
  const double l2_sq = l2_norm_squared(ta);
  detail::fill_rhs(r, l2_sq);
  r.stronger_slack = detail::stronger_slack(r.entropy, r.energy, l2_sq, tau);

  const std::int64_t max_degree = opt.max_degree < 0 ? 10 * (1 + std::abs(a.slope())) : opt.max_degree;
  if (max_degree > 0) {
    const DiagonalElement normalized = DiagonalElement::from_torus(scale(ta, 1.0 / tau), a.slope());
    r.coefficient_signs = g_taylor(normalized, max_degree);
  }
  r.verdict = classify(r.slack, r.entropy_error_estimate, opt.tol);
  return r;
}

/// Conjecture check for a general finitely supported positive element.
inline InequalityReport verify_general(const TorusElement& a, const VerifyOptions& opt = {}) {
  if (!is_self_adjoint(a, kSelfAdjointTolerance)) throw NotSelfAdjoint("verify_general: element is not self-adjoint");
  const double tau = detail::positive_trace(a);

  InequalityReport r;
  r.label = "conjecture";
  r.element_digest = digest(a);
  const EntropyEstimate e = entropy_functional(a);
  r.entropy = e.value;
  r.convergence_estimate = e.error_estimate;
  r.convergent = e.at;
  r.min_eig = e.min_eig;
  r.entropy_error_estimate = e.error_estimate;
  r.energy = dirichlet_weight(a);
  const double l2_sq = l2_norm_squared(a);
  detail::fill_rhs(r, l2_sq);
  r.stronger_slack = detail::stronger_slack(r.entropy, r.energy, l2_sq, tau);

  const std::int64_t max_degree = opt.max_degree < 0 ? 8 : opt.max_degree;
  if (max_degree > 0) r.coefficient_signs = g_taylor(scale(a, 1.0 / tau), max_degree);
  r.verdict = classify(r.slack, r.entropy_error_estimate, opt.tol);
  return r;
}

/// Canonical text of a circle coefficient map, used for its digest.
inline std::string store_trig(const std::map<std::int64_t, Complex>& f) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [n, c] : f) arr.push_back({{"n", n}, {"re", c.real()}, {"im", c.imag()}});
  nlohmann::ordered_json j;
  j["coeffs"] = std::move(arr);
  return j.dump();
}

/// Circle inequality int f log f <= sum |n||a_n|^2 + ||f||^2 log ||f|| for a
/// real, nonnegative trigonometric polynomial f = sum a_n e^{2 pi i n t}.
inline InequalityReport verify_weissler_baseline(const std::map<std::int64_t, Complex>& f, std::int64_t samples,
                                                 double tol = 1e-9) {
  std::int64_t radius = 0;
  for (const auto& [n, c] : f) {
    radius = std::max(radius, std::abs(n));
    const auto it = f.find(-n);
    const Complex mirror = it == f.end() ? Complex{} : it->second;
    if (std::abs(c - std::conj(mirror)) > 1e-12) throw NotSelfAdjoint("weissler: f is not real (a_{-n} != conj a_n)");
  }
  if (samples < 4 * radius + 1) throw PreconditionError("weissler: too few samples");
  double scale = 0.0;
  for (const auto& [n, c] : f) scale += std::abs(c);
  // f log f extends continuously to f = 0, so touching zero is allowed
  const double fmin = circle_minimum(f);
  if (!(fmin >= -1e-12 * scale)) throw PositivityError("weissler: f is negative somewhere on the circle");

  InequalityReport r;
  r.label = "baseline";
  r.element_digest = fnv1a_hex(store_trig(f));
  const QuadratureResult q = circle_average(f, [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; }, samples);
  const QuadratureResult q2 = circle_average(f, [](double v) { return v > 0.0 ? v * v * std::log(v) : 0.0; }, samples);
  r.entropy = q.value;
  r.entropy_error_estimate = q.error_estimate;
  r.min_eig = fmin;
  double l2_sq = 0.0;
  for (const auto& [n, c] : f) {
    r.energy += static_cast<double>(std::abs(n)) * std::norm(c);
    l2_sq += std::norm(c);
  }
  detail::fill_rhs(r, l2_sq);
  r.alternate_slack = r.rhs - q2.value;
  r.verdict = classify(r.slack, r.entropy_error_estimate, tol);
  return r;
}

/// Real positive trigonometric polynomial of the given degree: random
/// coefficients for n != 0, constant term lifted above the minimum.
inline std::map<std::int64_t, Complex> gen_random_trig(std::mt19937_64& rng, std::int64_t degree, double magnitude = 1.0) {
  std::map<std::int64_t, Complex> f;
  for (std::int64_t n = 1; n <= degree; ++n) {
    const Complex c = random_coefficient(rng, magnitude);
    f[n] = c;
    f[-n] = std::conj(c);
  }
  f[0] = 0.0;
  const double lift = 0.01 + uniform01(rng);
  f[0] = Complex{lift - (degree > 0 ? circle_minimum(f) : 0.0), 0.0};
  return f;
}

// ---------------------------------------------------------------------------
// Campaigns

enum class CampaignKind { kDiagonal, kGeneral, kWeissler };

inline const char* to_string(CampaignKind k) {
  switch (k) {
    case CampaignKind::kDiagonal:
      return "diagonal";
    case CampaignKind::kGeneral:
      return "general";
    case CampaignKind::kWeissler:
      return "weissler";
  }
  return "?";
}

struct CampaignConfig {
  CampaignKind kind = CampaignKind::kDiagonal;
  std::vector<std::int64_t> slopes{1};  // diagonal: trial slope drawn from this list
  std::int64_t max_radius = 3;          // trial radius drawn from 1..max_radius (degree for weissler)
  double magnitude = 1.0;
  double positivity_floor = 0.05;
  std::uint64_t seed = 42;
  std::int64_t trials = 100;
  ThetaParam theta = ThetaParam::golden();
  double tol = kDefaultSlackTolerance;
  std::int64_t max_degree = -1;
  std::string csv_path;   // empty: no file
  std::string json_path;  // empty: no file
  std::string dump_dir;   // where conjecture violations are written; empty: next to csv or cwd

  void validate() const {
    if (trials < 0) throw PreconditionError("campaign: trials must be >= 0");
    if (max_radius < 1) throw PreconditionError("campaign: radius must be >= 1");
    if (kind == CampaignKind::kDiagonal) {
      if (slopes.empty()) throw PreconditionError("campaign: no slope given");
      for (const auto s : slopes) {
        if (s == 0) throw PreconditionError("campaign: slope must be nonzero");
      }
    }
    if (!(tol >= 0.0)) throw PreconditionError("campaign: tolerance must be >= 0");
  }
};

struct CampaignRow {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  InequalityReport report;
};

struct CampaignResult {
  std::vector<CampaignRow> rows;
  std::map<std::string, std::int64_t> verdicts;
  double min_slack = std::numeric_limits<double>::infinity();
  double min_coeff = std::numeric_limits<double>::infinity();
  double max_entropy_err = 0.0;
  double seconds = 0.0;
  std::vector<std::string> dumps;
  int exit_code = 0;
};

inline constexpr const char* kCampaignHeader = "trial,seed,digest,entropy,energy,l2,slack,min_coeff_sign,entropy_err,verdict";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_line(const CampaignRow& row) {
  const auto& r = row.report;
  std::ostringstream out;
  out << row.trial << ',' << row.seed << ',' << r.element_digest << ',' << format_double(r.entropy) << ','
      << format_double(r.energy) << ',' << format_double(r.l2) << ',' << format_double(r.slack) << ','
      << format_double(r.min_coeff()) << ',' << format_double(r.entropy_error_estimate) << ',' << to_string(r.verdict);
  return out.str();
}

/// One campaign trial; `element` receives the verified element (not for weissler).
inline InequalityReport run_trial(const CampaignConfig& cfg, std::uint64_t seed, std::optional<TorusElement>* element = nullptr) {
  std::mt19937_64 rng(seed);
  const std::int64_t radius = uniform_int(rng, 1, cfg.max_radius);
  VerifyOptions opt{cfg.tol, cfg.max_degree};
  switch (cfg.kind) {
    case CampaignKind::kWeissler: {
      const auto f = gen_random_trig(rng, radius, cfg.magnitude);
      return verify_weissler_baseline(f, 8 * radius + 1, cfg.tol);
    }
    case CampaignKind::kDiagonal: {
      const std::int64_t s = cfg.slopes[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(cfg.slopes.size()) - 1))];
      GeneratorSpec spec{DilationMode::diagonal(s), radius, cfg.magnitude, cfg.positivity_floor, rng()};
      const TorusElement a = gen_random_positive(spec, cfg.theta);
      if (element) *element = a;
      return verify_diagonal(DiagonalElement::from_torus(a, s), opt);
    }
    case CampaignKind::kGeneral: {
      GeneratorSpec spec{DilationMode::general(), radius, cfg.magnitude, cfg.positivity_floor, rng()};
      const TorusElement a = gen_random_positive(spec, cfg.theta);
      if (element) *element = a;
      return verify_general(a, opt);
    }
  }
  throw PreconditionError("campaign: unknown kind");
}

inline nlohmann::ordered_json summary_json(const CampaignConfig& cfg, const CampaignResult& res) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(cfg.kind);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["theta"] = theta_to_json(cfg.theta);
  j["tol"] = cfg.tol;
  j["min_slack"] = res.rows.empty() ? 0.0 : res.min_slack;
  if (std::isfinite(res.min_coeff)) j["min_coeff"] = res.min_coeff;
  j["max_entropy_err"] = res.max_entropy_err;
  j["verdicts"] = res.verdicts;
  j["dumps"] = res.dumps;
  j["runtime_seconds"] = res.seconds;
  j["exit_code"] = res.exit_code;
  return j;
}

/// Folds one finished trial into the result. A violated verdict sets exit code
/// 1 on theorem-backed suites; on the conjecture suite it sets 2 and dumps the
/// element to `dump_dir`.
inline void record_row(const CampaignConfig& cfg, CampaignRow row, const std::optional<TorusElement>& element,
                       CampaignResult& res, const std::filesystem::path& dump_dir) {
  const auto& r = row.report;
  ++res.verdicts[to_string(r.verdict)];
  res.min_slack = std::min(res.min_slack, r.slack);
  if (r.coefficient_signs) res.min_coeff = std::min(res.min_coeff, r.min_coeff());
  res.max_entropy_err = std::max(res.max_entropy_err, r.entropy_error_estimate);
  if (r.verdict == Verdict::kViolated) {
    if (cfg.kind == CampaignKind::kGeneral) {
      if (res.exit_code == 0) res.exit_code = 2;
      if (element) {
        std::filesystem::create_directories(dump_dir);
        const auto path = dump_dir / ("violation-trial" + std::to_string(row.trial) + "-" + r.element_digest + ".json");
        store_file(*element, path.string());
        res.dumps.push_back(path.string());
      }
    } else {
      res.exit_code = 1;
    }
  }
  res.rows.push_back(std::move(row));
}

/// Runs the trials in order and writes the CSV / JSON summary when paths are set.
inline CampaignResult run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  CampaignResult res;
  res.verdicts = {{"holds", 0}, {"inconclusive", 0}, {"violated", 0}};
  std::ofstream csv;
  if (!cfg.csv_path.empty()) {
    csv.open(cfg.csv_path, std::ios::binary);
    if (!csv) throw FormatError("cannot write campaign csv: " + cfg.csv_path);
    csv << kCampaignHeader << '\n';
  }
  std::filesystem::path dump_dir = cfg.dump_dir;
  if (dump_dir.empty()) dump_dir = std::filesystem::path(cfg.csv_path).parent_path();
  if (dump_dir.empty()) dump_dir = ".";

  for (std::int64_t i = 0; i < cfg.trials; ++i) {
    const std::uint64_t seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(i));
    std::optional<TorusElement> element;
    CampaignRow row{i, seed, run_trial(cfg, seed, &element)};
    if (csv.is_open()) csv << csv_line(row) << '\n';
    record_row(cfg, std::move(row), element, res, dump_dir);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!cfg.json_path.empty()) {
    std::ofstream js(cfg.json_path, std::ios::binary);
    if (!js) throw FormatError("cannot write campaign summary: " + cfg.json_path);
    js << summary_json(cfg, res).dump(2) << '\n';
  }
  return res;
}

}  // namespace nct
