#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "nctorus/graded.hpp"
#include "nctorus/lattice_algebra.hpp"

namespace nct {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt exact_factorial(std::int64_t n) {
  if (n < 0) throw PreconditionError("factorial of a negative integer");
  BigInt f = 1;
  for (std::int64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

inline double factorial_value(std::int64_t n) { return exact_factorial(n).convert_to<double>(); }

/// Finitely supported count function on a set of keys; zero counts are not stored.
template <class Key>
class MultiIndex {
 public:
  using Counts = std::map<Key, std::int64_t>;

  MultiIndex() = default;
  explicit MultiIndex(Counts counts) : counts_(std::move(counts)) {
    for (const auto& [key, c] : counts_) {
      if (c < 0) throw PreconditionError("multi-index counts must be nonnegative");
    }
    std::erase_if(counts_, [](const auto& kv) { return kv.second == 0; });
  }
  MultiIndex(std::initializer_list<typename Counts::value_type> counts) : MultiIndex(Counts(counts)) {}

  [[nodiscard]] const Counts& counts() const { return counts_; }
  [[nodiscard]] bool empty() const { return counts_.empty(); }

  [[nodiscard]] std::int64_t count(const Key& key) const {
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }

  [[nodiscard]] std::int64_t total() const {
    std::int64_t t = 0;
    for (const auto& [key, c] : counts_) t += c;
    return t;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  Counts counts_;
};

using DiagonalMultiIndex = MultiIndex<std::int64_t>;
using LatticeMultiIndex = MultiIndex<LatticeIndex>;

// ---------------------------------------------------------------------------
// Diagonal class

/// All P on `support` with sum P(n) = t and sum P(n) n = l, in increasing
/// lexicographic order of the count vector (smallest mode first).
inline std::vector<DiagonalMultiIndex> enumerate_H(std::int64_t t, std::int64_t l, std::vector<std::int64_t> support) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  for (const auto n : support) {
    if (n <= 0) throw PreconditionError("enumerate_H: support must consist of positive modes");
  }
  std::vector<DiagonalMultiIndex> out;
  if (t < 0 || l < 0) return out;
  std::vector<std::int64_t> counts(support.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, std::int64_t t_left, std::int64_t l_left) -> void {
    if (i == support.size()) {
      if (t_left == 0 && l_left == 0) {
        DiagonalMultiIndex::Counts c;
        for (std::size_t j = 0; j < support.size(); ++j) {
          if (counts[j] > 0) c.emplace(support[j], counts[j]);
        }
        out.emplace_back(std::move(c));
      }
      return;
    }
    const std::int64_t n = support[i];
    for (std::int64_t c = 0; c <= t_left && c * n <= l_left; ++c) {
      counts[i] = c;
      self(self, i + 1, t_left - c, l_left - c * n);
    }
    counts[i] = 0;
  };
  rec(rec, 0, t, l);
  return out;
}

/// Positive modes carrying a nonzero coefficient.
inline std::vector<std::int64_t> positive_support(const DiagonalElement& a) {
  std::vector<std::int64_t> out;
  for (const auto& [n, c] : a.coeffs()) {
    if (n > 0) out.push_back(n);
  }
  return out;
}

/// e^{i pi s theta sum P(n) n^2} prod (-a_n)^{P(n)} / P(n)!
inline Complex D_of_P(const DiagonalMultiIndex& P, const DiagonalElement& a) {
  const double theta = a.theta().value();
  std::int64_t quad = 0;
  Complex prod = 1.0;
  BigInt denom = 1;
  for (const auto& [n, count] : P.counts()) {
    if (n <= 0) throw PreconditionError("D_of_P: multi-index uses a nonpositive mode");
    const auto it = a.coeffs().find(n);
    if (it == a.coeffs().end()) throw PreconditionError("D_of_P: mode " + std::to_string(n) + " is absent from a");
    quad += count * n * n;
    prod *= std::pow(-it->second, static_cast<int>(count));
    denom *= exact_factorial(count);
  }
  return half_turn_phase(a.slope() * quad, theta) * prod / denom.convert_to<double>();
}

inline Complex C_tl(std::int64_t t, std::int64_t l, const DiagonalElement& a) {
  if (t < 1 || l < 1) throw PreconditionError("C(t, l): t and l must be >= 1");
  Complex acc{};
  for (const auto& P : enumerate_H(t, l, positive_support(a))) acc += D_of_P(P, a);
  return acc;
}

inline constexpr std::int64_t kMaxAlSize = 86;  // (2l - 3)! stays below the double range

struct AlMatrix {
  std::int64_t l = 0;
  std::int64_t s = 0;
  std::vector<std::vector<BigInt>> entries;  // 0-based

  [[nodiscard]] Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m(l, l);
    for (std::int64_t i = 0; i < l; ++i) {
      for (std::int64_t j = 0; j < l; ++j) m(i, j) = entries[i][j].convert_to<double>();
    }
    return m;
  }

  [[nodiscard]] double max_entry() const { return to_dense().cwiseAbs().maxCoeff(); }
};

/// Entry (1,1) = (1+|s|) l - 1, entry (i,j) = (i+j-3)! otherwise (1-based).
inline AlMatrix al_matrix(std::int64_t l, std::int64_t s) {
  if (l < 2) throw PreconditionError("al_matrix: l must be >= 2");
  if (s == 0) throw PreconditionError("al_matrix: slope must be nonzero");
  if (l > kMaxAlSize) {
    throw CapExceeded("al_matrix: l = " + std::to_string(l) + " exceeds the cap " + std::to_string(kMaxAlSize) +
                      " (entries overflow double precision)");
  }
  AlMatrix A{l, s, std::vector<std::vector<BigInt>>(l, std::vector<BigInt>(l))};
  for (std::int64_t i = 1; i <= l; ++i) {
    for (std::int64_t j = 1; j <= l; ++j) {
      A.entries[i - 1][j - 1] = (i == 1 && j == 1) ? BigInt((1 + std::abs(s)) * l - 1) : exact_factorial(i + j - 3);
    }
  }
  return A;
}

inline double al_min_eigenvalue(const AlMatrix& A) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.to_dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("al_min_eigenvalue: eigensolver failed");
  return es.eigenvalues()(0);
}

namespace detail {

inline void require_self_adjoint_diagonal(const DiagonalElement& a, const char* op) {
  if (!is_self_adjoint(a.to_torus(), 1e-10)) throw NotSelfAdjoint(std::string(op) + ": element is not self-adjoint");
}

}  // namespace detail

/// 2 sum_{i,j} A_l(i,j) C(i,l) conj(C(j,l)): the coefficient of r^{2(1+|s|)l} in G.
inline double g_coefficient_diagonal(std::int64_t l, const DiagonalElement& a) {
  detail::require_self_adjoint_diagonal(a, "g_coefficient_diagonal");
  const AlMatrix A = al_matrix(l, a.slope());
  std::vector<Complex> C(static_cast<std::size_t>(l));
  for (std::int64_t t = 1; t <= l; ++t) C[t - 1] = C_tl(t, l, a);
  Complex acc{};
  for (std::int64_t i = 0; i < l; ++i) {
    for (std::int64_t j = 0; j < l; ++j) {
      if (C[i] == Complex{} || C[j] == Complex{}) continue;
      acc += A.entries[i][j].convert_to<double>() * C[i] * std::conj(C[j]);
    }
  }
  return 2.0 * acc.real();
}

/// l -> coefficient of r^{2(1+|s|)l} in tau(x_r^k), for 2 <= l <= max_l:
/// (-1)^k k! sum_{t=1}^{k-1} C(t,l) conj(C(k-t,l)).
inline std::map<std::int64_t, Complex> tau_power_diagonal(const DiagonalElement& a, std::int64_t k, std::int64_t max_l) {
  if (k < 3) throw PreconditionError("tau_power_diagonal: k must be >= 3");
  std::map<std::int64_t, Complex> out;
  const double sign_fact = ((k % 2 == 0) ? 1.0 : -1.0) * factorial_value(k);
  for (std::int64_t l = 2; l <= max_l; ++l) {
    std::vector<Complex> C(static_cast<std::size_t>(k));
    for (std::int64_t t = 1; t < k; ++t) C[t] = C_tl(t, l, a);
    Complex acc{};
    for (std::int64_t t = 1; t < k; ++t) acc += C[t] * std::conj(C[k - t]);
    out.emplace(l, sign_fact * acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Taylor coefficients of G(r)

struct GCoefficients {
  DilationMode mode;
  std::map<std::int64_t, double> by_degree;
  double imag_residual = 0.0;

  [[nodiscard]] std::string mode_label() const {
    return mode.kind == DilationMode::Kind::kDiagonal ? "diagonal(s=" + std::to_string(mode.slope) + ")" : "general";
  }

  [[nodiscard]] double coefficient(std::int64_t degree) const {
    const auto it = by_degree.find(degree);
    return it == by_degree.end() ? 0.0 : it->second;
  }

  /// Smallest coefficient over the stored degrees (0 when nothing is stored).
  [[nodiscard]] double min_coefficient() const {
    double m = 0.0;
    bool first = true;
    for (const auto& [d, v] : by_degree) {
      m = first ? v : std::min(m, v);
      first = false;
    }
    return m;
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = mode_label();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [d, v] : by_degree) arr.push_back({{"degree", d}, {"value", v}});
    j["coeffs"] = std::move(arr);
    j["imag_residual"] = imag_residual;
    return j;
  }
};

namespace detail {

inline GCoefficients g_taylor_impl(const TorusElement& a, DilationMode mode, std::int64_t max_degree) {
  if (max_degree < 0) throw PreconditionError("g_taylor: max_degree must be nonnegative");
  if (!is_self_adjoint(a, 1e-10)) throw NotSelfAdjoint("g_taylor: element is not self-adjoint");
  const GradedElement x = dilate(a, mode);

  std::map<std::int64_t, Complex> acc;
  // quadratic part: energy + ||x_r||^2 / 2 - 3/2 tau(x_r^2)
  for (const auto& [idx, c] : a.coeffs()) {
    if (idx.is_zero()) continue;
    const std::int64_t w = idx.weight();
    if (2 * w <= max_degree) acc[2 * w] += static_cast<double>(w - 1) * std::norm(c);
  }
  // 2 sum_{k>=3} (-1)^k (k-3)!/k! tau(x_r^k); x_r^k starts at degree k * min_degree
  const std::int64_t dmin = x.min_degree();
  if (dmin > 0) {
    GradedElement power = multiply_graded(x, x, max_degree);
    for (std::int64_t k = 3; k * dmin <= max_degree; ++k) {
      power = multiply_graded(power, x, max_degree);
      const double weight = 2.0 * ((k % 2 == 0) ? 1.0 : -1.0) / static_cast<double>(k * (k - 1) * (k - 2));
      const RPoly t = trace_graded(power);
      for (std::size_t d = 0; d < t.size(); ++d) {
        if (t[d] != Complex{}) acc[static_cast<std::int64_t>(d)] += weight * t[d];
      }
    }
  }

  GCoefficients out{mode, {}, 0.0};
  for (std::int64_t d = 2; d <= max_degree; d += 2) {
    if (mode.kind == DilationMode::Kind::kDiagonal && d % (2 * (1 + std::abs(mode.slope))) != 0) continue;
    const Complex v = acc.contains(d) ? acc.at(d) : Complex{};
    out.by_degree.emplace(d, v.real());
    out.imag_residual = std::max(out.imag_residual, std::abs(v.imag()));
  }
  for (const auto& [d, v] : acc) {
    if (!out.by_degree.contains(d)) out.imag_residual = std::max(out.imag_residual, std::abs(v));
  }
  return out;
}

}  // namespace detail

/// Exact Taylor coefficients of G(r) up to r^max_degree, general grading
/// (mode (m,n) at degree |m|+|n|). Every even degree is reported.
inline GCoefficients g_taylor(const TorusElement& a, std::int64_t max_degree) {
  return detail::g_taylor_impl(a, DilationMode::general(), max_degree);
}

/// Diagonal grading; reports the degrees 2(1+|s|)l only.
inline GCoefficients g_taylor(const DiagonalElement& a, std::int64_t max_degree) {
  return detail::g_taylor_impl(a.to_torus(), DilationMode::diagonal(a.slope()), max_degree);
}

// ---------------------------------------------------------------------------
// General class: permutation sums

/// sum_{j<i} (m_j n_i - m_i n_j).
inline std::int64_t d_sigma(const std::vector<LatticeIndex>& word) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) acc += word[j].m * word[i].n - word[i].m * word[j].n;
  }
  return acc;
}

inline constexpr std::int64_t kMaxPermutationSize = 8;
inline constexpr std::int64_t kMaxGeneralPower = 6;
inline constexpr std::size_t kMaxGeneralPairs = 4;

struct PermutationSum {
  Complex value;
  std::int64_t permutations = 0;
};

/// Multiset with P(mu) copies of mu and Q(mu) copies of -mu, sorted.
inline std::vector<LatticeIndex> combined_multiset(const LatticeMultiIndex& P, const LatticeMultiIndex& Q) {
  std::vector<LatticeIndex> word;
  for (const auto& [mu, c] : P.counts()) word.insert(word.end(), static_cast<std::size_t>(c), mu);
  for (const auto& [mu, c] : Q.counts()) word.insert(word.end(), static_cast<std::size_t>(c), -mu);
  std::sort(word.begin(), word.end());
  return word;
}

/// sum over distinct permutations sigma of the multiset of e^{i pi theta D_sigma}.
inline PermutationSum b_pq_sum(const LatticeMultiIndex& P, const LatticeMultiIndex& Q, double theta) {
  std::vector<LatticeIndex> word = combined_multiset(P, Q);
  if (static_cast<std::int64_t>(word.size()) > kMaxPermutationSize) {
    throw CapExceeded("b_pq: multiset size " + std::to_string(word.size()) + " exceeds the cap " +
                      std::to_string(kMaxPermutationSize));
  }
  PermutationSum out{Complex{}, 0};
  do {
    out.value += half_turn_phase(d_sigma(word), theta);
    ++out.permutations;
  } while (std::next_permutation(word.begin(), word.end()));
  return out;
}

inline Complex b_pq(const LatticeMultiIndex& P, const LatticeMultiIndex& Q, double theta) {
  return b_pq_sum(P, Q, theta).value;
}

inline Complex b_pq(const LatticeMultiIndex& P, const LatticeMultiIndex& Q, const ThetaParam& theta) {
  return b_pq(P, Q, theta.value());
}

/// Canonical representative of the pair {mu, -mu}: m >= 0, n >= 0, or m > 0, n < 0.
inline LatticeIndex pair_representative(LatticeIndex mu) {
  const bool first = (mu.m >= 0 && mu.n >= 0) || (mu.m > 0 && mu.n < 0);
  return first ? mu : -mu;
}

/// Representatives of the conjugate pairs in the nonconstant support of `a`.
inline std::vector<LatticeIndex> pair_representatives(const TorusElement& a) {
  std::vector<LatticeIndex> reps;
  for (const auto& [idx, c] : a.coeffs()) {
    if (!idx.is_zero()) reps.push_back(pair_representative(idx));
  }
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  return reps;
}

namespace detail {

/// All (P, Q) over `reps` with |P| + |Q| = k and sum P mu = sum Q mu; the
/// callback receives the two count vectors.
template <class F>
void for_each_balanced_pair(const std::vector<LatticeIndex>& reps, std::int64_t k, F&& f) {
  const std::size_t r = reps.size();
  std::vector<std::int64_t> counts(2 * r, 0);  // [P..., Q...]
  auto rec = [&](auto&& self, std::size_t i, std::int64_t left, LatticeIndex balance) -> void {
    if (i == 2 * r) {
      if (left == 0 && balance.is_zero()) {
        LatticeMultiIndex::Counts p, q;
        for (std::size_t j = 0; j < r; ++j) {
          if (counts[j] > 0) p.emplace(reps[j], counts[j]);
          if (counts[r + j] > 0) q.emplace(reps[j], counts[r + j]);
        }
        f(LatticeMultiIndex(std::move(p)), LatticeMultiIndex(std::move(q)));
      }
      return;
    }
    const LatticeIndex mu = reps[i % r];
    const bool is_q = i >= r;
    for (std::int64_t c = 0; c <= left; ++c) {
      counts[i] = c;
      const LatticeIndex step{c * mu.m, c * mu.n};
      self(self, i + 1, left - c, is_q ? balance - step : balance + step);
    }
    counts[i] = 0;
  };
  rec(rec, 0, k, LatticeIndex{});
}

}  // namespace detail

/// tau(x_r^k) assembled from balanced pairs (P, Q) over conjugate-pair
/// representatives: prod a^P conj(a)^Q e^{i pi theta sum (P-Q) mn} B_{P,Q}
/// at r-degree sum (P+Q)(|m|+|n|).
inline RPoly tau_power_general(const TorusElement& a, std::int64_t k) {
  if (k < 3) throw PreconditionError("tau_power_general: k must be >= 3");
  if (!is_self_adjoint(a, 1e-10)) throw NotSelfAdjoint("tau_power_general: element is not self-adjoint");
  if (std::abs(trace(a) - Complex{1.0}) > 1e-12) throw NormalizationError("tau_power_general: requires tau(a) = 1");
  const auto reps = pair_representatives(a);
  if (reps.size() > kMaxGeneralPairs || k > kMaxGeneralPower) {
    throw CapExceeded("tau_power_general: needs at most " + std::to_string(kMaxGeneralPairs) +
                      " conjugate pairs and k <= " + std::to_string(kMaxGeneralPower));
  }
  const double theta = a.theta().value();
  RPoly out;
  detail::for_each_balanced_pair(reps, k, [&](const LatticeMultiIndex& P, const LatticeMultiIndex& Q) {
    Complex term = 1.0;
    std::int64_t phase = 0;
    std::int64_t degree = 0;
    for (const auto& mu : reps) {
      const std::int64_t p = P.count(mu), q = Q.count(mu);
      if (p == 0 && q == 0) continue;
      const Complex c = a.coeff(mu);
      term *= std::pow(c, static_cast<int>(p)) * std::pow(std::conj(c), static_cast<int>(q));
      phase += (p - q) * mu.m * mu.n;
      degree += (p + q) * mu.weight();
    }
    if (term == Complex{}) return;
    term *= half_turn_phase(phase, theta) * b_pq(P, Q, theta);
    if (out.size() <= static_cast<std::size_t>(degree)) out.resize(static_cast<std::size_t>(degree) + 1);
    out[static_cast<std::size_t>(degree)] += term;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Rank-one factorization search for B_{P,Q}

struct BpqBlock {
  LatticeIndex balance;  // sum P mu = sum Q mu
  std::int64_t p_size = 0;
  std::vector<LatticeMultiIndex> rows;  // P
  std::vector<LatticeMultiIndex> cols;  // Q
  Eigen::MatrixXcd values;
  std::int64_t rank = 0;
  double sigma_ratio = 0.0;  // sigma_2 / sigma_1
  double worst_minor = 0.0;  // largest |B_{P1,Q1} B_{P2,Q2} - B_{P1,Q2} B_{P2,Q1}|
};

struct BpqFactorizationReport {
  std::int64_t k = 0;
  double theta = 0.0;
  std::vector<BpqBlock> blocks;
  std::int64_t max_rank = 0;
  double worst_sigma_ratio = 0.0;
  double max_imag_ratio = 0.0;  // max |Im b_pq| / #permutations
  std::int64_t pairs = 0;
};

inline std::string describe(const LatticeMultiIndex& P) {
  std::string s = "{";
  bool first = true;
  for (const auto& [mu, c] : P.counts()) {
    if (!first) s += ", ";
    s += "(" + std::to_string(mu.m) + "," + std::to_string(mu.n) + "):" + std::to_string(c);
    first = false;
  }
  return s + "}";
}

/// Groups the balanced pairs at size k into blocks of fixed (sum P mu, |P|) and
/// measures the numerical rank of each block (threshold 1e-9 sigma_1). A
/// factorization B_{P,Q} = B_P B_Q forces every block to have rank <= 1.
inline BpqFactorizationReport check_bpq_factorization(std::vector<LatticeIndex> support, std::int64_t k, double theta) {
  if (k < 1) throw PreconditionError("check_bpq_factorization: k must be >= 1");
  if (k > kMaxPermutationSize) {
    throw CapExceeded("check_bpq_factorization: k exceeds the cap " + std::to_string(kMaxPermutationSize));
  }
  for (auto& mu : support) {
    if (mu.is_zero()) throw PreconditionError("check_bpq_factorization: support must avoid (0,0)");
    mu = pair_representative(mu);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.size() > kMaxGeneralPairs) {
    throw CapExceeded("check_bpq_factorization: at most " + std::to_string(kMaxGeneralPairs) + " conjugate pairs");
  }

  struct Cell {
    LatticeMultiIndex P, Q;
    Complex b;
  };
  std::map<std::pair<LatticeIndex, std::int64_t>, std::vector<Cell>> groups;
  BpqFactorizationReport report;
  report.k = k;
  report.theta = theta;
  detail::for_each_balanced_pair(support, k, [&](const LatticeMultiIndex& P, const LatticeMultiIndex& Q) {
    LatticeIndex balance{};
    for (const auto& [mu, c] : P.counts()) balance = balance + LatticeIndex{c * mu.m, c * mu.n};
    const PermutationSum sum = b_pq_sum(P, Q, theta);
    report.max_imag_ratio =
        std::max(report.max_imag_ratio, std::abs(sum.value.imag()) / static_cast<double>(sum.permutations));
    groups[{balance, P.total()}].push_back({P, Q, sum.value});
    ++report.pairs;
  });

  for (auto& [key, cells] : groups) {
    BpqBlock block;
    block.balance = key.first;
    block.p_size = key.second;
    auto index_of = [](std::vector<LatticeMultiIndex>& list, const LatticeMultiIndex& m) {
      const auto it = std::find(list.begin(), list.end(), m);
      if (it != list.end()) return static_cast<std::size_t>(it - list.begin());
      list.push_back(m);
      return list.size() - 1;
    };
    std::vector<std::tuple<std::size_t, std::size_t, Complex>> entries;
    for (const auto& cell : cells) entries.emplace_back(index_of(block.rows, cell.P), index_of(block.cols, cell.Q), cell.b);
    block.values = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(block.rows.size()),
                                          static_cast<Eigen::Index>(block.cols.size()));
    for (const auto& [i, j, b] : entries) block.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b;

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block.values);
    const auto& sv = svd.singularValues();
    const double s1 = sv.size() > 0 ? sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-9 * s1) ++block.rank;
    }
    block.sigma_ratio = (sv.size() > 1 && s1 > 0.0) ? sv(1) / s1 : 0.0;
    const auto& B = block.values;
    for (Eigen::Index i1 = 0; i1 < B.rows(); ++i1) {
      for (Eigen::Index i2 = i1 + 1; i2 < B.rows(); ++i2) {
        for (Eigen::Index j1 = 0; j1 < B.cols(); ++j1) {
          for (Eigen::Index j2 = j1 + 1; j2 < B.cols(); ++j2) {
            block.worst_minor =
                std::max(block.worst_minor, std::abs(B(i1, j1) * B(i2, j2) - B(i1, j2) * B(i2, j1)));
          }
        }
      }
    }
    report.max_rank = std::max(report.max_rank, block.rank);
    report.worst_sigma_ratio = std::max(report.worst_sigma_ratio, block.sigma_ratio);
    report.blocks.push_back(std::move(block));
  }
  return report;
}

inline BpqFactorizationReport check_bpq_factorization(std::vector<LatticeIndex> support, std::int64_t k,
                                                      const ThetaParam& theta) {
  return check_bpq_factorization(std::move(support), k, theta.value());
}

inline nlohmann::ordered_json to_json(const BpqFactorizationReport& r) {
  nlohmann::ordered_json j;
  j["k"] = r.k;
  j["theta"] = r.theta;
  j["pairs"] = r.pairs;
  j["max_rank"] = r.max_rank;
  j["worst_sigma_ratio"] = r.worst_sigma_ratio;
  j["max_imag_ratio"] = r.max_imag_ratio;
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& b : r.blocks) {
    nlohmann::ordered_json jb;
    jb["balance"] = {b.balance.m, b.balance.n};
    jb["p_size"] = b.p_size;
    jb["rows"] = b.rows.size();
    jb["cols"] = b.cols.size();
    jb["rank"] = b.rank;
    jb["sigma_ratio"] = b.sigma_ratio;
    jb["worst_minor"] = b.worst_minor;
    if (b.rank > 1) {
      auto rows = nlohmann::ordered_json::array();
      for (const auto& P : b.rows) rows.push_back(describe(P));
      auto cols = nlohmann::ordered_json::array();
      for (const auto& Q : b.cols) cols.push_back(describe(Q));
      jb["P"] = std::move(rows);
      jb["Q"] = std::move(cols);
    }
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

}  // namespace nct
