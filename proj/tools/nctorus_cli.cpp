// nctorus: command-line front end for the verification library.
//
// Exit codes: 0 no theorem-backed violation, 1 violation on a theorem-backed
// check (diagonal class or circle baseline), 2 violation on the general
// (conjectural) check, 3 invalid input or numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "nctorus/nctorus.hpp"

using namespace nct;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 3;

struct Options {
  std::string theta = "golden";
  std::int64_t q_cap = ThetaParam::kDefaultConvergentCap;
  std::int64_t s = 0;  // 0: not given
  std::int64_t radius = 2;
  std::uint64_t seed = 42;
  std::int64_t trials = 100;
  std::int64_t max_degree = -1;
  double tol = kDefaultSlackTolerance;
  std::string out;
  std::string format = "json";
  std::string in;
  std::int64_t k = 4;
  std::string kind = "diagonal";
};

ThetaParam parse_theta(const Options& o) {
  if (o.theta == "golden") return ThetaParam::golden(o.q_cap);
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(o.theta, &used);
    if (used != o.theta.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw PreconditionError("--theta expects a number in (0,1) or 'golden', got '" + o.theta + "'");
  }
  return ThetaParam::with_convergent(v, o.q_cap);
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--theta", o.theta, "theta in (0,1) or 'golden'")->capture_default_str();
  cmd->add_option("--q", o.q_cap, "largest convergent denominator")->capture_default_str();
  cmd->add_option("--s", o.s, "diagonal slope s != 0");
  cmd->add_option("--radius", o.radius, "support radius of the generator (degree for weissler)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--max-degree", o.max_degree, "largest r-degree of G coefficients (-1: default, 0: off)");
  cmd->add_option("--tol", o.tol, "slack tolerance")->capture_default_str();
  cmd->add_option("--out", o.out, "output path");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--in", o.in, "element file to read instead of drawing a random element");
}

void emit(const nlohmann::ordered_json& j, const Options& o) {
  const std::string text = j.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw FormatError("cannot write " + o.out);
  f << text;
}

void emit_report(const InequalityReport& r, const Options& o) {
  if (o.format == "csv") {
    std::ostringstream text;
    text << kCampaignHeader << '\n' << csv_line({0, o.seed, r}) << '\n';
    if (o.out.empty()) {
      std::cout << text.str();
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw FormatError("cannot write " + o.out);
      f << text.str();
    }
    return;
  }
  emit(r.to_json(), o);
}

TorusElement input_element(const Options& o, DilationMode kind) {
  if (!o.in.empty()) return load_file(o.in);
  return gen_random_positive({kind, o.radius, 1.0, 0.05, o.seed}, parse_theta(o));
}

std::int64_t slope_of(const TorusElement& a, const Options& o) {
  if (o.s != 0) return o.s;
  if (const auto s = detect_slope(a)) return *s;
  throw PreconditionError("element is not in a diagonal class; pass --s or use verify-general");
}

int cmd_verify_diagonal(const Options& o) {
  const std::int64_t s = o.s != 0 ? o.s : 1;
  const TorusElement a = input_element(o, DilationMode::diagonal(s));
  const auto r = verify_diagonal(DiagonalElement::from_torus(a, o.in.empty() ? s : slope_of(a, o)), {o.tol, o.max_degree});
  emit_report(r, o);
  return r.verdict == Verdict::kViolated ? 1 : 0;
}

int cmd_verify_general(const Options& o) {
  const TorusElement a = input_element(o, DilationMode::general());
  const auto r = verify_general(a, {o.tol, o.max_degree});
  emit_report(r, o);
  if (r.verdict != Verdict::kViolated) return 0;
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out).parent_path();
  const fs::path dump = (dir.empty() ? fs::path(".") : dir) / ("violation-" + r.element_digest + ".json");
  store_file(a, dump.string());
  std::cerr << "conjecture violation; element written to " << dump.string() << "\n";
  return 2;
}

int cmd_weissler(const Options& o) {
  std::mt19937_64 rng(o.seed);
  const auto f = gen_random_trig(rng, o.radius);
  const auto r = verify_weissler_baseline(f, 8 * o.radius + 1, o.tol);
  auto j = r.to_json();
  if (o.format == "json") {
    auto coeffs = nlohmann::ordered_json::array();
    for (const auto& [n, c] : f) coeffs.push_back({{"n", n}, {"re", c.real()}, {"im", c.imag()}});
    j["f"] = std::move(coeffs);
    emit(j, o);
  } else {
    emit_report(r, o);
  }
  return r.verdict == Verdict::kViolated ? 1 : 0;
}

int cmd_coeffs(const Options& o) {
  const TorusElement raw = input_element(o, o.s != 0 ? DilationMode::diagonal(o.s) : DilationMode::general());
  const TorusElement a = scale(raw, 1.0 / trace(raw).real());
  GCoefficients g;
  if (o.s != 0 || (!o.in.empty() && detect_slope(a) && a.size() > 1)) {
    const std::int64_t s = slope_of(a, o);
    g = g_taylor(DiagonalElement::from_torus(a, s), o.max_degree < 0 ? 10 * (1 + std::abs(s)) : o.max_degree);
  } else {
    g = g_taylor(a, o.max_degree < 0 ? 8 : o.max_degree);
  }
  if (o.format == "csv") {
    std::ostringstream text;
    text << "degree,value\n";
    for (const auto& [d, v] : g.by_degree) text << d << ',' << format_double(v) << '\n';
    if (o.out.empty()) {
      std::cout << text.str();
    } else {
      std::ofstream(o.out, std::ios::binary) << text.str();
    }
    return 0;
  }
  emit(g.to_json(), o);
  return 0;
}

int cmd_spectrum(const Options& o) {
  const TorusElement a = input_element(o, o.s != 0 ? DilationMode::diagonal(o.s) : DilationMode::general());
  const SpectralData sd = spectrum(a);
  if (o.format == "csv") {
    std::ostringstream text;
    text << "index,eigenvalue\n";
    for (std::size_t i = 0; i < sd.eigenvalues.size(); ++i) text << i << ',' << format_double(sd.eigenvalues[i]) << '\n';
    if (o.out.empty()) {
      std::cout << text.str();
    } else {
      std::ofstream(o.out, std::ios::binary) << text.str();
    }
    return 0;
  }
  nlohmann::ordered_json j;
  j["p"] = sd.at.p;
  j["q"] = sd.at.q;
  j["min_eig"] = sd.min_eig;
  j["max_eig"] = sd.max_eig;
  j["positivity_margin"] = sd.positivity_margin;
  j["eigenvalues"] = sd.eigenvalues;
  emit(j, o);
  return 0;
}

int cmd_bpq_rank(const Options& o) {
  std::vector<LatticeIndex> support{{1, 0}, {0, 1}};
  if (!o.in.empty()) support = pair_representatives(load_file(o.in));
  const ThetaParam th = parse_theta(o);
  emit(to_json(check_bpq_factorization(support, o.k, th)), o);
  return 0;
}

int cmd_campaign(const Options& o, const std::vector<std::int64_t>& slopes, const std::string& dump_dir) {
  CampaignConfig cfg;
  if (o.kind == "diagonal") {
    cfg.kind = CampaignKind::kDiagonal;
  } else if (o.kind == "general") {
    cfg.kind = CampaignKind::kGeneral;
  } else {
    cfg.kind = CampaignKind::kWeissler;
  }
  if (!slopes.empty()) cfg.slopes = slopes;
  if (o.s != 0) cfg.slopes = {o.s};
  cfg.max_radius = o.radius;
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.theta = parse_theta(o);
  cfg.tol = o.tol;
  cfg.max_degree = o.max_degree;
  cfg.dump_dir = dump_dir;
  if (!o.out.empty()) {
    cfg.csv_path = o.out;
    cfg.json_path = fs::path(o.out).replace_extension(".json").string();
    if (cfg.json_path == cfg.csv_path) cfg.json_path += ".summary.json";
  }
  const auto res = run_campaign(cfg);
  if (o.out.empty() && o.format == "csv") {
    std::cout << kCampaignHeader << '\n';
    for (const auto& row : res.rows) std::cout << csv_line(row) << '\n';
  } else {
    std::cout << summary_json(cfg, res).dump(2) << '\n';
  }
  for (const auto& d : res.dumps) std::cerr << "conjecture violation; element written to " << d << "\n";
  return res.exit_code;
}

int cmd_selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "ok  " : "FAIL", name);
    if (!ok) ++failures;
  };
  const ThetaParam th = ThetaParam::golden(400);
  const auto U = TorusElement::monomial(th, {1, 0}), V = TorusElement::monomial(th, {0, 1});
  check("UV = e^{2 pi i theta} VU",
        l1_norm(subtract(multiply(U, V), scale(multiply(V, U), turn_phase(1, th.value())))) <= 1e-15);
  check("identity has zero slack", std::abs(verify_general(TorusElement::identity(th)).slack) <= 1e-14);
  const auto circle = verify_weissler_baseline({{0, 1.0}, {1, 0.5}, {-1, 0.5}}, 9);
  check("circle baseline on 1 + cos", circle.slack >= 0.0 && std::abs(circle.entropy - (1.0 - std::log(2.0))) <= 1e-9);

  CampaignConfig cfg;
  cfg.slopes = {1, -2};
  cfg.trials = 5;
  cfg.theta = th;
  const auto diag = run_campaign(cfg);
  check("diagonal campaign holds", diag.exit_code == 0 && diag.min_slack >= -cfg.tol && diag.min_coeff >= -1e-9);

  const DiagonalElement d(2, {{0, 1.0}, {1, {0.3, -0.1}}, {-1, std::conj(Complex{0.3, -0.1}) * turn_phase(-2, th.value())}}, th);
  check("C(1,1) closed form", std::abs(C_tl(1, 1, d) + d.coeff(1) * half_turn_phase(2, th.value())) <= 1e-15);
  check("A_5 positive semi-definite", al_min_eigenvalue(al_matrix(5, 1)) >= 0.0);
  const auto bpq = check_bpq_factorization({{1, 0}, {0, 1}}, 4, th);
  check("B_{P,Q} real", bpq.max_imag_ratio <= 1e-12);
  const auto a = gen_random_positive({DilationMode::general(), 1, 1.0, 0.05, 7}, th);
  check("store/load round trip", load(store(a)) == a);
  std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy inequality checks on the noncommutative two-torus"};
  app.require_subcommand(1);
  Options o;
  std::vector<std::int64_t> slopes;
  std::string dump_dir;

  auto* vd = app.add_subcommand("verify-diagonal", "check the inequality for a diagonal-class element");
  add_common(vd, o);
  auto* vg = app.add_subcommand("verify-general", "check the inequality for a general element");
  add_common(vg, o);
  auto* we = app.add_subcommand("weissler", "check the circle baseline on a random positive trig polynomial");
  add_common(we, o);
  auto* co = app.add_subcommand("coeffs", "Taylor coefficients of G(r)");
  add_common(co, o);
  auto* sp = app.add_subcommand("spectrum", "spectrum at the verification convergent");
  add_common(sp, o);
  auto* bp = app.add_subcommand("bpq-rank", "rank-one factorization search for B_{P,Q}");
  add_common(bp, o);
  bp->add_option("--k", o.k, "total order |P| + |Q|")->capture_default_str();
  auto* ca = app.add_subcommand("campaign", "run a randomized campaign");
  add_common(ca, o);
  ca->add_option("--trials", o.trials, "number of trials")->capture_default_str();
  ca->add_option("--kind", o.kind, "suite")->check(CLI::IsMember({"diagonal", "general", "weissler"}))->capture_default_str();
  ca->add_option("--slopes", slopes, "slopes drawn per trial (diagonal suite)");
  ca->add_option("--dump-dir", dump_dir, "where violating elements are written");
  auto* st = app.add_subcommand("selftest", "quick consistency checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vd) return cmd_verify_diagonal(o);
    if (*vg) return cmd_verify_general(o);
    if (*we) return cmd_weissler(o);
    if (*co) return cmd_coeffs(o);
    if (*sp) return cmd_spectrum(o);
    if (*bp) return cmd_bpq_rank(o);
    if (*ca) return cmd_campaign(o, slopes, dump_dir);
    if (*st) return cmd_selftest();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
