#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nctorus/verify.hpp"

using namespace nct;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nctorus_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Generator, ZeroMagnitudeGivesIdentity) {
  const auto a = gen_random_positive({DilationMode::general(), 2, 0.0, 0.3, 1}, ThetaParam::golden());
  EXPECT_EQ(a, TorusElement::identity(ThetaParam::golden()));
}

TEST(Generator, DeterministicForFixedSeed) {
  const GeneratorSpec spec{DilationMode::diagonal(2), 3, 1.0, 0.05, 42};
  EXPECT_EQ(store(gen_random_positive(spec, ThetaParam::golden())), store(gen_random_positive(spec, ThetaParam::golden())));
  EXPECT_NE(store(gen_random_positive(spec, ThetaParam::golden())),
            store(gen_random_positive({DilationMode::diagonal(2), 3, 1.0, 0.05, 43}, ThetaParam::golden())));
  EXPECT_EQ(trial_seed(42, 7), trial_seed(42, 7));
  EXPECT_NE(trial_seed(42, 7), trial_seed(42, 8));
}

TEST(Generator, InvalidSpecs) {
  EXPECT_THROW(gen_random_positive({DilationMode::general(), 0, 1.0, 0.05, 1}, ThetaParam::golden()), PreconditionError);
  EXPECT_THROW(gen_random_positive({DilationMode::general(), 1, 1.0, 0.0, 1}, ThetaParam::golden()), PreconditionError);
}

TEST(Generator, DiagonalDrawsArePositive) {
  const auto th = ThetaParam::golden(400);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const auto a = gen_random_positive({DilationMode::diagonal(1), 3, 1.0, 0.05, rng()}, th);
    EXPECT_TRUE(is_self_adjoint(a, 1e-12));
    EXPECT_NEAR(trace(a).real(), 1.0, 1e-14);
    const auto rep = is_positive(a, 0.0);
    ASSERT_TRUE(rep.positive) << i;
    ASSERT_TRUE(rep.consistent) << i;
  }
}

TEST(Generator, MarginFloorSurvivesNormalization) {
  const auto th = ThetaParam::golden();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    const GeneratorSpec spec{DilationMode::diagonal(i % 2 ? 1 : -2), 1 + i % 3, 1.0, 0.05, rng()};
    const auto a = gen_random_positive(spec, th);
    const double tau = spec.positivity_floor + l2_norm_squared(detail::draw_generator_factor(spec, th));
    EXPECT_GE(is_positive(a, 0.0).margin * tau, spec.positivity_floor * (1 - 1e-9)) << i;
  }
}

TEST(Classify, Precedence) {
  EXPECT_EQ(classify(0.0, 0.0, 1e-7), Verdict::kHolds);
  EXPECT_EQ(classify(-5e-8, 1.0, 1e-7), Verdict::kHolds);
  EXPECT_EQ(classify(-1e-3, 1e-2, 1e-7), Verdict::kInconclusive);
  EXPECT_EQ(classify(-1e-3, 1e-5, 1e-7), Verdict::kViolated);
}

TEST(VerifyDiagonal, EqualityCases) {
  const auto th = ThetaParam::golden();
  const auto one = verify_diagonal(DiagonalElement(1, {{0, 1.0}}, th));
  EXPECT_NEAR(one.slack, 0.0, 1e-14);
  EXPECT_EQ(one.verdict, Verdict::kHolds);
  const double c = 3.0;
  const auto scaled = verify_diagonal(DiagonalElement(2, {{0, c}}, th));
  EXPECT_NEAR(scaled.entropy, c * c * std::log(c), 1e-12);
  EXPECT_NEAR(scaled.rhs, c * c * std::log(c), 1e-12);
  EXPECT_NEAR(scaled.slack, 0.0, 1e-12);
  EXPECT_NEAR(*scaled.stronger_slack, 0.0, 1e-12);
}

TEST(VerifyDiagonal, RandomDrawsHold) {
  const auto th = ThetaParam::golden();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const std::int64_t s = (i % 2 == 0) ? 1 : -2;
    const auto a = gen_random_positive({DilationMode::diagonal(s), 1 + i % 3, 1.0, 0.05, rng()}, th);
    const auto r = verify_diagonal(DiagonalElement::from_torus(a, s));
    EXPECT_GE(r.slack, -1e-7);
    EXPECT_GE(*r.stronger_slack, -1e-7);
    EXPECT_LE(*r.stronger_slack, r.slack + 1e-12);
    EXPECT_LE(std::abs(r.entropy - *r.circle_entropy), 1e-6);
    EXPECT_EQ(r.verdict, Verdict::kHolds);
    EXPECT_GE(r.min_coeff(), -1e-9);
  }
}

TEST(VerifyGeneral, IdentityAndPathConsistency) {
  const auto th = ThetaParam::golden();
  EXPECT_NEAR(verify_general(TorusElement::identity(th)).slack, 0.0, 1e-14);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5; ++i) {
    const auto a = gen_random_positive({DilationMode::diagonal(2), 2, 1.0, 0.05, rng()}, th);
    const auto viaDiagonal = verify_diagonal(DiagonalElement::from_torus(a, 2));
    const auto viaGeneral = verify_general(a);
    EXPECT_NEAR(viaDiagonal.slack, viaGeneral.slack, 1e-9);
    EXPECT_EQ(viaGeneral.label, "conjecture");
  }
}

TEST(Weissler, ConstantAndCosine) {
  const auto one = verify_weissler_baseline({{0, 1.0}}, 9);
  EXPECT_NEAR(one.slack, 0.0, 1e-15);
  const auto cosine = verify_weissler_baseline({{0, 1.0}, {1, 0.5}, {-1, 0.5}}, 9);
  EXPECT_NEAR(cosine.entropy, 1.0 - std::log(2.0), 1e-9);  // 20-digit quadrature: 0.30685281944005469058
  EXPECT_NEAR(cosine.rhs, 0.5 + 1.5 * std::log(std::sqrt(1.5)), 1e-15);
  EXPECT_GE(cosine.slack, 0.0);
  EXPECT_THROW(verify_weissler_baseline({{0, 0.5}, {1, 0.5}, {-1, 0.5}}, 9), PositivityError);
  EXPECT_THROW(verify_weissler_baseline({{0, 2.0}, {1, 0.5}}, 9), NotSelfAdjoint);
}

TEST(Weissler, RandomPolynomialsHold) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 50; ++i) {
    const auto f = gen_random_trig(rng, 1 + i % 6);
    const auto r = verify_weissler_baseline(f, 8 * 6 + 1);
    EXPECT_GE(r.slack, -1e-9);
  }
}

TEST(Campaign, EmptyCampaignWritesHeaderOnly) {
  const auto dir = scratch_dir("empty");
  CampaignConfig cfg;
  cfg.trials = 0;
  cfg.csv_path = (dir / "c.csv").string();
  cfg.json_path = (dir / "c.json").string();
  const auto res = run_campaign(cfg);
  EXPECT_EQ(res.exit_code, 0);
  EXPECT_EQ(slurp(cfg.csv_path), std::string(kCampaignHeader) + "\n");
}

TEST(Campaign, ReproducibleCsv) {
  const auto dir = scratch_dir("repro");
  for (auto kind : {CampaignKind::kDiagonal, CampaignKind::kGeneral, CampaignKind::kWeissler}) {
    CampaignConfig cfg;
    cfg.kind = kind;
    cfg.slopes = {1, -2};
    cfg.max_radius = 2;
    cfg.trials = 4;
    cfg.theta = ThetaParam::golden(400);
    cfg.csv_path = (dir / "a.csv").string();
    const auto r1 = run_campaign(cfg);
    const std::string first = slurp(cfg.csv_path);
    cfg.csv_path = (dir / "b.csv").string();
    run_campaign(cfg);
    EXPECT_EQ(first, slurp(cfg.csv_path));
    EXPECT_EQ(r1.exit_code, 0);
    EXPECT_EQ(r1.rows.size(), 4u);
  }
}

TEST(Campaign, ViolationsSetExitCodesAndDump) {
  const auto dir = scratch_dir("violations");
  const auto element = TorusElement::identity(ThetaParam::golden());
  InequalityReport bad;
  bad.element_digest = digest(element);
  bad.slack = -1.0;
  bad.verdict = Verdict::kViolated;

  CampaignConfig general;
  general.kind = CampaignKind::kGeneral;
  CampaignResult res;
  record_row(general, {3, 9, bad}, element, res, dir);
  EXPECT_EQ(res.exit_code, 2);
  ASSERT_EQ(res.dumps.size(), 1u);
  EXPECT_EQ(load_file(res.dumps[0]), element);

  CampaignConfig diagonal;
  CampaignResult res2;
  record_row(diagonal, {0, 1, bad}, element, res2, dir);
  EXPECT_EQ(res2.exit_code, 1);
  EXPECT_TRUE(res2.dumps.empty());
}

TEST(Campaign, RejectsBadConfig) {
  CampaignConfig cfg;
  cfg.trials = -1;
  EXPECT_THROW(run_campaign(cfg), PreconditionError);
  cfg.trials = 1;
  cfg.slopes = {0};
  EXPECT_THROW(run_campaign(cfg), PreconditionError);
}
