#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "robust_mdp/drvi.hpp"
#include "robust_mdp/errors.hpp"
#include "robust_mdp/experiments.hpp"
#include "robust_mdp/sampling.hpp"

using namespace robust_mdp;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.instance_id = "rand3";
  cfg.instance = RandomInstance{3, 2, 0.9, 5};
  cfg.divergence = Divergence::TV;
  cfg.sigmas = {0.1, 0.3};
  cfg.sample_sizes = {8, 64};
  cfg.trials = 4;
  cfg.base_seed = 17;
  return cfg;
}

std::string csv_of(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

std::vector<TrialRecord> planted(double sigma, const std::vector<std::uint64_t>& ns,
                                 std::size_t trials, double (*law)(double)) {
  std::vector<TrialRecord> out;
  for (auto n : ns) {
    for (std::size_t t = 0; t < trials; ++t) {
      TrialRecord r;
      r.sigma = sigma;
      r.n = n;
      r.trial = t;
      r.gap = law(static_cast<double>(n));
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace

TEST(Csv, SchemaHeaderAndPrecision) {
  TrialRecord r;
  r.instance_id = "x";
  r.divergence = Divergence::Chi2;
  r.sigma = 0.1;
  r.n = 12;
  r.trial = 3;
  r.seed = 99;
  r.gap = 1.0 / 3.0;
  r.drvi_iters = 7;
  const std::string csv = csv_of({r});
  EXPECT_EQ(csv,
            "instance_id,divergence,sigma,n_per_pair,trial,seed,gap,drvi_iters,wall_time_s\n"
            "x,chi2,0.10000000000000001,12,3,99,0.33333333333333331,7,0\n");
}

TEST(RunExperiment, OneRecordPerCellInOrder) {
  const auto cfg = small_config();
  const auto rec = run_experiment(cfg);
  ASSERT_EQ(rec.size(), 2u * 2u * 4u);
  EXPECT_EQ(rec[0].sigma, 0.1);
  EXPECT_EQ(rec[5].n, 64u);
  EXPECT_EQ(rec[5].trial, 1u);
  EXPECT_EQ(rec[15].sigma, 0.3);
  EXPECT_EQ(rec[7].seed, trial_seed(17, 0, 1, 3));
  for (const auto& r : rec) {
    EXPECT_GE(r.gap, -2 * cfg.tol);
    EXPECT_GT(r.drvi_iters, 0u);
  }
}

TEST(RunExperiment, RerunsAndJobCountsAreByteIdentical) {
  const auto cfg = small_config();
  const std::string one = csv_of(run_experiment(cfg, {1, false}));
  EXPECT_EQ(one, csv_of(run_experiment(cfg, {1, false})));
  EXPECT_EQ(one, csv_of(run_experiment(cfg, {4, false})));
}

TEST(RunExperiment, WallTimeIsOptIn) {
  auto cfg = small_config();
  cfg.trials = 1;
  for (const auto& r : run_experiment(cfg)) EXPECT_EQ(r.wall_time_s, 0.0);
  for (const auto& r : run_experiment(cfg, {1, true})) EXPECT_GT(r.wall_time_s, 0.0);
}

TEST(RunExperiment, ZeroRadiusEqualsStandardSweep) {
  auto cfg = small_config();
  cfg.sigmas = {0.0};
  const auto rec = run_experiment(cfg);
  const TabularMDP truth = make_random_mdp(3, 2, 0.9, 5);
  const auto best = standard_value_iteration(truth, 1e-12).v;
  for (const auto& r : rec) {
    const auto est = empirical_kernel(sample_generative(truth, r.n, r.seed), truth);
    const auto pi = standard_value_iteration(est, 1e-12).policy;
    const auto v = standard_policy_eval(truth, pi, 1e-12);
    double gap = -INFINITY;
    for (std::size_t s = 0; s < 3; ++s) gap = std::max(gap, best[s] - v[s]);
    EXPECT_NEAR(r.gap, gap, 1e-8) << "n=" << r.n << " trial=" << r.trial;
  }
}

TEST(RunExperiment, HardInstanceRebuiltPerRadius) {
  ExperimentConfig cfg;
  TvHardInstance h;
  h.params.gamma = 0.9;
  h.params.epsilon = 0.01;
  cfg.instance = h;
  cfg.sigmas = {0.1, 0.4};
  cfg.sample_sizes = {32};
  const auto a = experiment_instance(cfg, 0.1);
  const auto b = experiment_instance(cfg, 0.4);
  EXPECT_NE(a.kernel, b.kernel);
  EXPECT_EQ(run_experiment(cfg).size(), 2u);
}

TEST(RunExperiment, OfflineSweep) {
  auto cfg = small_config();
  cfg.offline = OfflineSpec{};
  cfg.sample_sizes = {30, 300};
  const auto rec = run_experiment(cfg);
  EXPECT_EQ(rec.size(), 16u);
  EXPECT_EQ(rec[0].n, 30u);
}

TEST(RunExperiment, ErrorsCarryCoordinates) {
  // Radius 1 is outside the TV domain; caught up front with the offending value.
  auto cfg = small_config();
  cfg.sigmas = {0.1, 1.0};
  EXPECT_THROW(run_experiment(cfg), Error);
  ExperimentConfig file_cfg = small_config();
  file_cfg.instance = FileInstance{"/nonexistent/mdp.json"};
  EXPECT_THROW(run_experiment(file_cfg), Error);
}

// Larger samples should not do worse. With 50 paired runs (trials = 1 each,
// the same base seeds for both sizes) the large-N gap must be small and
// strictly below the small-N gap in at least 80% of pairs.
TEST(RunExperiment, PairedSmallVsLargeN) {
  const double gamma = 0.9;
  int strictly_smaller = 0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    ExperimentConfig cfg;
    cfg.instance = RandomInstance{3, 2, gamma, 0};
    cfg.sigmas = {0.1};
    cfg.sample_sizes = {16, 4096};
    cfg.trials = 1;
    cfg.base_seed = t;
    const auto rec = run_experiment(cfg);
    EXPECT_LT(rec[1].gap, 0.05 / (1 - gamma));
    if (rec[1].gap < rec[0].gap) ++strictly_smaller;
  }
  EXPECT_GE(strictly_smaller, 40);
}

TEST(Config, ParsesJson) {
  const auto cfg = config_from_json(json::parse(R"({
    "instance_id": "hard",
    "instance": {"type": "chi2_hard", "gamma": 0.9, "epsilon": 0.001, "S": 4},
    "divergence": "chi2",
    "sigmas": [0.5, 1.0],
    "n_per_pair": [10, 100, 1000],
    "trials": 20,
    "base_seed": 3
  })"));
  EXPECT_EQ(cfg.instance_id, "hard");
  EXPECT_EQ(cfg.divergence, Divergence::Chi2);
  EXPECT_EQ(std::get<Chi2HardInstance>(cfg.instance).params.num_states, 4u);
  EXPECT_EQ(cfg.sample_sizes.size(), 3u);
  EXPECT_FALSE(cfg.offline);

  const auto off = config_from_json(json::parse(R"({
    "instance": {"type": "random", "S": 5, "A": 3, "gamma": 0.9},
    "divergence": "tv", "sigmas": [0.1], "offline": {"n_total": [750]}
  })"));
  ASSERT_TRUE(off.offline);
  EXPECT_EQ(off.sample_sizes, (std::vector<std::uint64_t>{750}));
}

TEST(Config, Rejects) {
  EXPECT_THROW(config_from_json(json::parse(R"({"divergence":"tv"})")), Error);
  EXPECT_THROW(config_from_json(json::parse(R"({
    "instance": {"type": "maze"}, "divergence": "tv", "sigmas": [0.1], "n_per_pair": [1]})")),
               Error);
  EXPECT_THROW(config_from_json(json::parse(R"({
    "instance": {"type": "random", "S": 2, "A": 2, "gamma": 0.9},
    "divergence": "tv", "sigmas": [], "n_per_pair": [1]})")),
               Error);
  EXPECT_THROW(config_from_json(json::parse(R"({
    "instance": {"type": "random", "S": 2, "A": 2, "gamma": 0.9},
    "divergence": "tv", "sigmas": [0.1], "n_per_pair": [0]})")),
               Error);
}

TEST(Slope, PlantedInverseSqrtLaw) {
  const auto rec = planted(0.2, {100, 400, 1600, 6400}, 20, [](double n) { return 3.0 / std::sqrt(n); });
  const auto slopes = fit_loglog_slope(rec);
  ASSERT_EQ(slopes.size(), 1u);
  EXPECT_NEAR(slopes.at(0.2), -0.5, 1e-9);
}

TEST(Slope, ConstantGapsGiveZero) {
  const auto rec = planted(0.1, {10, 100, 1000}, 25, [](double) { return 0.7; });
  EXPECT_NEAR(fit_loglog_slope(rec).at(0.1), 0.0, 1e-12);
}

TEST(Slope, InsufficientData) {
  auto code = [](const std::vector<TrialRecord>& rec) {
    try {
      fit_loglog_slope(rec);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  EXPECT_EQ(code(planted(0.1, {10, 100}, 20, [](double) { return 1.0; })), ErrorCode::InsufficientData);
  EXPECT_EQ(code(planted(0.1, {10, 100, 1000}, 19, [](double) { return 1.0; })),
            ErrorCode::InsufficientData);
  EXPECT_EQ(code(planted(0.1, {10, 100, 1000}, 20, [](double) { return 0.0; })),
            ErrorCode::InsufficientData);
  EXPECT_EQ(code({}), ErrorCode::InsufficientData);
}

TEST(Summary, MeanStdErrorMax) {
  std::vector<TrialRecord> rec(4);
  const double gaps[] = {1.0, 2.0, 3.0, 6.0};
  for (int k = 0; k < 4; ++k) {
    rec[k].sigma = 0.1;
    rec[k].n = 10;
    rec[k].gap = gaps[k];
  }
  const auto s = summarize(rec);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s[0].mean, 3.0);
  EXPECT_DOUBLE_EQ(s[0].max, 6.0);
  EXPECT_NEAR(s[0].std_error, std::sqrt(14.0 / 3.0 / 4.0), 1e-12);
}
