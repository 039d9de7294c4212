#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "robust_mdp/hard_instances.hpp"
#include "robust_mdp/mdp.hpp"
#include "robust_mdp/robust_bellman.hpp"

namespace robust_mdp {

struct RandomInstance {
  std::size_t num_states = 5;
  std::size_t num_actions = 3;
  double gamma = 0.9;
  std::uint64_t seed = 0;
};
struct TvHardInstance {
  TvInstanceParams params;  // sigma is overridden by each sweep radius
};
struct Chi2HardInstance {
  Chi2InstanceParams params;  // sigma is overridden by each sweep radius
};
struct FileInstance {
  std::string path;
};
using InstanceSpec = std::variant<RandomInstance, TvHardInstance, Chi2HardInstance, FileInstance>;

struct OfflineSpec {
  std::vector<double> mu;  // empty: uniform over S*A
};

struct ExperimentConfig {
  std::string instance_id;
  InstanceSpec instance;
  Divergence divergence = Divergence::TV;
  std::vector<double> sigmas;
  /// Samples per (s,a) for the generative model, or total tuples when
  /// `offline` is set.
  std::vector<std::uint64_t> sample_sizes;
  std::optional<OfflineSpec> offline;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  double tol = 1e-10;
};

void validate(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct TrialRecord {
  std::string instance_id;
  Divergence divergence = Divergence::TV;
  double sigma = 0.0;
  std::uint64_t n = 0;  // per pair (generative) or total (offline)
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double gap = 0.0;
  std::size_t drvi_iters = 0;
  double wall_time_s = 0.0;
};

struct RunOptions {
  int jobs = 1;            // trial-level threads
  bool wall_time = false;  // off: wall_time_s is 0 and reruns are byte-identical
};

/// Model the trials of radius `sigma` are run on. Hard instances are rebuilt
/// per radius because their transition probabilities depend on it.
TabularMDP experiment_instance(const ExperimentConfig& cfg, double sigma);

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t sigma_index, std::size_t n_index,
                         std::size_t trial_index);

/// sample -> plug-in kernel -> DRVI -> gap of the learned policy on the true
/// model, for every (sigma, n, trial). Records come back ordered by
/// (sigma index, n index, trial) whatever the job count.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Columns: instance_id, divergence, sigma, n_per_pair, trial, seed, gap,
/// drvi_iters, wall_time_s. Floats carry 17 significant digits.
void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);

struct GapSummary {
  double sigma = 0.0;
  std::uint64_t n = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double max = 0.0;
};

/// Mean, standard error and max of the gap per (sigma, n).
std::vector<GapSummary> summarize(const std::vector<TrialRecord>& records);

/// OLS slope of log(mean gap) against log n, per sigma. Needs >= 3 distinct n
/// with >= 20 trials each and a positive mean gap at every n.
std::map<double, double> fit_loglog_slope(const std::vector<TrialRecord>& records);

}  // namespace robust_mdp
