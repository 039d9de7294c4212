#include "robust_mdp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>

#include "robust_mdp/drvi.hpp"
#include "robust_mdp/errors.hpp"
#include "robust_mdp/mdp_io.hpp"
#include "robust_mdp/rng.hpp"
#include "robust_mdp/sampling.hpp"

namespace robust_mdp {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, "experiment config: " + what);
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("config: missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  require(cfg.trials >= 1, "trials >= 1");
  require(!cfg.sigmas.empty(), "sigma list must be non-empty");
  require(!cfg.sample_sizes.empty(), "sample size list must be non-empty");
  for (auto n : cfg.sample_sizes) require(n >= 1, "all sample sizes >= 1");
  require(cfg.tol > 0.0, "tol > 0");
  for (double sigma : cfg.sigmas) {
    validate_uncertainty({cfg.divergence, sigma});
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  const json inst = get<json>(j, "instance");
  const auto type = get<std::string>(inst, "type");
  if (type == "random") {
    RandomInstance r;
    r.num_states = get<std::size_t>(inst, "S");
    r.num_actions = get<std::size_t>(inst, "A");
    r.gamma = get<double>(inst, "gamma");
    r.seed = get_or<std::uint64_t>(inst, "seed", 0);
    cfg.instance = r;
  } else if (type == "tv_hard") {
    TvHardInstance h;
    h.params.num_states = get_or<std::size_t>(inst, "S", h.params.num_states);
    h.params.num_actions = get_or<std::size_t>(inst, "A", h.params.num_actions);
    h.params.gamma = get<double>(inst, "gamma");
    h.params.epsilon = get<double>(inst, "epsilon");
    h.params.c0 = get_or<double>(inst, "c0", h.params.c0);
    h.params.phi = get_or<int>(inst, "phi", h.params.phi);
    cfg.instance = h;
  } else if (type == "chi2_hard") {
    Chi2HardInstance h;
    h.params.num_states = get_or<std::size_t>(inst, "S", h.params.num_states);
    h.params.num_actions = get_or<std::size_t>(inst, "A", h.params.num_actions);
    h.params.gamma = get<double>(inst, "gamma");
    h.params.epsilon = get<double>(inst, "epsilon");
    h.params.phi = get_or<int>(inst, "phi", h.params.phi);
    cfg.instance = h;
  } else if (type == "file") {
    cfg.instance = FileInstance{get<std::string>(inst, "path")};
  } else {
    throw Error(ErrorCode::ParseError, "config: unknown instance type '" + type + "'");
  }
  cfg.instance_id = get_or<std::string>(j, "instance_id", type);
  cfg.divergence = parse_divergence(get<std::string>(j, "divergence"));
  cfg.sigmas = get<std::vector<double>>(j, "sigmas");
  if (j.contains("offline")) {
    const json off = j.at("offline");
    OfflineSpec spec;
    if (off.contains("mu") && off.at("mu").is_array()) spec.mu = get<std::vector<double>>(off, "mu");
    cfg.offline = spec;
    cfg.sample_sizes = get<std::vector<std::uint64_t>>(off, "n_total");
  } else {
    cfg.sample_sizes = get<std::vector<std::uint64_t>>(j, "n_per_pair");
  }
  cfg.trials = get_or<std::size_t>(j, "trials", 1);
  cfg.base_seed = get_or<std::uint64_t>(j, "base_seed", 0);
  cfg.tol = get_or<double>(j, "tol", 1e-10);
  validate(cfg);
  return cfg;
}

TabularMDP experiment_instance(const ExperimentConfig& cfg, double sigma) {
  return std::visit(
      [&](const auto& inst) -> TabularMDP {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, RandomInstance>) {
          return make_random_mdp(inst.num_states, inst.num_actions, inst.gamma, inst.seed);
        } else if constexpr (std::is_same_v<T, TvHardInstance>) {
          TvInstanceParams params = inst.params;
          params.sigma = sigma;
          return build_tv_instance(params);
        } else if constexpr (std::is_same_v<T, Chi2HardInstance>) {
          Chi2InstanceParams params = inst.params;
          params.sigma = sigma;
          return build_chi2_instance(params);
        } else {
          return io::read_mdp(inst.path);
        }
      },
      cfg.instance);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t sigma_index, std::size_t n_index,
                         std::size_t trial_index) {
  return hash_key({base_seed, sigma_index, n_index, trial_index});
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  const std::size_t num_sigma = cfg.sigmas.size();
  const std::size_t num_n = cfg.sample_sizes.size();
  const std::size_t total = num_sigma * num_n * cfg.trials;

  SolverOptions solver;
  solver.tol = cfg.tol;
  solver.parallel = false;

  // True model and its optimal robust value, once per radius.
  std::vector<TabularMDP> models;
  std::vector<ValueFunction> v_star;
  for (double sigma : cfg.sigmas) {
    models.push_back(experiment_instance(cfg, sigma));
    validate_mdp(models.back());
    v_star.push_back(drvi(models.back(), {cfg.divergence, sigma}, solver).v_final);
  }
  std::optional<BehaviorDistribution> mu;
  if (cfg.offline) {
    mu = cfg.offline->mu.empty() ? BehaviorDistribution::uniform(models.front().num_pairs())
                                 : BehaviorDistribution::from_probs(cfg.offline->mu);
  }

  std::vector<TrialRecord> records(total);
  std::vector<std::exception_ptr> errors(total);
  const auto count = static_cast<std::int64_t>(total);

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, opts.jobs))
  for (std::int64_t k = 0; k < count; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const std::size_t i_sigma = idx / (num_n * cfg.trials);
    const std::size_t i_n = (idx / cfg.trials) % num_n;
    const std::size_t trial = idx % cfg.trials;

    TrialRecord& rec = records[idx];
    rec.instance_id = cfg.instance_id;
    rec.divergence = cfg.divergence;
    rec.sigma = cfg.sigmas[i_sigma];
    rec.n = cfg.sample_sizes[i_n];
    rec.trial = trial;
    rec.seed = trial_seed(cfg.base_seed, i_sigma, i_n, trial);
    try {
      const auto start = std::chrono::steady_clock::now();
      const TabularMDP& truth = models[i_sigma];
      const UncertaintySpec u{cfg.divergence, rec.sigma};
      const TransitionCounts counts = mu ? sample_offline(truth, *mu, rec.n, rec.seed)
                                         : sample_generative(truth, rec.n, rec.seed);
      const TabularMDP estimate =
          empirical_kernel(counts, truth, mu ? ZeroVisit::SelfLoop : ZeroVisit::Error);
      const SolveReport rep = drvi(estimate, u, solver);
      rec.gap = suboptimality_gap(truth, u, rep.policy, v_star[i_sigma], solver);
      rec.drvi_iters = rep.iterations;
      if (opts.wall_time) {
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }

  for (std::size_t k = 0; k < total; ++k) {
    if (!errors[k]) continue;
    const TrialRecord& rec = records[k];
    const std::string where = "instance=" + rec.instance_id + " sigma=" + fmt17(rec.sigma) +
                              " n=" + std::to_string(rec.n) + " trial=" +
                              std::to_string(rec.trial) + " seed=" + std::to_string(rec.seed);
    try {
      std::rethrow_exception(errors[k]);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return records;
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "instance_id,divergence,sigma,n_per_pair,trial,seed,gap,drvi_iters,wall_time_s\n";
  for (const auto& r : records) {
    out << r.instance_id << ',' << to_string(r.divergence) << ',' << fmt17(r.sigma) << ','
        << r.n << ',' << r.trial << ',' << r.seed << ',' << fmt17(r.gap) << ','
        << r.drvi_iters << ',' << fmt17(r.wall_time_s) << '\n';
  }
}

std::vector<GapSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<GapSummary> out;
  std::vector<double> sum_sq;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const GapSummary& g) { return g.sigma == r.sigma && g.n == r.n; });
    if (it == out.end()) {
      out.push_back({r.sigma, r.n, 0, 0.0, 0.0, -std::numeric_limits<double>::infinity()});
      sum_sq.push_back(0.0);
      it = out.end() - 1;
    }
    it->count += 1;
    it->mean += r.gap;
    it->max = std::max(it->max, r.gap);
    sum_sq[static_cast<std::size_t>(it - out.begin())] += r.gap * r.gap;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    GapSummary& g = out[k];
    const double n = static_cast<double>(g.count);
    g.mean /= n;
    if (g.count > 1) {
      const double var = std::max(0.0, (sum_sq[k] - n * g.mean * g.mean) / (n - 1.0));
      g.std_error = std::sqrt(var / n);
    }
  }
  return out;
}

std::map<double, double> fit_loglog_slope(const std::vector<TrialRecord>& records) {
  std::map<double, std::vector<GapSummary>> by_sigma;
  for (const auto& g : summarize(records)) by_sigma[g.sigma].push_back(g);
  if (by_sigma.empty()) throw Error(ErrorCode::InsufficientData, "no records");

  std::map<double, double> slopes;
  for (const auto& [sigma, groups] : by_sigma) {
    const std::string tag = "sigma=" + fmt17(sigma) + ": ";
    if (groups.size() < 3) throw Error(ErrorCode::InsufficientData, tag + "need >= 3 distinct n");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& g : groups) {
      if (g.count < 20) {
        throw Error(ErrorCode::InsufficientData, tag + "need >= 20 trials per n");
      }
      if (!(g.mean > 0.0)) {
        throw Error(ErrorCode::InsufficientData,
                    tag + "mean gap is not positive at n=" + std::to_string(g.n));
      }
      const double x = std::log(static_cast<double>(g.n));
      const double y = std::log(g.mean);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(groups.size());
    slopes[sigma] = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  return slopes;
}

}  // namespace robust_mdp
