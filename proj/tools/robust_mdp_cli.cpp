// robust-mdp: command-line front end for the solver, samplers, hard-instance
// generators and the experiment harness.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "robust_mdp/drvi.hpp"
#include "robust_mdp/errors.hpp"
#include "robust_mdp/experiments.hpp"
#include "robust_mdp/hard_instances.hpp"
#include "robust_mdp/mdp_io.hpp"
#include "robust_mdp/sampling.hpp"

namespace {

using namespace robust_mdp;
using nlohmann::json;

struct SolveArgs {
  std::string mdp, div = "tv", out;
  double sigma = 0.0, tol = 1e-10;
};
struct EvalArgs {
  std::string mdp, policy, div = "tv", analytic;
  double sigma = 0.0, tol = 1e-10;
};
struct SampleArgs {
  std::string mdp, out;
  std::uint64_t n = 1, seed = 0;
  bool offline = false;
};
struct InstanceArgs {
  std::string kind, out;
  double gamma = 0.9, sigma = 0.1, eps = 0.01, c0 = 0.125;
  std::size_t S = 3, A = 2;
};
struct ExperimentArgs {
  std::string config, out;
  int jobs = 1;
  bool wall_time = false;
};

std::string stem_of(const std::string& out) {
  const std::string ext = ".json";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size());
  }
  return out;
}

int run_solve(const SolveArgs& args) {
  const TabularMDP m = io::read_mdp(args.mdp);
  SolverOptions opts;
  opts.tol = args.tol;
  opts.parallel = false;
  const SolveReport rep = drvi(m, {parse_divergence(args.div), args.sigma}, opts);
  io::write_json(args.out, io::to_json(rep));
  std::cout << "iterations " << rep.iterations << " residual " << rep.residual << '\n';
  return 0;
}

int run_eval(const EvalArgs& args) {
  const TabularMDP m = io::read_mdp(args.mdp);
  const Policy pi = io::policy_from_json(io::read_json(args.policy), m.num_actions);
  const UncertaintySpec u{parse_divergence(args.div), args.sigma};
  SolverOptions opts;
  opts.tol = args.tol;
  opts.parallel = false;

  const ValueFunction v = robust_policy_eval(m, u, pi, opts);
  const ValueFunction v_star = drvi(m, u, opts).v_final;
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < m.num_states; ++s) gap = std::max(gap, v_star[s] - v[s]);

  json result{{"v", v}, {"gap", gap}};
  if (!args.analytic.empty()) {
    const json params = io::read_json(args.analytic);
    const int phi = params.value("phi", 0);
    // Padded actions a >= 2 copy action 1, so only pi(0|0) matters.
    const double p00 = pi.prob(0, 0);
    const double pi_phi = phi == 0 ? p00 : 1.0 - p00;
    const std::string kind = params.value("divergence", std::string("tv"));
    result["analytic_v"] = kind == "chi2"
                               ? chi2_analytic_value(io::chi2_params_from_json(params), pi_phi)
                               : tv_analytic_value(io::tv_params_from_json(params), pi_phi);
  }
  std::cout << result.dump() << '\n';
  return 0;
}

int run_sample(const SampleArgs& args) {
  const TabularMDP m = io::read_mdp(args.mdp);
  const TransitionCounts c =
      args.offline
          ? sample_offline(m, BehaviorDistribution::uniform(m.num_pairs()), args.n, args.seed)
          : sample_generative(m, args.n, args.seed);
  io::write_json(args.out, io::to_json(c));
  return 0;
}

int run_instance(const InstanceArgs& args) {
  const std::string stem = stem_of(args.out);
  for (int phi : {0, 1}) {
    const std::string base = stem + ".phi" + std::to_string(phi);
    if (args.kind == "tv") {
      TvInstanceParams p;
      p.num_states = args.S;
      p.num_actions = args.A;
      p.gamma = args.gamma;
      p.sigma = args.sigma;
      p.epsilon = args.eps;
      p.c0 = args.c0;
      p.phi = phi;
      io::write_mdp(base + ".json", build_tv_instance(p));
      io::write_json(base + ".params.json", io::to_json(p));
    } else {
      Chi2InstanceParams p;
      p.num_states = args.S;
      p.num_actions = args.A;
      p.gamma = args.gamma;
      p.sigma = args.sigma;
      p.epsilon = args.eps;
      p.phi = phi;
      io::write_mdp(base + ".json", build_chi2_instance(p));
      io::write_json(base + ".params.json", io::to_json(p));
    }
    std::cout << base << ".json\n";
  }
  return 0;
}

int run_experiment_cmd(const ExperimentArgs& args) {
  const ExperimentConfig cfg = config_from_json(io::read_json(args.config));
  RunOptions opts;
  opts.jobs = args.jobs;
  opts.wall_time = args.wall_time;
  const auto records = run_experiment(cfg, opts);
  std::ofstream out(args.out);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + args.out);
  write_csv(out, records);
  for (const auto& g : summarize(records)) {
    std::cout << "sigma " << g.sigma << " n " << g.n << " mean_gap " << g.mean << " se "
              << g.std_error << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust value iteration for tabular MDPs"};
  app.require_subcommand(1);
  const std::vector<std::string> divergences{"tv", "chi2"};

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run DRVI and write a solve report");
  solve_cmd->add_option("--mdp", solve.mdp, "MDP JSON file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--div", solve.div, "tv | chi2")->required()->check(CLI::IsMember(divergences));
  solve_cmd->add_option("--sigma", solve.sigma, "uncertainty radius")->required();
  solve_cmd->add_option("--tol", solve.tol, "sup-norm stopping tolerance");
  solve_cmd->add_option("--out", solve.out, "report JSON path")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Robust value and gap of a policy");
  eval_cmd->add_option("--mdp", eval.mdp)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--policy", eval.policy, "policy JSON file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--div", eval.div)->required()->check(CLI::IsMember(divergences));
  eval_cmd->add_option("--sigma", eval.sigma)->required();
  eval_cmd->add_option("--tol", eval.tol);
  eval_cmd->add_option("--analytic", eval.analytic, "instance parameter sidecar; also print the closed-form value")
      ->check(CLI::ExistingFile);

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw transition counts");
  sample_cmd->add_option("--mdp", sample.mdp)->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--n", sample.n, "samples per pair (total with --offline)")->required()
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sample.seed)->required();
  sample_cmd->add_flag("--offline", sample.offline, "draw pairs from a uniform behavior distribution");
  sample_cmd->add_option("--out", sample.out)->required();

  InstanceArgs inst;
  auto* inst_cmd = app.add_subcommand("instance", "Write a hard-instance pair (phi = 0, 1)");
  inst_cmd->add_option("kind", inst.kind, "tv | chi2")->required()->check(CLI::IsMember(divergences));
  inst_cmd->add_option("--gamma", inst.gamma)->required();
  inst_cmd->add_option("--sigma", inst.sigma)->required();
  inst_cmd->add_option("--eps", inst.eps)->required();
  inst_cmd->add_option("--S", inst.S);
  inst_cmd->add_option("--A", inst.A);
  inst_cmd->add_option("--c0", inst.c0);
  inst_cmd->add_option("--out", inst.out, "output stem; writes <stem>.phi{0,1}.json and .params.json")
      ->required();

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a Monte-Carlo sweep and write CSV");
  exp_cmd->add_option("--config", exp.config)->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--out", exp.out)->required();
  exp_cmd->add_option("--jobs", exp.jobs, "trial-level threads")->envname("ROBUST_MDP_JOBS")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_flag("--wall-time", exp.wall_time, "record per-trial timings (output is then not reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "robust-mdp: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*eval_cmd) return run_eval(eval);
    if (*sample_cmd) return run_sample(sample);
    if (*inst_cmd) return run_instance(inst);
    if (*exp_cmd) return run_experiment_cmd(exp);
  } catch (const robust_mdp::Error& e) {
    std::cerr << "robust-mdp: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "robust-mdp: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
