#pragma once

#include <cstddef>
#include <vector>

#include "robust_mdp/mdp.hpp"
#include "robust_mdp/robust_bellman.hpp"

namespace robust_mdp {

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iters = 0;  // 0: derived from the gamma^t / (1-gamma) rate
  bool parallel = true;       // split Bellman rows across OpenMP threads
  bool record_trace = false;  // keep every iterate Q_t in SolveReport::trace
  bool throw_on_nonconvergence = true;
};

struct SolveReport {
  QFunction q_final;
  ValueFunction v_final;
  Policy policy;  // greedy in q_final, lowest index on ties
  std::size_t iterations = 0;
  double residual = 0.0;  // sup-norm of the last update
  bool converged = false;
  /// Bound 2 gamma eps_opt / (1 - gamma) on the sub-optimality of `policy`
  /// within the solved model, with eps_opt taken as residual / (1 - gamma).
  double policy_error_bound = 0.0;
  std::vector<QFunction> trace;  // Q_0, Q_1, ..., Q_T when requested
};

/// Distributionally robust value iteration: synchronous sweeps of the robust
/// Bellman operator from Q_0 = 0 until the sup-norm change is <= tol.
SolveReport drvi(const TabularMDP& m, const UncertaintySpec& u, const SolverOptions& opts = {});

/// Robust value of a (possibly randomized) policy, by fixed-point iteration
/// from V = 0.
ValueFunction robust_policy_eval(const TabularMDP& m, const UncertaintySpec& u,
                                 const Policy& pi, const SolverOptions& opts = {});

/// max_s (V*(s) - V^pi(s)) on the model m.
double suboptimality_gap(const TabularMDP& m, const UncertaintySpec& u, const Policy& pi,
                         const SolverOptions& opts = {});

/// Same, reusing a precomputed optimal robust value function.
double suboptimality_gap(const TabularMDP& m, const UncertaintySpec& u, const Policy& pi,
                         const ValueFunction& v_star, const SolverOptions& opts = {});

}  // namespace robust_mdp
