#include "robust_mdp/drvi.hpp"

#include <algorithm>
#include <limits>

#include "robust_mdp/errors.hpp"

namespace robust_mdp {

namespace {

void check_options(const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidParams, "tol must be positive");
}

}  // namespace

SolveReport drvi(const TabularMDP& m, const UncertaintySpec& u, const SolverOptions& opts) {
  check_options(opts);
  validate_uncertainty(u);
  const std::size_t max_iters =
      opts.max_iters ? opts.max_iters : default_max_iters(m.discount, opts.tol);

  SolveReport rep;
  QFunction q(m.num_pairs(), 0.0);
  if (opts.record_trace) rep.trace.push_back(q);

  double residual = 0.0;
  std::size_t it = 0;
  while (it < max_iters) {
    QFunction next = opts.parallel ? robust_bellman_apply(m, u, q)
                                   : robust_bellman_apply_serial(m, u, q);
    residual = sup_distance(next, q);
    q = std::move(next);
    ++it;
    if (opts.record_trace) rep.trace.push_back(q);
    if (residual <= opts.tol) break;
  }
  rep.converged = residual <= opts.tol;
  if (!rep.converged && opts.throw_on_nonconvergence) throw NotConverged(it, residual);

  rep.v_final = greedy_value(m, q);
  rep.policy = greedy_policy(m, q);
  rep.q_final = std::move(q);
  rep.iterations = it;
  rep.residual = residual;
  const double eps_opt = residual / (1.0 - m.discount);
  rep.policy_error_bound = 2.0 * m.discount * eps_opt / (1.0 - m.discount);
  return rep;
}

ValueFunction robust_policy_eval(const TabularMDP& m, const UncertaintySpec& u,
                                 const Policy& pi, const SolverOptions& opts) {
  check_options(opts);
  validate_policy(m, pi);
  const std::size_t max_iters =
      opts.max_iters ? opts.max_iters : default_max_iters(m.discount, opts.tol);

  ValueFunction v(m.num_states, 0.0);
  double residual = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    ValueFunction next = robust_policy_bellman_apply(m, u, pi, v, opts.parallel);
    residual = sup_distance(next, v);
    v = std::move(next);
    if (residual <= opts.tol) return v;
  }
  if (opts.throw_on_nonconvergence) throw NotConverged(max_iters, residual);
  return v;
}

double suboptimality_gap(const TabularMDP& m, const UncertaintySpec& u, const Policy& pi,
                         const ValueFunction& v_star, const SolverOptions& opts) {
  const ValueFunction v_pi = robust_policy_eval(m, u, pi, opts);
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < m.num_states; ++s) gap = std::max(gap, v_star[s] - v_pi[s]);
  return gap;
}

double suboptimality_gap(const TabularMDP& m, const UncertaintySpec& u, const Policy& pi,
                         const SolverOptions& opts) {
  return suboptimality_gap(m, u, pi, drvi(m, u, opts).v_final, opts);
}

}  // namespace robust_mdp
