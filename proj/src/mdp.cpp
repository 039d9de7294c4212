#include "robust_mdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robust_mdp/errors.hpp"
#include "robust_mdp/rng.hpp"

namespace robust_mdp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RowNotStochastic: return "RowNotStochastic";
    case ErrorCode::RewardOutOfRange: return "RewardOutOfRange";
    case ErrorCode::BadDiscount: return "BadDiscount";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NegativeValueEntry: return "NegativeValueEntry";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ZeroVisit: return "ZeroVisit";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

NotConverged::NotConverged(std::size_t iterations, double residual)
    : Error(ErrorCode::NotConverged, "residual " + std::to_string(residual) + " after " +
                                         std::to_string(iterations) + " iterations"),
      iterations_(iterations),
      residual_(residual) {}

namespace {

constexpr double kRowSumTol = 1e-12;

bool is_probability_row(std::span<const double> row) {
  double sum = 0.0;
  for (double x : row) {
    if (!(x >= 0.0)) return false;  // also rejects NaN
    sum += x;
  }
  return std::abs(sum - 1.0) <= kRowSumTol;
}

}  // namespace

void validate_mdp(const TabularMDP& m) {
  if (m.num_states == 0 || m.num_actions == 0) {
    throw Error(ErrorCode::DimensionMismatch, "S and A must be positive");
  }
  if (m.kernel.size() != m.num_pairs() * m.num_states || m.reward.size() != m.num_pairs()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel must be (S*A) x S and reward S*A");
  }
  if (!(m.discount >= 0.0 && m.discount < 1.0)) {
    throw Error(ErrorCode::BadDiscount, "gamma = " + std::to_string(m.discount) + " not in [0,1)");
  }
  for (std::size_t s = 0; s < m.num_states; ++s) {
    for (std::size_t a = 0; a < m.num_actions; ++a) {
      if (!is_probability_row(m.row(s, a))) {
        throw Error(ErrorCode::RowNotStochastic,
                    "(s,a) = (" + std::to_string(s) + "," + std::to_string(a) + ")");
      }
      const double r = m.reward[m.pair(s, a)];
      if (!(r >= 0.0 && r <= 1.0)) {
        throw Error(ErrorCode::RewardOutOfRange,
                    "(s,a) = (" + std::to_string(s) + "," + std::to_string(a) + ")");
      }
    }
  }
}

Policy::Policy(std::size_t num_states, std::size_t num_actions, std::vector<double> probs)
    : num_states_(num_states), num_actions_(num_actions), probs_(std::move(probs)) {
  if (probs_.size() != num_states_ * num_actions_) {
    throw Error(ErrorCode::DimensionMismatch, "policy table must be S x A");
  }
  for (std::size_t s = 0; s < num_states_; ++s) {
    if (!is_probability_row(row(s))) {
      throw Error(ErrorCode::RowNotStochastic, "policy row " + std::to_string(s));
    }
  }
}

Policy Policy::deterministic(std::size_t num_actions, std::span<const std::size_t> actions) {
  std::vector<double> probs(actions.size() * num_actions, 0.0);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= num_actions) {
      throw Error(ErrorCode::DimensionMismatch, "action index out of range in state " +
                                                    std::to_string(s));
    }
    probs[s * num_actions + actions[s]] = 1.0;
  }
  return Policy(actions.size(), num_actions, std::move(probs));
}

Policy Policy::uniform(std::size_t num_states, std::size_t num_actions) {
  return Policy(num_states, num_actions,
                std::vector<double>(num_states * num_actions, 1.0 / num_actions));
}

bool Policy::is_deterministic() const {
  for (std::size_t s = 0; s < num_states_; ++s) {
    if (std::count(row(s).begin(), row(s).end(), 1.0) != 1) return false;
  }
  return true;
}

std::size_t Policy::action(std::size_t s) const {
  auto r = row(s);
  return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

void validate_policy(const TabularMDP& m, const Policy& pi) {
  if (pi.num_states() != m.num_states || pi.num_actions() != m.num_actions) {
    throw Error(ErrorCode::DimensionMismatch, "policy shape does not match the MDP");
  }
}

ValueFunction greedy_value(const TabularMDP& m, std::span<const double> q) {
  ValueFunction v(m.num_states);
  for (std::size_t s = 0; s < m.num_states; ++s) {
    auto first = q.begin() + static_cast<std::ptrdiff_t>(m.pair(s, 0));
    v[s] = *std::max_element(first, first + static_cast<std::ptrdiff_t>(m.num_actions));
  }
  return v;
}

Policy greedy_policy(const TabularMDP& m, std::span<const double> q) {
  std::vector<std::size_t> actions(m.num_states);
  for (std::size_t s = 0; s < m.num_states; ++s) {
    auto first = q.begin() + static_cast<std::ptrdiff_t>(m.pair(s, 0));
    // max_element returns the first maximum, i.e. the lowest index.
    actions[s] = static_cast<std::size_t>(
        std::max_element(first, first + static_cast<std::ptrdiff_t>(m.num_actions)) - first);
  }
  return Policy::deterministic(m.num_actions, actions);
}

double sup_distance(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

std::size_t default_max_iters(double discount, double tol) {
  if (discount <= 0.0) return 2;
  const double t = std::ceil(std::log(tol * (1.0 - discount)) / std::log(discount)) + 1.0;
  return static_cast<std::size_t>(std::max(2.0, t));
}

QFunction bellman_apply(const TabularMDP& m, std::span<const double> q) {
  const ValueFunction v = greedy_value(m, q);
  QFunction out(m.num_pairs());
  for (std::size_t sa = 0; sa < m.num_pairs(); ++sa) {
    const double* p = m.kernel.data() + sa * m.num_states;
    double ev = 0.0;
    for (std::size_t j = 0; j < m.num_states; ++j) ev += p[j] * v[j];
    out[sa] = m.reward[sa] + m.discount * ev;
  }
  return out;
}

StandardSolution standard_value_iteration(const TabularMDP& m, double tol,
                                          std::size_t max_iters) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParams, "tol must be positive");
  if (max_iters == 0) max_iters = default_max_iters(m.discount, tol);

  QFunction q(m.num_pairs(), 0.0);
  double residual = 0.0;
  std::size_t it = 0;
  while (it < max_iters) {
    QFunction next = bellman_apply(m, q);
    residual = sup_distance(next, q);
    q = std::move(next);
    ++it;
    if (residual <= tol) break;
  }
  if (residual > tol) throw NotConverged(it, residual);

  StandardSolution sol;
  sol.v = greedy_value(m, q);
  sol.policy = greedy_policy(m, q);
  sol.q = std::move(q);
  sol.iterations = it;
  sol.residual = residual;
  return sol;
}

ValueFunction standard_policy_eval(const TabularMDP& m, const Policy& pi, double tol,
                                   std::size_t max_iters) {
  validate_policy(m, pi);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParams, "tol must be positive");
  if (max_iters == 0) max_iters = default_max_iters(m.discount, tol);

  ValueFunction v(m.num_states, 0.0);
  double residual = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    ValueFunction next(m.num_states, 0.0);
    for (std::size_t s = 0; s < m.num_states; ++s) {
      for (std::size_t a = 0; a < m.num_actions; ++a) {
        const double w = pi.prob(s, a);
        if (w == 0.0) continue;
        auto p = m.row(s, a);
        double ev = 0.0;
        for (std::size_t j = 0; j < m.num_states; ++j) ev += p[j] * v[j];
        next[s] += w * (m.reward[m.pair(s, a)] + m.discount * ev);
      }
    }
    residual = sup_distance(next, v);
    v = std::move(next);
    if (residual <= tol) return v;
  }
  throw NotConverged(max_iters, residual);
}

TabularMDP make_random_mdp(std::size_t num_states, std::size_t num_actions, double discount,
                           std::uint64_t seed) {
  TabularMDP m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.discount = discount;
  m.kernel.resize(num_states * num_actions * num_states);
  m.reward.resize(num_states * num_actions);
  for (std::size_t sa = 0; sa < m.num_pairs(); ++sa) {
    double* row = m.kernel.data() + sa * num_states;
    double sum = 0.0;
    for (std::size_t j = 0; j < num_states; ++j) {
      // Exp(1) draws normalized give a flat Dirichlet row.
      row[j] = -std::log1p(-uniform01({seed, 1, sa, j}));
      sum += row[j];
    }
    for (std::size_t j = 0; j < num_states; ++j) row[j] /= sum;
    m.reward[sa] = uniform01({seed, 2, sa});
  }
  return m;
}

}  // namespace robust_mdp
