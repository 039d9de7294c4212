#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace robust_mdp {

using ValueFunction = std::vector<double>;  // indexed by state
using QFunction = std::vector<double>;      // indexed by s * A + a

/// Finite discounted MDP with a dense row-major nominal kernel.
///
/// Kernel row `s * num_actions + a` is the next-state distribution of the
/// pair (s, a); rewards share the same pair indexing.
struct TabularMDP {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<double> kernel;  // (S*A) x S
  std::vector<double> reward;  // S*A
  double discount = 0.0;

  std::size_t num_pairs() const { return num_states * num_actions; }
  std::size_t pair(std::size_t s, std::size_t a) const { return s * num_actions + a; }

  std::span<const double> row(std::size_t s, std::size_t a) const {
    return {kernel.data() + pair(s, a) * num_states, num_states};
  }
  std::span<double> row(std::size_t s, std::size_t a) {
    return {kernel.data() + pair(s, a) * num_states, num_states};
  }

  /// Sup-norm bound 1/(1-gamma) on every value and Q-function.
  double value_bound() const { return 1.0 / (1.0 - discount); }
};

/// Throws RowNotStochastic, RewardOutOfRange, BadDiscount or DimensionMismatch.
void validate_mdp(const TabularMDP& m);

/// Per-state action distribution, stored as an S x A row-major table.
class Policy {
 public:
  Policy() = default;
  Policy(std::size_t num_states, std::size_t num_actions, std::vector<double> probs);

  static Policy deterministic(std::size_t num_actions, std::span<const std::size_t> actions);
  static Policy uniform(std::size_t num_states, std::size_t num_actions);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  const std::vector<double>& probs() const { return probs_; }

  double prob(std::size_t s, std::size_t a) const { return probs_[s * num_actions_ + a]; }
  std::span<const double> row(std::size_t s) const {
    return {probs_.data() + s * num_actions_, num_actions_};
  }

  bool is_deterministic() const;
  /// Action with the largest probability in state s (lowest index on ties).
  std::size_t action(std::size_t s) const;

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> probs_;
};

void validate_policy(const TabularMDP& m, const Policy& pi);

/// V(s) = max_a Q(s, a).
ValueFunction greedy_value(const TabularMDP& m, std::span<const double> q);

/// Deterministic greedy policy, lowest action index on exact ties.
Policy greedy_policy(const TabularMDP& m, std::span<const double> q);

double sup_distance(std::span<const double> x, std::span<const double> y);

/// Default iteration cap derived from the gamma^t / (1 - gamma) rate.
std::size_t default_max_iters(double discount, double tol);

struct StandardSolution {
  QFunction q;
  ValueFunction v;
  Policy policy;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// One application of the (non-robust) Bellman optimality operator.
QFunction bellman_apply(const TabularMDP& m, std::span<const double> q);

StandardSolution standard_value_iteration(const TabularMDP& m, double tol = 1e-10,
                                          std::size_t max_iters = 0);

ValueFunction standard_policy_eval(const TabularMDP& m, const Policy& pi, double tol = 1e-10,
                                   std::size_t max_iters = 0);

/// Random MDP: Dirichlet(1, ..., 1) kernel rows and uniform [0,1] rewards,
/// fully determined by seed.
TabularMDP make_random_mdp(std::size_t num_states, std::size_t num_actions, double discount,
                           std::uint64_t seed);

}  // namespace robust_mdp
