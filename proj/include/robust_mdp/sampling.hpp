#pragma once

#include <cstdint>
#include <vector>

#include "robust_mdp/mdp.hpp"

namespace robust_mdp {

/// Visit counts N(s,a) and next-state counts N(s,a,s'), pair-indexed like the
/// MDP kernel.
struct TransitionCounts {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::vector<std::uint64_t> visit;  // S*A
  std::vector<std::uint64_t> next;   // (S*A) x S

  std::size_t num_pairs() const { return num_states * num_actions; }
};

/// Throws DimensionMismatch if shapes disagree or sum_s' next != visit.
void validate_counts(const TransitionCounts& c);

/// Behavior distribution mu over state-action pairs for offline data.
struct BehaviorDistribution {
  std::vector<double> probs;  // S*A, sums to 1
  double mu_min = 0.0;

  static BehaviorDistribution from_probs(std::vector<double> probs);
  static BehaviorDistribution uniform(std::size_t num_pairs);
};

enum class ZeroVisit { Error, SelfLoop };

/// n_per_pair i.i.d. next-state draws from every (s,a). Draw i of pair (s,a)
/// is keyed by (seed, s, a, i), so the result is independent of threading.
TransitionCounts sample_generative(const TabularMDP& m, std::uint64_t n_per_pair,
                                   std::uint64_t seed);

/// n_total tuples: (s,a) ~ mu, then s' ~ P(.|s,a).
TransitionCounts sample_offline(const TabularMDP& m, const BehaviorDistribution& mu,
                                std::uint64_t n_total, std::uint64_t seed);

/// Plug-in estimate P_hat(s'|s,a) = N(s,a,s') / N(s,a); reward and discount
/// copied from `base`.
TabularMDP empirical_kernel(const TransitionCounts& counts, const TabularMDP& base,
                            ZeroVisit zero_visit = ZeroVisit::Error);

}  // namespace robust_mdp
