#include "robust_mdp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "robust_mdp/errors.hpp"
#include "robust_mdp/rng.hpp"

namespace robust_mdp {

namespace {

constexpr std::uint64_t kGenerativeStream = 0x67656e;  // "gen"
constexpr std::uint64_t kOfflinePairStream = 0x6f6670;
constexpr std::uint64_t kOfflineNextStream = 0x6f666e;

std::vector<double> cumulative(std::span<const double> p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  return c;
}

// Inverse-CDF draw. Zero-probability entries are never returned; a uniform
// beyond the round-off total maps to the last supported index.
std::size_t draw(std::span<const double> cdf, double u) {
  const double scaled = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), scaled);
  if (it == cdf.end()) {
    std::size_t j = cdf.size() - 1;
    while (j > 0 && cdf[j] == cdf[j - 1]) --j;
    return j;
  }
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

void validate_counts(const TransitionCounts& c) {
  if (c.visit.size() != c.num_pairs() || c.next.size() != c.num_pairs() * c.num_states) {
    throw Error(ErrorCode::DimensionMismatch, "counts must be S*A visits and (S*A) x S next");
  }
  for (std::size_t sa = 0; sa < c.num_pairs(); ++sa) {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < c.num_states; ++j) total += c.next[sa * c.num_states + j];
    if (total != c.visit[sa]) {
      throw Error(ErrorCode::DimensionMismatch,
                  "next counts of pair " + std::to_string(sa) + " do not sum to visit");
    }
  }
}

BehaviorDistribution BehaviorDistribution::from_probs(std::vector<double> probs) {
  if (probs.empty()) throw Error(ErrorCode::InvalidParams, "empty behavior distribution");
  double sum = 0.0;
  for (double x : probs) {
    if (!(x >= 0.0)) throw Error(ErrorCode::InvalidParams, "negative behavior probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidParams, "behavior distribution must sum to 1");
  }
  BehaviorDistribution mu;
  mu.mu_min = *std::min_element(probs.begin(), probs.end());
  mu.probs = std::move(probs);
  return mu;
}

BehaviorDistribution BehaviorDistribution::uniform(std::size_t num_pairs) {
  BehaviorDistribution mu;
  mu.probs.assign(num_pairs, 1.0 / static_cast<double>(num_pairs));
  mu.mu_min = mu.probs.front();
  return mu;
}

TransitionCounts sample_generative(const TabularMDP& m, std::uint64_t n_per_pair,
                                   std::uint64_t seed) {
  if (n_per_pair < 1) throw Error(ErrorCode::InvalidParams, "n_per_pair must be >= 1");
  TransitionCounts c;
  c.num_states = m.num_states;
  c.num_actions = m.num_actions;
  c.visit.assign(m.num_pairs(), n_per_pair);
  c.next.assign(m.num_pairs() * m.num_states, 0);

  const auto pairs = static_cast<std::int64_t>(m.num_pairs());
#pragma omp parallel for schedule(static)
  for (std::int64_t sa = 0; sa < pairs; ++sa) {
    const std::span<const double> row(m.kernel.data() + sa * m.num_states, m.num_states);
    const std::vector<double> cdf = cumulative(row);
    std::uint64_t* out = c.next.data() + sa * m.num_states;
    const auto s = static_cast<std::uint64_t>(sa) / m.num_actions;
    const auto a = static_cast<std::uint64_t>(sa) % m.num_actions;
    for (std::uint64_t i = 0; i < n_per_pair; ++i) {
      ++out[draw(cdf, uniform01({seed, kGenerativeStream, s, a, i}))];
    }
  }
  return c;
}

TransitionCounts sample_offline(const TabularMDP& m, const BehaviorDistribution& mu,
                                std::uint64_t n_total, std::uint64_t seed) {
  if (n_total < 1) throw Error(ErrorCode::InvalidParams, "n_total must be >= 1");
  if (mu.probs.size() != m.num_pairs()) {
    throw Error(ErrorCode::DimensionMismatch, "behavior distribution must cover S*A pairs");
  }
  TransitionCounts c;
  c.num_states = m.num_states;
  c.num_actions = m.num_actions;
  c.visit.assign(m.num_pairs(), 0);
  c.next.assign(m.num_pairs() * m.num_states, 0);

  const std::vector<double> pair_cdf = cumulative(mu.probs);
  std::vector<std::vector<double>> row_cdf(m.num_pairs());
  for (std::size_t sa = 0; sa < m.num_pairs(); ++sa) {
    row_cdf[sa] = cumulative({m.kernel.data() + sa * m.num_states, m.num_states});
  }

  const auto n = static_cast<std::int64_t>(n_total);
#pragma omp parallel
  {
    std::vector<std::uint64_t> visit(c.visit.size(), 0);
    std::vector<std::uint64_t> next(c.next.size(), 0);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      const std::size_t sa = draw(pair_cdf, uniform01({seed, kOfflinePairStream, idx}));
      const std::size_t s_next = draw(row_cdf[sa], uniform01({seed, kOfflineNextStream, idx}));
      ++visit[sa];
      ++next[sa * m.num_states + s_next];
    }
    // Integer sums: the merge order cannot change the result.
#pragma omp critical
    {
      for (std::size_t k = 0; k < visit.size(); ++k) c.visit[k] += visit[k];
      for (std::size_t k = 0; k < next.size(); ++k) c.next[k] += next[k];
    }
  }
  return c;
}

TabularMDP empirical_kernel(const TransitionCounts& counts, const TabularMDP& base,
                            ZeroVisit zero_visit) {
  validate_counts(counts);
  if (counts.num_states != base.num_states || counts.num_actions != base.num_actions) {
    throw Error(ErrorCode::DimensionMismatch, "counts and base MDP dimensions differ");
  }
  TabularMDP out = base;
  for (std::size_t s = 0; s < base.num_states; ++s) {
    for (std::size_t a = 0; a < base.num_actions; ++a) {
      const std::size_t sa = base.pair(s, a);
      auto row = out.row(s, a);
      const std::uint64_t n = counts.visit[sa];
      if (n == 0) {
        if (zero_visit == ZeroVisit::Error) {
          throw Error(ErrorCode::ZeroVisit,
                      "(s,a) = (" + std::to_string(s) + "," + std::to_string(a) + ")");
        }
        std::fill(row.begin(), row.end(), 0.0);
        row[s] = 1.0;
        continue;
      }
      const std::uint64_t* next = counts.next.data() + sa * base.num_states;
      for (std::size_t j = 0; j < base.num_states; ++j) {
        row[j] = static_cast<double>(next[j]) / static_cast<double>(n);
      }
    }
  }
  return out;
}

}  // namespace robust_mdp
