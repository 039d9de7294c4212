#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's dual solvers or iteration loops.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "robust_mdp/mdp.hpp"

namespace oracle {

using robust_mdp::TabularMDP;

inline double dot(std::span<const double> p, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * v[j];
  return s;
}

/// Dense Gaussian elimination with partial pivoting; A is n x n row-major.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (a[piv * n + c] == 0.0) throw std::runtime_error("singular system");
    for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

/// Exact non-robust value of a deterministic policy: (I - gamma P_pi)^-1 r_pi.
inline std::vector<double> policy_value(const TabularMDP& m, const std::vector<std::size_t>& act) {
  const std::size_t S = m.num_states;
  std::vector<double> a(S * S, 0.0), b(S);
  for (std::size_t s = 0; s < S; ++s) {
    const auto row = m.row(s, act[s]);
    a[s * S + s] += 1.0;
    for (std::size_t t = 0; t < S; ++t) a[s * S + t] -= m.discount * row[t];
    b[s] = m.reward[m.pair(s, act[s])];
  }
  return solve_linear(std::move(a), std::move(b));
}

/// Calls f on every deterministic policy (A^S of them).
template <typename F>
void for_each_policy(std::size_t S, std::size_t A, F&& f) {
  std::vector<std::size_t> act(S, 0);
  while (true) {
    f(act);
    std::size_t k = 0;
    while (k < S && ++act[k] == A) act[k++] = 0;
    if (k == S) return;
  }
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) s += (x = e(rng));
  for (auto& x : p) x /= s;
  return p;
}

/// Random distribution with a few exact zeros, to exercise support edges.
inline std::vector<double> random_sparse_simplex(std::mt19937_64& rng, std::size_t n) {
  auto p = random_simplex(rng, n);
  std::bernoulli_distribution drop(0.3);
  double s = 0.0;
  for (auto& x : p) {
    if (n > 1 && drop(rng)) x = 0.0;
    s += x;
  }
  if (s == 0.0) return random_simplex(rng, n);
  for (auto& x : p) x /= s;
  return p;
}

/// A point of the TV ball: a random target (vertex or interior point) pulled
/// toward P until 0.5 |Q - P|_1 <= sigma.
inline std::vector<double> tv_ball_sample(std::mt19937_64& rng, std::span<const double> p,
                                          double sigma) {
  const std::size_t n = p.size();
  std::vector<double> target;
  if (std::bernoulli_distribution(0.5)(rng)) {
    target.assign(n, 0.0);
    target[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
  } else {
    target = random_sparse_simplex(rng, n);
  }
  double d = 0.0;
  for (std::size_t j = 0; j < n; ++j) d += 0.5 * std::abs(target[j] - p[j]);
  // Full step, boundary step, or a random interior step.
  double t = d > sigma ? sigma / d : 1.0;
  if (std::bernoulli_distribution(0.2)(rng)) t *= std::uniform_real_distribution<double>(0, 1)(rng);
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = std::max(0.0, p[j] + t * (target[j] - p[j]));
  return q;
}

/// A point of the chi-square ball (supported inside supp P), scaled so that
/// sum (q - p)^2 / p <= sigma.
inline std::vector<double> chi2_ball_sample(std::mt19937_64& rng, std::span<const double> p,
                                            double sigma) {
  const std::size_t n = p.size();
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < n; ++j) {
    if (p[j] > 0.0) support.push_back(j);
  }
  std::vector<double> target(n, 0.0);
  if (std::bernoulli_distribution(0.5)(rng)) {
    target[support[std::uniform_int_distribution<std::size_t>(0, support.size() - 1)(rng)]] = 1.0;
  } else {
    const auto w = random_sparse_simplex(rng, support.size());
    for (std::size_t k = 0; k < support.size(); ++k) target[support[k]] = w[k];
  }
  double chi = 0.0;
  for (std::size_t j : support) chi += (target[j] - p[j]) * (target[j] - p[j]) / p[j];
  double t = chi > sigma ? std::sqrt(sigma / chi) : 1.0;
  if (std::bernoulli_distribution(0.2)(rng)) t *= std::uniform_real_distribution<double>(0, 1)(rng);
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = std::max(0.0, p[j] + t * (target[j] - p[j]));
  return q;
}

/// g(alpha) = P[V]_alpha - sqrt(sigma Var_P([V]_alpha)) straight from the
/// definition.
inline double chi2_objective(std::span<const double> p, std::span<const double> v, double sigma,
                             double alpha) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double x = std::min(v[j], alpha);
    m1 += p[j] * x;
  }
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double x = std::min(v[j], alpha) - m1;
    m2 += p[j] * x * x;
  }
  return m1 - std::sqrt(sigma * std::max(0.0, m2));
}

/// Maximum of g over [min V, max V] on a uniform grid of `points` nodes,
/// then two rounds of 1000-point refinement around the best node.
inline double chi2_grid_value(std::span<const double> p, std::span<const double> v, double sigma,
                              std::size_t points = 100000) {
  const double lo = *std::min_element(v.begin(), v.end());
  const double hi = *std::max_element(v.begin(), v.end());
  if (hi == lo) return chi2_objective(p, v, sigma, lo);
  auto scan = [&](double a, double b, std::size_t k, double& best_alpha) {
    double best = -INFINITY;
    for (std::size_t i = 0; i < k; ++i) {
      const double alpha = a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
      const double g = chi2_objective(p, v, sigma, alpha);
      if (g > best) {
        best = g;
        best_alpha = alpha;
      }
    }
    return best;
  };
  double alpha = lo;
  double best = scan(lo, hi, points, alpha);
  double h = (hi - lo) / static_cast<double>(points - 1);
  for (int round = 0; round < 2; ++round) {
    double a2 = alpha;
    best = std::max(best, scan(std::max(lo, alpha - h), std::min(hi, alpha + h), 1000, a2));
    alpha = a2;
    h *= 2.0 / 999.0;
  }
  return best;
}

}  // namespace oracle
