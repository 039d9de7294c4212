#include "robust_mdp/robust_bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "robust_mdp/errors.hpp"

namespace robust_mdp {

const char* to_string(Divergence d) { return d == Divergence::TV ? "tv" : "chi2"; }

Divergence parse_divergence(const std::string& name) {
  if (name == "tv" || name == "TV") return Divergence::TV;
  if (name == "chi2" || name == "CHI2") return Divergence::Chi2;
  throw Error(ErrorCode::ParseError, "unknown divergence '" + name + "'");
}

void validate_uncertainty(const UncertaintySpec& u) {
  if (!(u.radius >= 0.0) || !std::isfinite(u.radius)) {
    throw Error(ErrorCode::InvalidParams, "radius must be a finite non-negative number");
  }
  if (u.divergence == Divergence::TV && u.radius >= 1.0) {
    throw Error(ErrorCode::InvalidParams, "TV radius must lie in [0, 1)");
  }
}

ValueFunction clip(std::span<const double> v, double alpha) {
  ValueFunction out(v.begin(), v.end());
  for (double& x : out) x = x > alpha ? alpha : x;
  return out;
}

double variance(std::span<const double> p, std::span<const double> v) {
  double mean = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) mean += p[j] * v[j];
  double var = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double d = v[j] - mean;
    var += p[j] * d * d;
  }
  return std::max(var, 0.0);
}

ValueLevels::ValueLevels(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::DimensionMismatch, "empty value vector");
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!(v[j] >= 0.0)) {
      throw Error(ErrorCode::NegativeValueEntry, "V(" + std::to_string(j) + ") < 0");
    }
  }
  levels_.assign(v.begin(), v.end());
  std::sort(levels_.begin(), levels_.end());
  levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
  level_of_.resize(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    level_of_[j] = static_cast<std::uint32_t>(
        std::lower_bound(levels_.begin(), levels_.end(), v[j]) - levels_.begin());
  }
}

namespace {

// Probability mass per level; reused across calls on the same thread.
std::span<const double> bucket_mass(std::span<const double> p, const ValueLevels& v) {
  thread_local std::vector<double> mass;
  mass.assign(v.size(), 0.0);
  const auto level_of = v.level_of();
  for (std::size_t j = 0; j < p.size(); ++j) mass[level_of[j]] += p[j];
  return mass;
}

double nominal_expectation(std::span<const double> p, const ValueLevels& v) {
  const auto levels = v.levels();
  const auto level_of = v.level_of();
  double ev = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) ev += p[j] * levels[level_of[j]];
  return ev;
}

void check_radius(double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParams, "radius must be non-negative");
}

// P[V]_alpha - sqrt(sigma Var_P([V]_alpha)) over the level buckets.
double chi2_objective(std::span<const double> mass, std::span<const double> levels,
                      double sigma, double alpha) {
  double mean = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) mean += mass[k] * std::min(levels[k], alpha);
  double var = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double d = std::min(levels[k], alpha) - mean;
    var += mass[k] * d * d;
  }
  return mean - std::sqrt(sigma * std::max(var, 0.0));
}

constexpr double kAlphaTol = 1e-11;

}  // namespace

DualValue tv_dual_value(std::span<const double> p, const ValueLevels& v, double sigma) {
  check_radius(sigma);
  const auto levels = v.levels();
  if (sigma == 0.0) return {nominal_expectation(p, v), v.max()};
  if (levels.size() == 1) return {levels[0], levels[0]};

  const auto mass = bucket_mass(p, v);
  const std::size_t K = levels.size();
  thread_local std::vector<double> above;
  above.assign(K, 0.0);
  for (std::size_t k = K - 1; k-- > 0;) above[k] = above[k + 1] + mass[k + 1];

  DualValue best{-std::numeric_limits<double>::infinity(), levels[0]};
  double below_pv = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    below_pv += mass[k] * levels[k];
    const double g = below_pv + levels[k] * above[k] - sigma * (levels[k] - levels[0]);
    if (g > best.value) best = {g, levels[k]};
  }
  return best;
}

DualValue chi2_dual_value(std::span<const double> p, const ValueLevels& v, double sigma) {
  check_radius(sigma);
  const auto levels = v.levels();
  if (sigma == 0.0) return {nominal_expectation(p, v), v.max()};
  if (levels.size() == 1) return {levels[0], levels[0]};

  const auto mass = bucket_mass(p, v);
  auto h = [&](double alpha) { return chi2_objective(mass, levels, sigma, alpha); };

  DualValue best{-std::numeric_limits<double>::infinity(), levels[0]};
  auto consider = [&](double alpha, double value) {
    if (value > best.value) best = {value, alpha};
  };
  for (double level : levels) consider(level, h(level));

  constexpr double inv_phi = 0.6180339887498949;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    double lo = levels[k];
    double hi = levels[k + 1];
    if (hi - lo <= kAlphaTol) continue;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = h(x1);
    double f2 = h(x2);
    consider(x1, f1);
    consider(x2, f2);
    for (int it = 0; it < 200 && hi - lo > kAlphaTol; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = h(x2);
        consider(x2, f2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = h(x1);
        consider(x1, f1);
      }
    }
  }
  return best;
}

double worst_case_expectation(std::span<const double> p, const ValueLevels& v,
                              const UncertaintySpec& u) {
  return u.divergence == Divergence::TV ? tv_dual_value(p, v, u.radius).value
                                        : chi2_dual_value(p, v, u.radius).value;
}

std::vector<double> tv_worst_kernel(std::span<const double> p, std::span<const double> v,
                                    double sigma) {
  check_radius(sigma);
  ValueLevels levels(v);  // rejects negative entries
  std::vector<double> out(p.begin(), p.end());
  if (sigma == 0.0) return out;

  const std::size_t s_min =
      static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  double others = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j != s_min) others += p[j];
  }
  double budget = std::min(sigma, others);

  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return v[i] > v[j]; });
  double moved = 0.0;
  for (std::size_t j : order) {
    if (budget <= 0.0) break;
    if (j == s_min) continue;
    const double take = std::min(out[j], budget);
    out[j] -= take;
    budget -= take;
    moved += take;
  }
  out[s_min] += moved;
  return out;
}

DualSolution tv_dual(std::span<const double> p, std::span<const double> v, double sigma) {
  const ValueLevels levels(v);
  const DualValue dv = tv_dual_value(p, levels, sigma);
  return {dv.value, dv.alpha, tv_worst_kernel(p, v, sigma)};
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) d += std::abs(p[j] - q[j]);
  return 0.5 * d;
}

double chi2_divergence(std::span<const double> q, std::span<const double> p) {
  double d = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) {
      const double diff = q[j] - p[j];
      d += diff * diff / p[j];
    } else if (q[j] > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return d;
}

namespace {

// Pull a candidate toward p along the segment until it is inside the ball.
// The divergence is quadratic along that segment.
void shrink_into_chi2_ball(std::vector<double>& q, std::span<const double> p, double sigma) {
  const double d = chi2_divergence(q, p);
  if (d <= sigma) return;
  const double t = std::sqrt(sigma / d);
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = p[j] + t * (q[j] - p[j]);
}

}  // namespace

DualSolution chi2_dual(std::span<const double> p, std::span<const double> v, double sigma) {
  const ValueLevels levels(v);
  const DualValue dv = chi2_dual_value(p, levels, sigma);
  DualSolution sol{dv.value, dv.alpha, std::vector<double>(p.begin(), p.end())};
  if (sigma == 0.0 || levels.size() == 1) return sol;

  const ValueFunction w = clip(v, dv.alpha);
  const double mean = [&] {
    double m = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) m += p[j] * w[j];
    return m;
  }();
  const double var = variance(p, w);
  std::vector<double>& q = sol.worst_kernel;

  auto condition_on_support_minimum = [&] {
    // Reached when [V]_alpha is constant on supp(P): the optimum sits at the
    // smallest supported value, reached by conditioning P on its minimizers.
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] > 0.0) vmin = std::min(vmin, v[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) z += (p[j] > 0.0 && v[j] == vmin) ? p[j] : 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j] = (p[j] > 0.0 && v[j] == vmin) ? p[j] / z : 0.0;
    }
  };

  // Variance at round-off level means [V]_alpha is constant on the support;
  // lambda would blow up and clamp every entry to zero.
  const double scale = 1e-12 * (1.0 + std::abs(mean));
  if (var <= scale * scale) {
    condition_on_support_minimum();
  } else {
    const double lambda = std::sqrt(sigma / var);
    double total = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      q[j] = std::max(0.0, p[j] * (1.0 - lambda * (w[j] - mean)));
      total += q[j];
    }
    if (total > 0.0 && std::isfinite(total)) {
      for (double& x : q) x /= total;
    } else {
      condition_on_support_minimum();
    }
  }
  shrink_into_chi2_ball(q, p, sigma);
  return sol;
}

DualSolution robust_dual(std::span<const double> p, std::span<const double> v,
                         const UncertaintySpec& u) {
  return u.divergence == Divergence::TV ? tv_dual(p, v, u.radius) : chi2_dual(p, v, u.radius);
}

namespace {

void check_shapes(const TabularMDP& m, std::span<const double> q) {
  if (q.size() != m.num_pairs()) {
    throw Error(ErrorCode::DimensionMismatch, "Q must have S*A entries");
  }
}

// Rows below this count are not worth a parallel region.
constexpr std::size_t kParallelRows = 64;

QFunction bellman_rows(const TabularMDP& m, const UncertaintySpec& u, std::span<const double> q,
                       bool parallel) {
  check_shapes(m, q);
  validate_uncertainty(u);
  const ValueFunction v = greedy_value(m, q);
  const ValueLevels levels(v);
  QFunction out(m.num_pairs());
  const auto rows = static_cast<std::int64_t>(m.num_pairs());
  const bool go_parallel = parallel && m.num_pairs() >= kParallelRows;

#pragma omp parallel for schedule(static) if (go_parallel)
  for (std::int64_t sa = 0; sa < rows; ++sa) {
    const std::span<const double> p(m.kernel.data() + sa * m.num_states, m.num_states);
    out[sa] = m.reward[sa] + m.discount * worst_case_expectation(p, levels, u);
  }
  return out;
}

}  // namespace

QFunction robust_bellman_apply(const TabularMDP& m, const UncertaintySpec& u,
                               std::span<const double> q) {
  return bellman_rows(m, u, q, true);
}

QFunction robust_bellman_apply_serial(const TabularMDP& m, const UncertaintySpec& u,
                                      std::span<const double> q) {
  return bellman_rows(m, u, q, false);
}

ValueFunction robust_policy_bellman_apply(const TabularMDP& m, const UncertaintySpec& u,
                                          const Policy& pi, std::span<const double> v,
                                          bool parallel) {
  validate_policy(m, pi);
  validate_uncertainty(u);
  if (v.size() != m.num_states) {
    throw Error(ErrorCode::DimensionMismatch, "V must have S entries");
  }
  const ValueLevels levels(v);
  ValueFunction out(m.num_states, 0.0);
  const auto states = static_cast<std::int64_t>(m.num_states);
  const bool go_parallel = parallel && m.num_pairs() >= kParallelRows;

#pragma omp parallel for schedule(static) if (go_parallel)
  for (std::int64_t s = 0; s < states; ++s) {
    double acc = 0.0;
    for (std::size_t a = 0; a < m.num_actions; ++a) {
      const double w = pi.prob(s, a);
      if (w == 0.0) continue;
      const double worst = worst_case_expectation(m.row(s, a), levels, u);
      acc += w * (m.reward[m.pair(s, a)] + m.discount * worst);
    }
    out[s] = acc;
  }
  return out;
}

}  // namespace robust_mdp
