#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "robust_mdp/mdp.hpp"

namespace robust_mdp {

enum class Divergence { TV, Chi2 };

const char* to_string(Divergence d);
Divergence parse_divergence(const std::string& name);  // "tv" | "chi2"

/// (s,a)-rectangular uncertainty ball around the nominal kernel. A radius of
/// zero means no robustness: every operation reduces to the nominal expectation.
struct UncertaintySpec {
  Divergence divergence = Divergence::TV;
  double radius = 0.0;
};

/// TV needs radius in [0, 1); chi-square needs radius >= 0.
void validate_uncertainty(const UncertaintySpec& u);

struct DualSolution {
  double value = 0.0;       // inf over the ball of P'V
  double alpha_star = 0.0;  // maximizing clip level
  std::vector<double> worst_kernel;
};

/// [V]_alpha: entries above alpha are replaced by alpha.
ValueFunction clip(std::span<const double> v, double alpha);

/// Var_P(V) = P(V o V) - (PV)^2, computed in two passes and clamped at 0.
double variance(std::span<const double> p, std::span<const double> v);

/// Distinct sorted levels of a non-negative value vector. Built once per
/// Bellman sweep and shared by every kernel row, so the per-row dual solves
/// are O(S) instead of O(S log S).
class ValueLevels {
 public:
  explicit ValueLevels(std::span<const double> v);

  std::span<const double> levels() const { return levels_; }
  std::span<const std::uint32_t> level_of() const { return level_of_; }
  double min() const { return levels_.front(); }
  double max() const { return levels_.back(); }
  std::size_t size() const { return levels_.size(); }

 private:
  std::vector<double> levels_;
  std::vector<std::uint32_t> level_of_;
};

struct DualValue {
  double value = 0.0;
  double alpha = 0.0;
};

/// max over alpha of P[V]_alpha - sigma (alpha - min V). The objective is
/// concave piecewise-linear with kinks at the levels, so scanning the levels
/// is exact.
DualValue tv_dual_value(std::span<const double> p, const ValueLevels& v, double sigma);

/// max over alpha of P[V]_alpha - sqrt(sigma Var_P([V]_alpha)). The levels are
/// scanned, then each gap between consecutive levels (where the objective is
/// concave) is refined by golden-section search to an alpha bracket of 1e-11.
DualValue chi2_dual_value(std::span<const double> p, const ValueLevels& v, double sigma);

/// Worst-case expectation inf over the ball of P'V, dispatching on divergence.
double worst_case_expectation(std::span<const double> p, const ValueLevels& v,
                              const UncertaintySpec& u);

/// Greedy mass transport: moves min(sigma, 1 - P(s_min)) from the highest
/// valued states onto the lowest-index minimizer of V.
std::vector<double> tv_worst_kernel(std::span<const double> p, std::span<const double> v,
                                    double sigma);

DualSolution tv_dual(std::span<const double> p, std::span<const double> v, double sigma);

/// Chi-square dual with a recovered minimizing kernel. The kernel is the
/// interior KKT point at alpha_star when it is non-negative; otherwise it is
/// a projected feasible witness.
DualSolution chi2_dual(std::span<const double> p, std::span<const double> v, double sigma);

DualSolution robust_dual(std::span<const double> p, std::span<const double> v,
                         const UncertaintySpec& u);

double tv_distance(std::span<const double> p, std::span<const double> q);
/// sum (q - p)^2 / p over supp(p); +inf if q puts mass outside supp(p).
double chi2_divergence(std::span<const double> q, std::span<const double> p);

// Robust Bellman operator
//   T(Q)(s,a) = r(s,a) + gamma * inf_{P' in ball(P_sa)} P' V,   V(s) = max_a Q(s,a).
// The OpenMP variant splits the (s,a) rows across threads; each row runs the
// same serial code, so results are bitwise identical to the serial reference.

QFunction robust_bellman_apply(const TabularMDP& m, const UncertaintySpec& u,
                               std::span<const double> q);
QFunction robust_bellman_apply_serial(const TabularMDP& m, const UncertaintySpec& u,
                                      std::span<const double> q);

/// Policy version on state values:
///   V'(s) = sum_a pi(a|s) [r(s,a) + gamma * inf P' V].
ValueFunction robust_policy_bellman_apply(const TabularMDP& m, const UncertaintySpec& u,
                                          const Policy& pi, std::span<const double> v,
                                          bool parallel = true);

}  // namespace robust_mdp
