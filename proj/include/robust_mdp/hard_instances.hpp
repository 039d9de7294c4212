#pragma once

#include <cstddef>

#include "robust_mdp/mdp.hpp"

namespace robust_mdp {

// Two-hypothesis hard instances. State 1 is absorbing with reward 1; every
// state s >= 1 moves to state 1 deterministically; state 0 has reward 0 and
// moves to state 1 with probability p under the planted action phi and with
// probability q < p under 1 - phi, staying at 0 otherwise. Actions a >= 2 at
// states 0 and 1 are copies of action 1.

/// Instance for TV balls:
///   p = (1 + c0/2) max(1-gamma, sigma),
///   delta = 32 (1-gamma) max(1-gamma, sigma) epsilon,   q = p - delta.
struct TvInstanceParams {
  std::size_t num_states = 3;
  std::size_t num_actions = 2;
  double gamma = 0.9;
  double sigma = 0.1;
  double epsilon = 0.01;
  double c0 = 0.125;
  int phi = 0;

  double c1() const { return c0 / 2.0; }
  double scale() const;  // max(1-gamma, sigma)
  double p() const;
  double delta() const;
  double q() const { return p() - delta(); }
};

/// Instance for chi-square balls:
///   q = 1-gamma if sigma < (1-gamma)/4, else sigma/(1+sigma);   p = q + delta,
/// with delta piecewise in sigma (see chi2_delta).
struct Chi2InstanceParams {
  std::size_t num_states = 3;
  std::size_t num_actions = 2;
  double gamma = 0.9;
  double sigma = 0.1;
  double epsilon = 0.001;
  int phi = 0;

  bool small_radius() const { return sigma < (1.0 - gamma) / 4.0; }
  double q() const;
  double delta() const;
  double p() const { return q() + delta(); }
};

/// Throws InvalidParams naming the violated constraint.
void validate(const TvInstanceParams& params);
void validate(const Chi2InstanceParams& params);

TabularMDP build_tv_instance(const TvInstanceParams& params);
TabularMDP build_chi2_instance(const Chi2InstanceParams& params);

/// Closed-form robust value of a policy that plays phi at state 0 with
/// probability pi_phi_at_0 (and 1 - phi otherwise), under the TV ball.
ValueFunction tv_analytic_value(const TvInstanceParams& params, double pi_phi_at_0);

/// x - sqrt(sigma x (1-x)): the smallest mass a chi-square ball of radius
/// sigma can leave on one outcome of a two-point distribution with mass x
/// there. Defined for x in [sigma/(1+sigma), 1).
double f_sigma(double x, double sigma);

ValueFunction chi2_analytic_value(const Chi2InstanceParams& params, double pi_phi_at_0);

/// Policy playing phi at state 0 w.p. pi_phi_at_0 and 1 - phi otherwise;
/// action 0 everywhere else.
Policy instance_policy(std::size_t num_states, std::size_t num_actions, int phi,
                       double pi_phi_at_0);

}  // namespace robust_mdp
