#include "robust_mdp/hard_instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robust_mdp/errors.hpp"

namespace robust_mdp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParams, what);
}

void check_shape(std::size_t num_states, std::size_t num_actions, int phi) {
  require(num_states >= 3, "S >= 3");
  require(num_actions >= 2, "A >= 2");
  require(phi == 0 || phi == 1, "phi in {0, 1}");
}

TabularMDP build_instance(std::size_t num_states, std::size_t num_actions, double gamma,
                          int phi, double p, double q) {
  TabularMDP m;
  m.num_states = num_states;
  m.num_actions = num_actions;
  m.discount = gamma;
  m.kernel.assign(m.num_pairs() * num_states, 0.0);
  m.reward.assign(m.num_pairs(), 0.0);
  const auto planted = static_cast<std::size_t>(phi);
  for (std::size_t a = 0; a < num_actions; ++a) {
    // Padded actions (a >= 2) copy action 1.
    const std::size_t base = std::min<std::size_t>(a, 1);
    const double to_one = base == planted ? p : q;
    auto row0 = m.row(0, a);
    row0[1] = to_one;
    row0[0] = 1.0 - to_one;
    for (std::size_t s = 1; s < num_states; ++s) m.row(s, a)[1] = 1.0;
    m.reward[m.pair(1, a)] = 1.0;
  }
  return m;
}

}  // namespace

double TvInstanceParams::scale() const { return std::max(1.0 - gamma, sigma); }
double TvInstanceParams::p() const { return (1.0 + c1()) * scale(); }
double TvInstanceParams::delta() const { return 32.0 * (1.0 - gamma) * scale() * epsilon; }

void validate(const TvInstanceParams& params) {
  check_shape(params.num_states, params.num_actions, params.phi);
  require(params.gamma >= 0.5 && params.gamma < 1.0, "gamma in [1/2, 1)");
  require(params.c0 > 0.0 && params.c0 <= 0.125, "c0 in (0, 1/8]");
  require(params.sigma > 0.0 && params.sigma <= 1.0 - params.c0, "sigma in (0, 1 - c0]");
  require(params.epsilon > 0.0, "epsilon > 0");
  require(params.delta() <= params.c1() * params.scale() * (1.0 + 1e-12),
          "delta <= c1 max(1-gamma, sigma), i.e. epsilon <= c1 / (32 (1-gamma))");
  require(params.p() <= 1.0, "p <= 1");
  require(params.q() >= 0.0, "q >= 0");
}

double Chi2InstanceParams::q() const {
  return small_radius() ? 1.0 - gamma : sigma / (1.0 + sigma);
}

double Chi2InstanceParams::delta() const {
  const double h = 1.0 - gamma;
  if (small_radius()) return 18.0 * h * h * epsilon;
  if (sigma < 1.0 / (3.0 * h)) return 64.0 * (1.0 + sigma) * h * h * epsilon;
  return 16.0 / (3.0 * (1.0 + sigma)) * epsilon;
}

void validate(const Chi2InstanceParams& params) {
  check_shape(params.num_states, params.num_actions, params.phi);
  require(params.gamma >= 0.75 && params.gamma < 1.0, "gamma in [3/4, 1)");
  require(params.sigma > 0.0 && std::isfinite(params.sigma), "sigma > 0");
  require(params.epsilon > 0.0, "epsilon > 0");
  const double h = 1.0 - params.gamma;
  const double bound =
      params.small_radius() ? h / 4.0 : std::min(h / 4.0, 1.0 / (2.0 * (1.0 + params.sigma)));
  require(params.delta() <= bound * (1.0 + 1e-12),
          "delta <= " + std::string(params.small_radius() ? "(1-gamma)/4"
                                                          : "min((1-gamma)/4, 1/(2(1+sigma)))"));
  require(params.p() <= 1.0, "p <= 1");
}

TabularMDP build_tv_instance(const TvInstanceParams& params) {
  validate(params);
  return build_instance(params.num_states, params.num_actions, params.gamma, params.phi,
                        params.p(), params.q());
}

TabularMDP build_chi2_instance(const Chi2InstanceParams& params) {
  validate(params);
  return build_instance(params.num_states, params.num_actions, params.gamma, params.phi,
                        params.p(), params.q());
}

ValueFunction tv_analytic_value(const TvInstanceParams& params, double pi_phi_at_0) {
  validate(params);
  require(pi_phi_at_0 >= 0.0 && pi_phi_at_0 <= 1.0, "pi(phi|0) in [0, 1]");
  const double g = params.gamma;
  const double sigma = params.sigma;
  const double z = params.p() * pi_phi_at_0 + params.q() * (1.0 - pi_phi_at_0);
  const double denom1 = 1.0 - g * (1.0 - sigma);
  const double ratio = g * (z - sigma) / denom1;

  ValueFunction v(params.num_states);
  v[0] = g * (z - sigma) / ((1.0 - g) * (1.0 + ratio) * denom1);
  v[1] = (1.0 + g * sigma * v[0]) / denom1;
  for (std::size_t s = 2; s < params.num_states; ++s) {
    v[s] = g * (1.0 - sigma) * v[1] + g * sigma * v[0];
  }
  return v;
}

double f_sigma(double x, double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::DomainError, "sigma must be non-negative");
  const double lo = sigma / (1.0 + sigma);
  if (!(x >= lo * (1.0 - 1e-12)) || x > 1.0) {
    throw Error(ErrorCode::DomainError, "x = " + std::to_string(x) + " outside [" +
                                            std::to_string(lo) + ", 1)");
  }
  return std::max(0.0, x - std::sqrt(sigma * x * (1.0 - x)));
}

ValueFunction chi2_analytic_value(const Chi2InstanceParams& params, double pi_phi_at_0) {
  validate(params);
  require(pi_phi_at_0 >= 0.0 && pi_phi_at_0 <= 1.0, "pi(phi|0) in [0, 1]");
  const double g = params.gamma;
  const double p_low = f_sigma(params.p(), params.sigma);
  // On the large-radius branch q = sigma/(1+sigma) sits exactly where the
  // ball reaches the point mass on state 0.
  const double q_low = params.small_radius() ? f_sigma(params.q(), params.sigma) : 0.0;
  const double z = p_low * pi_phi_at_0 + q_low * (1.0 - pi_phi_at_0);

  ValueFunction v(params.num_states);
  v[0] = g * z / ((1.0 - g) * (1.0 - g * (1.0 - z)));
  v[1] = 1.0 / (1.0 - g);
  for (std::size_t s = 2; s < params.num_states; ++s) v[s] = g / (1.0 - g);
  return v;
}

Policy instance_policy(std::size_t num_states, std::size_t num_actions, int phi,
                       double pi_phi_at_0) {
  std::vector<double> probs(num_states * num_actions, 0.0);
  probs[static_cast<std::size_t>(phi)] = pi_phi_at_0;
  probs[static_cast<std::size_t>(1 - phi)] = 1.0 - pi_phi_at_0;
  for (std::size_t s = 1; s < num_states; ++s) probs[s * num_actions] = 1.0;
  return Policy(num_states, num_actions, std::move(probs));
}

}  // namespace robust_mdp
