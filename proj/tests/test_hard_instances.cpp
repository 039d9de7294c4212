#include <gtest/gtest.h>

#include "robust_mdp/drvi.hpp"
#include "robust_mdp/errors.hpp"
#include "robust_mdp/hard_instances.hpp"

using namespace robust_mdp;

namespace {

TvInstanceParams tv(double gamma, double sigma, double eps) {
  TvInstanceParams p;
  p.gamma = gamma;
  p.sigma = sigma;
  p.epsilon = eps;
  return p;
}

Chi2InstanceParams chi2(double gamma, double sigma, double eps) {
  Chi2InstanceParams p;
  p.gamma = gamma;
  p.sigma = sigma;
  p.epsilon = eps;
  return p;
}

std::string violation(const TvInstanceParams& p) {
  try {
    validate(p);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
    return e.what();
  }
  return "";
}

SolverOptions tight() {
  SolverOptions o;
  o.tol = 1e-12;
  return o;
}

}  // namespace

TEST(TvInstance, DerivedParameters) {
  const auto p = tv(0.9, 0.5, 0.01);
  EXPECT_DOUBLE_EQ(p.p(), 0.53125);
  EXPECT_DOUBLE_EQ(p.delta(), 32 * 0.1 * 0.5 * 0.01);
  EXPECT_DOUBLE_EQ(p.q(), p.p() - p.delta());
  // Below 1 - gamma the scale saturates.
  EXPECT_DOUBLE_EQ(tv(0.9, 0.05, 0.01).p(), (1 + 1.0 / 16) * 0.1);
}

TEST(TvInstance, KernelStructure) {
  auto params = tv(0.9, 0.3, 0.01);
  params.num_states = 5;
  params.num_actions = 4;
  params.phi = 1;
  const auto m = build_tv_instance(params);
  EXPECT_NO_THROW(validate_mdp(m));
  EXPECT_DOUBLE_EQ(m.row(0, 1)[1], params.p());
  EXPECT_DOUBLE_EQ(m.row(0, 0)[1], params.q());
  for (std::size_t a = 2; a < 4; ++a) EXPECT_DOUBLE_EQ(m.row(0, a)[1], params.p());
  for (std::size_t s = 1; s < 5; ++s) {
    for (std::size_t a = 0; a < 4; ++a) {
      EXPECT_EQ(m.row(s, a)[1], 1.0);
      EXPECT_EQ(m.reward[m.pair(s, a)], s == 1 ? 1.0 : 0.0);
    }
  }
}

TEST(TvInstance, ValidationNamesConstraint) {
  EXPECT_NE(violation(tv(0.4, 0.3, 0.01)).find("gamma"), std::string::npos);
  EXPECT_NE(violation(tv(0.9, 0.95, 0.01)).find("sigma"), std::string::npos);
  EXPECT_NE(violation(tv(0.9, 0.3, 0.5)).find("delta"), std::string::npos);
  auto bad_c0 = tv(0.9, 0.3, 0.01);
  bad_c0.c0 = 0.2;
  EXPECT_NE(violation(bad_c0).find("c0"), std::string::npos);
  auto bad_phi = tv(0.9, 0.3, 0.01);
  bad_phi.phi = 2;
  EXPECT_NE(violation(bad_phi).find("phi"), std::string::npos);
  EXPECT_EQ(violation(tv(0.9, 0.3, 0.01)), "");
}

TEST(TvAnalytic, MatchesSolverAndOrdering) {
  for (double sigma : {0.05, 0.1, 0.4, 0.8}) {
    for (double pi_phi : {0.0, 0.3, 1.0}) {
      auto params = tv(0.9, sigma, 0.01);
      params.num_states = 4;
      const auto m = build_tv_instance(params);
      const auto v = robust_policy_eval(m, {Divergence::TV, sigma},
                                        instance_policy(4, 2, params.phi, pi_phi), tight());
      const auto closed = tv_analytic_value(params, pi_phi);
      for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(v[s], closed[s], 1e-8);
      EXPECT_GT(closed[1], closed[2]);
      EXPECT_GE(closed[2], closed[0]);
      EXPECT_DOUBLE_EQ(closed[2], closed[3]);
    }
  }
}

TEST(TvAnalytic, OptimalPolicyGivesOptimalValue) {
  const auto params = tv(0.95, 0.2, 0.02);
  const double g = params.gamma, s = params.sigma, p = params.p();
  // Optimal robust value at state 0 written out directly.
  const double d = 1 - g * (1 - s);
  const double v0 = g * (p - s) / ((1 - g) * (1 + g * (p - s) / d) * d);
  EXPECT_NEAR(tv_analytic_value(params, 1.0)[0], v0, 1e-12);
  const auto rep = drvi(build_tv_instance(params), {Divergence::TV, s}, tight());
  EXPECT_NEAR(rep.v_final[0], v0, 1e-8);
}

TEST(FSigma, Examples) {
  EXPECT_NEAR(f_sigma(0.3 / 1.3, 0.3), 0.0, 1e-15);
  EXPECT_EQ(f_sigma(0.42, 0.0), 0.42);
  EXPECT_EQ(f_sigma(0.5, 1.0), 0.0);
  EXPECT_THROW(f_sigma(0.1, 1.0), Error);
  EXPECT_THROW(f_sigma(1.1, 0.2), Error);
  for (double x = 0.5; x < 1.0; x += 0.05) EXPECT_GE(f_sigma(x, 1.0), 0.0);
}

TEST(Chi2Instance, DerivedParameters) {
  EXPECT_DOUBLE_EQ(chi2(0.9, 1.0, 0.001).q(), 0.5);
  const auto small = chi2(0.99, 0.001, 0.001);
  EXPECT_TRUE(small.small_radius());
  EXPECT_NEAR(small.q(), 0.01, 1e-15);
  EXPECT_NEAR(small.delta(), 18 * 1e-4 * 0.001, 1e-18);
  EXPECT_DOUBLE_EQ(chi2(0.9, 0.1, 0.001).delta(), 64 * 1.1 * 0.01 * 0.001);
  EXPECT_DOUBLE_EQ(chi2(0.9, 5.0, 0.001).delta(), 16.0 / 18 * 0.001);
  const auto m = build_chi2_instance(chi2(0.9, 1.0, 0.001));
  EXPECT_NO_THROW(validate_mdp(m));
  EXPECT_THROW(build_chi2_instance(chi2(0.7, 1.0, 0.001)), Error);
  EXPECT_THROW(build_chi2_instance(chi2(0.9, 1.0, 1.0)), Error);
}

TEST(Chi2Analytic, MatchesSolver) {
  for (double sigma : {0.001, 0.01, 0.2, 1.0, 4.0}) {
    const double gamma = sigma < 0.1 ? 0.99 : 0.9;
    for (double pi_phi : {0.0, 0.5, 1.0}) {
      const auto params = chi2(gamma, sigma, 0.001);
      const auto v = robust_policy_eval(build_chi2_instance(params), {Divergence::Chi2, sigma},
                                        instance_policy(3, 2, params.phi, pi_phi), tight());
      const auto closed = chi2_analytic_value(params, pi_phi);
      for (std::size_t s = 0; s < 3; ++s) EXPECT_NEAR(v[s], closed[s], 1e-8) << sigma;
      EXPECT_DOUBLE_EQ(closed[1], 1 / (1 - gamma));
    }
  }
}

TEST(Chi2Analytic, PlantedActionIsBest) {
  const auto params = chi2(0.9, 0.2, 0.001);
  const double best = chi2_analytic_value(params, 1.0)[0];
  EXPECT_GT(best, chi2_analytic_value(params, 0.5)[0]);
  EXPECT_GT(best, chi2_analytic_value(params, 0.0)[0]);
}

TEST(InstancePolicy, Shape) {
  const Policy pi = instance_policy(4, 3, 1, 0.25);
  EXPECT_EQ(pi.prob(0, 1), 0.25);
  EXPECT_EQ(pi.prob(0, 0), 0.75);
  EXPECT_EQ(pi.prob(0, 2), 0.0);
  EXPECT_EQ(pi.prob(3, 0), 1.0);
}
