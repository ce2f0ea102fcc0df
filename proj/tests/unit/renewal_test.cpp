#include <gtest/gtest.h>

#include <cmath>

#include "rumour/renewal.hpp"

using namespace rumour;

TEST(Sigma, ConstantLaws) {
  EXPECT_EQ(detect_sigma(RadiusField(RadiusLaw::constant(1), 3), DepthPolicy::exact_bounded()).sigma, 1);
  EXPECT_EQ(detect_sigma(RadiusField(RadiusLaw::constant(0), 3), DepthPolicy::exact_bounded()).sigma, 1);
  // I_{-1} = 3 > 1 and I_{-2} = 3 > 2: sigma = 3.
  EXPECT_EQ(detect_sigma(RadiusField(RadiusLaw::constant(3), 3), DepthPolicy::exact_bounded()).sigma, 3);
}

TEST(Sigma, HandUnfoldedField) {
  RadiusField field(RadiusLaw::finite_support({0.25, 0.25, 0.25, 0.25}), 1);
  field.set_override(-1, 3);
  field.set_override(-2, 0);
  field.set_override(-3, 0);
  const auto s = detect_sigma(field, DepthPolicy::exact_bounded());
  EXPECT_EQ(s.sigma, 2);
  EXPECT_TRUE(s.certified);
}

TEST(Sigma, RejectsHeavyTailsAndStepKeyedFields) {
  EXPECT_THROW(detect_sigma(RadiusField(RadiusLaw::polynomial_tail(1.0, 0.5), 1),
                            DepthPolicy::tail_budget(1e-9)),
               std::invalid_argument);
  EXPECT_THROW(detect_sigma(RadiusField(RadiusLaw::constant(1), 1, RadiusField::Keying::StepKeyed),
                            DepthPolicy::exact_bounded()),
               std::invalid_argument);
  EXPECT_THROW(detect_sigma(RadiusField(RadiusLaw::geometric(0.5), 1), DepthPolicy::exact_bounded()),
               std::invalid_argument);
}

TEST(Sigma, TailBudgetOnUnboundedLaw) {
  const auto s = detect_sigma(RadiusField(RadiusLaw::geometric_min1(0.5), 4), DepthPolicy::tail_budget(1e-12));
  EXPECT_GE(s.sigma, 1);
  EXPECT_LE(s.residual, 1e-12);
  EXPECT_FALSE(s.certified);
}

TEST(Taus, ConstantOne) {
  const RadiusField field(RadiusLaw::constant(1), 1);
  const auto ledger = detect_taus(run(field, Horizon{50}), 1);
  ASSERT_EQ(ledger.taus.size(), 50u);
  for (std::size_t j = 0; j < ledger.taus.size(); ++j) {
    EXPECT_EQ(ledger.taus[j].step, static_cast<std::int64_t>(j) + 1);
    EXPECT_EQ(ledger.taus[j].r, static_cast<std::int64_t>(j) + 1);
  }
  for (const auto& inc : ledger.increments()) EXPECT_EQ(inc, (Increment{1, 1}));
  EXPECT_FALSE(ledger.truncated);
}

TEST(Taus, ConstantTwoHasNoRenewals) {
  const RadiusField field(RadiusLaw::constant(2), 1);
  const auto ledger = detect_taus(run(field, Horizon{50}), 2);
  EXPECT_EQ(ledger.renewal_count(), 0u);
  EXPECT_TRUE(ledger.truncated);
  EXPECT_THROW(speed_from_renewals(ledger), NoRenewalsFound);
}

TEST(Taus, RenewalFrequencyExceedsOvershootBound) {
  const auto law = RadiusLaw::geometric_min1(0.5);
  const double p_o1 = overshoot_cdf_exact(OvershootQuery::with_error(law), 1).value -
                      overshoot_cdf_exact(OvershootQuery::with_error(law), 0).value;
  const RadiusField field(law, 99);
  const auto sigma = detect_sigma(field, DepthPolicy::tail_budget(1e-12));
  constexpr std::int64_t horizon = 100'000;
  const auto ledger = detect_taus(run(field, Horizon{horizon}), sigma.sigma);
  const double steps = static_cast<double>(horizon - sigma.sigma);
  const double freq = static_cast<double>(ledger.renewal_count()) / steps;
  EXPECT_GE(freq, p_o1 - 3.0 * std::sqrt(p_o1 * (1 - p_o1) / steps));
  for (const auto& inc : ledger.increments()) {
    EXPECT_GE(inc.d_tau, 1);
    EXPECT_GE(inc.d_r, 1);
  }
}

TEST(Speed, ArithmeticContract) {
  const std::vector<Increment> incs = {{1, 2}, {1, 2}, {2, 4}};
  const auto rep = speed_from_increments(incs);
  EXPECT_DOUBLE_EQ(rep.point, 2.0);
  EXPECT_LE(rep.lo, rep.point);
  EXPECT_GE(rep.hi, rep.point);
  EXPECT_THROW(speed_from_increments({}), NoRenewalsFound);
}

TEST(Speed, ConstantOneIsExact) {
  const RadiusField field(RadiusLaw::constant(1), 1);
  const auto ledger = collect_renewals(field, 100, DepthPolicy::exact_bounded());
  const auto rep = speed_from_renewals(ledger);
  EXPECT_EQ(rep.point, 1.0);
  EXPECT_EQ(rep.lo, 1.0);
  EXPECT_EQ(rep.hi, 1.0);
}

TEST(Speed, BootstrapBracketsDelta) {
  const RadiusField field(RadiusLaw::geometric_min1(0.5), 12);
  const auto ledger = collect_renewals(field, 2000, DepthPolicy::tail_budget(1e-12));
  const auto delta = speed_from_renewals(ledger, 0.95, RatioCiMethod::Delta);
  const auto boot = speed_from_renewals(ledger, 0.95, RatioCiMethod::BatchBootstrap, 5);
  EXPECT_EQ(delta.point, boot.point);
  EXPECT_GE(delta.point, 1.0);
  EXPECT_LT(std::abs(delta.halfwidth() - boot.halfwidth()), delta.halfwidth());
}

TEST(Diagnostics, IidSyntheticInput) {
  SplitMix64 rng(8);
  const auto law = RadiusLaw::geometric_min1(0.5);
  std::vector<Increment> incs;
  for (int i = 0; i < 2000; ++i) incs.push_back({law.sample(rng), law.sample(rng)});
  const auto rep = iid_diagnostics(incs, 3, 199);
  const double bound = 3.0 / std::sqrt(2000.0);
  EXPECT_LE(std::abs(rep.d_tau.lag1), bound);
  EXPECT_LE(std::abs(rep.d_r.lag1), bound);
}

TEST(Diagnostics, AlternatingSeriesIsRejected) {
  std::vector<double> x;
  for (int i = 0; i < 200; ++i) x.push_back(1 + i % 2);
  const auto d = series_diagnostics(x, 1, 999);
  EXPECT_LT(d.permutation_p, 0.01);
}

TEST(Renewal, PostSigmaContainment) {
  for (int seed = 0; seed < 200; ++seed) {
    const RadiusField field(RadiusLaw::finite_support({0.0, 0.3, 0.4, 0.3}), seed);
    const auto s = detect_sigma(field, DepthPolicy::exact_bounded());
    EXPECT_EQ(post_sigma_containment_violation(field, s.sigma, 200), 0) << seed;
  }
}

TEST(Renewal, OneSidedRenewalTime) {
  const auto r1 = sample_one_sided_renewal(RadiusField(RadiusLaw::constant(1), 1));
  EXPECT_TRUE(r1.found);
  EXPECT_EQ(r1.time, 1);
  EXPECT_EQ(r1.r, 1);
  const auto r2 = sample_one_sided_renewal(RadiusField(RadiusLaw::constant(2), 1), 100);
  EXPECT_FALSE(r2.found);
}
