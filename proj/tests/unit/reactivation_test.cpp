#include <gtest/gtest.h>

#include <cmath>

#include "rumour/reactivation.hpp"

using namespace rumour;

namespace {

ReactParams params(RadiusLaw law, double p2, std::uint64_t seed,
                   RadiusKeying keying = RadiusKeying::StepKeyed) {
  ReactParams p;
  p.law = std::move(law);
  p.p2 = p2;
  p.seed = seed;
  p.keying = keying;
  return p;
}

}  // namespace

TEST(React, ZeroP2MatchesBasicEngineStepKeyed) {
  const auto law = RadiusLaw::geometric(0.5);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto react = run_react(params(law, 0.0, seed), 200);
    RadiusField field(law, seed, RadiusField::Keying::StepKeyed);
    Occupancy occ(SiteEnvironment::all_occupied(), seed);
    BasicState s = init_state();
    for (std::int64_t n = 1; n <= 200; ++n) {
      s = step(s, field, occ);
      const auto& rec = react.path.steps[static_cast<std::size_t>(n)];
      ASSERT_EQ(rec.l, s.l);
      ASSERT_EQ(rec.r, s.r);
      ASSERT_EQ(rec.active_count, s.active_count());
    }
  }
}

TEST(React, ZeroP2MatchesBasicEngineActivationKeyed) {
  const auto law = RadiusLaw::finite_support({0.3, 0.4, 0.3});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto react = run_react(params(law, 0.0, seed, RadiusKeying::ActivationKeyed), 100);
    const auto basic = run(RadiusField(law, seed), Horizon{100});
    for (std::size_t n = 0; n < basic.steps.size(); ++n) {
      ASSERT_EQ(react.path.steps[n].l, basic.steps[n].l);
      ASSERT_EQ(react.path.steps[n].r, basic.steps[n].r);
    }
  }
}

TEST(React, ConstantZeroNeverSpreads) {
  const auto t = run_react(params(RadiusLaw::constant(0), 0.5, 3), 100);
  for (const auto& rec : t.path.steps) {
    EXPECT_EQ(rec.l, 0);
    EXPECT_EQ(rec.r, 0);
  }
  EXPECT_EQ(t.path.status, TerminalStatus::Censored);
}

TEST(React, ConstantOneUnitSpeed) {
  const auto t = run_react(params(RadiusLaw::constant(1), 0.0, 3), 100);
  for (const auto& rec : t.path.steps) EXPECT_EQ(rec.r, rec.n);
}

TEST(React, FirstStepMean) {
  const auto law = RadiusLaw::finite_support({0.5, 0.5});
  constexpr int reps = 100'000;
  int reached = 0;
  for (int i = 0; i < reps; ++i) reached += run_react(params(law, 0.5, split_seed(4, i)), 1).path.last().r;
  EXPECT_NEAR(static_cast<double>(reached) / reps, 0.5, 3.0 * 0.5 / std::sqrt(reps));
}

TEST(React, WindowedMatchesExactForBoundedLaw) {
  const auto law = RadiusLaw::finite_support({0.4, 0.3, 0.3});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (auto keying : {RadiusKeying::StepKeyed, RadiusKeying::ActivationKeyed}) {
      auto p = params(law, 0.4, seed, keying);
      const auto exact = run_react(p, 300);
      p.window = 2;
      const auto windowed = run_react(p, 300);
      EXPECT_EQ(windowed.error_budget, 0.0);
      for (std::size_t n = 0; n < exact.path.steps.size(); ++n) {
        ASSERT_EQ(exact.path.steps[n].l, windowed.path.steps[n].l);
        ASSERT_EQ(exact.path.steps[n].r, windowed.path.steps[n].r);
      }
    }
  }
}

TEST(React, WindowedErrorBudgetForUnboundedLaw) {
  auto p = params(RadiusLaw::geometric(0.5), 0.5, 1);
  p.window = 40;
  const auto t = run_react(p, 1000);
  EXPECT_GT(t.error_budget, 0.0);
  EXPECT_LT(t.error_budget, 1e-6);
}

TEST(React, MonotoneInP2WithActivationKeys) {
  const auto law = RadiusLaw::finite_support({0.5, 0.5});
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto lo = run_react(params(law, 0.2, seed, RadiusKeying::ActivationKeyed), 200);
    const auto hi = run_react(params(law, 0.6, seed, RadiusKeying::ActivationKeyed), 200);
    for (std::size_t n = 0; n < lo.path.steps.size(); ++n) {
      ASSERT_LE(lo.path.steps[n].r, hi.path.steps[n].r) << "seed " << seed << " step " << n;
      ASSERT_GE(lo.path.steps[n].l, hi.path.steps[n].l) << "seed " << seed << " step " << n;
    }
  }
}

// Reading I^n_v at the step n breaks the p2 coupling: a vertex that fires
// earlier under the larger p2 reads a different radius than it would later.
TEST(React, StepKeyedRadiiAreNotMonotoneInP2) {
  const auto law = RadiusLaw::finite_support({0.5, 0.5});
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 3000 && violations == 0; ++seed) {
    const auto lo = run_react(params(law, 0.2, seed), 200);
    const auto hi = run_react(params(law, 0.6, seed), 200);
    for (std::size_t n = 0; n < lo.path.steps.size(); ++n)
      violations += lo.path.steps[n].r > hi.path.steps[n].r;
  }
  EXPECT_GT(violations, 0);
}

TEST(React, DriftWalkStaysBelowFront) {
  const auto law = RadiusLaw::finite_support({0.5, 0.5});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = params(law, 0.5, seed);
    const auto t = run_react(p, 300);
    const auto x = drift_walk(p, t.path);
    for (std::size_t n = 0; n < x.size(); ++n) ASSERT_LE(x[n], t.path.steps[n].r);
  }
}

TEST(React, DriftTheta) {
  EXPECT_DOUBLE_EQ(drift_theta(RadiusLaw::finite_support({0.5, 0.5}), 0.5), 0.25);
  EXPECT_EQ(drift_theta(RadiusLaw::geometric(0.5), 0.0), 0.0);
  EXPECT_EQ(drift_theta(RadiusLaw::constant(1), 1.0), 1.0);
  const auto t = run_react(params(RadiusLaw::constant(1), 1.0, 2), 50);
  const auto x = drift_walk(params(RadiusLaw::constant(1), 1.0, 2), t.path);
  for (std::size_t n = 0; n < x.size(); ++n) EXPECT_EQ(x[n], t.path.steps[n].r);
}

TEST(React, OneSided) {
  const auto t1 = run_one_sided_react(5, params(RadiusLaw::constant(1), 0.0, 1), 30);
  for (const auto& rec : t1.path.steps) {
    EXPECT_EQ(rec.r, 5 + rec.n);
    EXPECT_EQ(rec.l, 5);
  }
  const auto t0 = run_one_sided_react(5, params(RadiusLaw::constant(0), 0.7, 1), 30);
  EXPECT_EQ(t0.path.last().r, 5);
}

TEST(React, OneSidedIsReproducibleFromKeys) {
  const auto p = params(RadiusLaw::geometric(0.4), 0.3, 77);
  const auto full = run_react(p, 60);
  const Vertex u = full.path.steps[20].r;
  const auto a = run_one_sided_react(u, p, 80, 20);
  const auto b = run_one_sided_react(u, p, 80, 20);
  for (std::size_t n = 0; n < a.path.steps.size(); ++n) {
    EXPECT_EQ(a.path.steps[n].r, b.path.steps[n].r);
    EXPECT_EQ(a.path.steps[n].active_count, b.path.steps[n].active_count);
  }
}

TEST(Probe, ConstantLaws) {
  EXPECT_TRUE(probe_domination(0, params(RadiusLaw::constant(0), 0.5, 1), 100).dominated());
  EXPECT_TRUE(probe_domination(7, params(RadiusLaw::constant(1), 0.0, 1), 100).dominated());
  // Fronts u + 2n - 1 against u + 2n.
  EXPECT_TRUE(probe_domination(0, params(RadiusLaw::constant(2), 0.0, 1), 50).dominated());
}

TEST(Probe, FailureIsFirstViolation) {
  const auto law = RadiusLaw::finite_support({0.5, 0.5});
  int failed = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto probe = probe_domination(0, params(law, 0.5, seed), 100);
    if (probe.dominated()) continue;
    ++failed;
    // Replaying with horizon beta - 1 must not fail.
    if (probe.beta > 1) {
      EXPECT_TRUE(probe_domination(0, params(law, 0.5, seed), probe.beta - 1).dominated());
    }
  }
  EXPECT_GT(failed, 0);
}

TEST(Probe, UnboundedLawNeedsWindow) {
  EXPECT_THROW(probe_domination(0, params(RadiusLaw::geometric(0.5), 0.5, 1), 10),
               std::invalid_argument);
  auto p = params(RadiusLaw::geometric(0.5), 0.5, 1);
  p.window = 50;
  EXPECT_LT(probe_domination(0, p, 10).error_budget, 1e-12);
}

TEST(ReactRenewals, ConstantZeroRenewsEveryStep) {
  const auto ledger = detect_renewals_react(params(RadiusLaw::constant(0), 0.5, 1), 50, 10);
  EXPECT_EQ(ledger.taus.size(), 51u);
}

TEST(ReactRenewals, LongerLagGivesSubset) {
  const auto p = params(RadiusLaw::finite_support({0.5, 0.5}), 0.5, 21);
  const auto h10 = detect_renewals_react(p, 400, 10);
  const auto h50 = detect_renewals_react(p, 400, 50);
  std::size_t i = 0;
  for (const auto& t : h50.taus) {
    while (i < h10.taus.size() && h10.taus[i].step < t.step) ++i;
    ASSERT_LT(i, h10.taus.size());
    EXPECT_EQ(h10.taus[i], t);
  }
  EXPECT_LE(h50.taus.size(), h10.taus.size());
}
