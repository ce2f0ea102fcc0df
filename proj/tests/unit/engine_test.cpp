#include <gtest/gtest.h>

#include <cmath>
#include "rumour/engine.hpp"

using namespace rumour;

namespace {

bool same(const SetState& a, const SetState& b) {
  return a.n == b.n && a.heard == b.heard && a.active == b.active;
}

}  // namespace

TEST(Engine, InitIsOriginOnly) {
  const BasicState s = init_state();
  EXPECT_EQ(s.n, 0);
  EXPECT_EQ(s.l, 0);
  EXPECT_EQ(s.r, 0);
  EXPECT_EQ(s.active_count(), 1);
  for (auto env : {SiteEnvironment::bernoulli(0.5), SiteEnvironment::markov(0.5, 0.5),
                   SiteEnvironment::bernoulli(0.0)}) {
    Occupancy occ(env, 9);
    EXPECT_TRUE(occ.occupied(0));
  }
}

TEST(Engine, ConstantOneSingleStep) {
  RadiusField field(RadiusLaw::constant(1), 1);
  Occupancy occ(SiteEnvironment::all_occupied(), 1);
  const BasicState s = step(init_state(), field, occ);
  EXPECT_EQ(s.l, -1);
  EXPECT_EQ(s.r, 1);
  EXPECT_EQ(s.active_left, (Interval{-1, -1}));
  EXPECT_EQ(s.active_right, (Interval{1, 1}));
}

TEST(Engine, ConstantZeroDiesAtOnce) {
  RadiusField field(RadiusLaw::constant(0), 1);
  const Trajectory t = run(field, UntilExtinct{10});
  EXPECT_TRUE(t.extinct());
  EXPECT_EQ(t.tau, 1);
  EXPECT_EQ(t.cluster_size, 1);
}

TEST(Engine, HandBuiltTauTwo) {
  RadiusField field(RadiusLaw::finite_support({0.5, 0.0, 0.5}), 1);
  field.set_override(0, 2);
  for (Vertex v : {-2, -1, 1, 2}) field.set_override(v, 0);
  const Trajectory t = run(field, UntilExtinct{10});
  EXPECT_TRUE(t.extinct());
  EXPECT_EQ(t.tau, 2);
  EXPECT_EQ(t.cluster_size, 5);
  EXPECT_EQ(t.size_plus, 3);
  EXPECT_EQ(t.size_minus, 3);
}

TEST(Engine, DeterministicSpeeds) {
  for (Radius c : {1, 2, 3}) {
    RadiusField field(RadiusLaw::constant(c), 5);
    const Trajectory t = run(field, Horizon{100});
    EXPECT_EQ(t.status, TerminalStatus::Censored);
    ASSERT_EQ(t.steps.size(), 101u);
    for (const auto& rec : t.steps) {
      EXPECT_EQ(rec.r, c * rec.n);
      EXPECT_EQ(rec.l, -c * rec.n);
    }
  }
}

TEST(Engine, OneSided) {
  const Trajectory t1 = run_one_sided(RadiusField(RadiusLaw::constant(1), 1), Horizon{50});
  for (const auto& rec : t1.steps) {
    EXPECT_EQ(rec.r, rec.n);
    EXPECT_EQ(rec.l, 0);
    EXPECT_EQ(rec.active_count, 1);
  }
  const Trajectory t0 = run_one_sided(RadiusField(RadiusLaw::constant(0), 1), UntilExtinct{10});
  EXPECT_TRUE(t0.extinct());
  EXPECT_EQ(t0.tau, 1);
}

TEST(Engine, OneSidedFirstStepMean) {
  const auto law = RadiusLaw::geometric_min1(0.5);
  constexpr int n = 100'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += static_cast<double>(run_one_sided(RadiusField(law, split_seed(17, i)), Horizon{1}).last().r);
  // Var I = q / (1-q)^2 = 2.
  EXPECT_NEAR(sum / n, 2.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(Engine, StopRulesValidate) {
  RadiusField field(RadiusLaw::constant(1), 1);
  EXPECT_THROW(run(field, Horizon{0}), std::invalid_argument);
  EXPECT_THROW(run(field, UntilExtinct{0}), std::invalid_argument);
  EXPECT_THROW(run(field, RightReaches{0, 10}), std::invalid_argument);
  const Trajectory t = run(field, RightReaches{7, 100});
  EXPECT_EQ(t.last().r, 7);
  EXPECT_EQ(t.status, TerminalStatus::Censored);
}

TEST(Engine, MatchesSetReference) {
  struct Case {
    RadiusLaw law;
    SiteEnvironment env;
    std::int64_t steps;
  };
  const std::vector<Case> cases = {
      {RadiusLaw::finite_support({0.5, 0.0, 0.5}), SiteEnvironment::all_occupied(), 200},
      {RadiusLaw::finite_support({0.5, 0.5}), SiteEnvironment::bernoulli(0.7), 200},
      {RadiusLaw::geometric(0.5), SiteEnvironment::all_occupied(), 200},
      {RadiusLaw::geometric(0.5), SiteEnvironment::markov(0.6, 0.8), 200},
      {RadiusLaw::geometric_min1(0.5), SiteEnvironment::bernoulli(0.8), 40},
      {RadiusLaw::polynomial_tail(2.5, 0.4), SiteEnvironment::all_occupied(), 200},
      {RadiusLaw::constant(2), SiteEnvironment::markov(0.3, 0.7), 40},
      {RadiusLaw::finite_support({0.1, 0.3, 0.6}), SiteEnvironment::all_occupied(), 40},
  };
  int runs = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (int seed = 0; seed < 125; ++seed, ++runs) {
      const std::uint64_t s = split_seed(2024, runs);
      RadiusField field(cases[c].law, s);
      Occupancy occ_a(cases[c].env, s);
      Occupancy occ_b(cases[c].env, s);
      BasicState fast = init_state();
      SetState ref = init_set_state();
      for (std::int64_t n = 0; n < cases[c].steps && !fast.extinct(); ++n) {
        fast = step(fast, field, occ_a);
        ref = step_reference(ref, field, occ_b);
        ASSERT_TRUE(same(to_set_state(fast), ref))
            << "case " << c << " seed " << seed << " step " << fast.n;
      }
      if (fast.extinct()) {
        EXPECT_TRUE(ref.active.empty());
      }
    }
  }
  EXPECT_EQ(runs, 1000);
}

TEST(Engine, MonotoneInLaw) {
  const auto low = RadiusLaw::geometric(0.3);
  const auto high = RadiusLaw::geometric(0.6);
  for (int seed = 0; seed < 200; ++seed) {
    const auto a = run(RadiusField(low, seed), Horizon{100});
    const auto b = run(RadiusField(high, seed), Horizon{100});
    for (std::size_t n = 0; n < a.steps.size(); ++n) {
      const auto& sb = n < b.steps.size() ? b.steps[n] : b.last();
      EXPECT_LE(a.steps[n].r, sb.r);
      EXPECT_GE(a.steps[n].l, sb.l);
    }
  }
}

TEST(Engine, ExtinctionIsAbsorbing) {
  RadiusField field(RadiusLaw::finite_support({0.5, 0.0, 0.5}), 3);
  Occupancy occ(SiteEnvironment::all_occupied(), 3);
  BasicState s = init_state();
  while (!s.extinct()) s = step(s, field, occ);
  const BasicState after = step(s, field, occ);
  EXPECT_TRUE(after.extinct());
  EXPECT_EQ(after.l, s.l);
  EXPECT_EQ(after.r, s.r);
}

TEST(Engine, NoZeroMassMeansLinearGrowth) {
  for (int seed = 0; seed < 50; ++seed) {
    const auto t = run(RadiusField(RadiusLaw::geometric_min1(0.4), seed), Horizon{100});
    for (const auto& rec : t.steps) {
      EXPECT_GE(rec.r, rec.n);
      EXPECT_LE(rec.l, -rec.n);
    }
  }
}

TEST(Engine, MarkovSitesAreStableAcrossQueries) {
  Occupancy a(SiteEnvironment::markov(0.5, 0.5), 77);
  Occupancy b(SiteEnvironment::markov(0.5, 0.5), 77);
  std::vector<bool> forward;
  for (Vertex v = -30; v <= 30; ++v) forward.push_back(a.occupied(v));
  for (Vertex v = 30; v >= -30; --v) EXPECT_EQ(b.occupied(v), forward[static_cast<std::size_t>(v + 30)]);
}

TEST(Engine, StepKeyedFieldReadsActivationStep) {
  RadiusField field(RadiusLaw::geometric(0.5), 8, RadiusField::Keying::StepKeyed);
  KeyedStreams streams{8};
  for (std::int64_t n = 0; n < 20; ++n)
    EXPECT_EQ(field.radius(3, n), RadiusLaw::geometric(0.5).quantile(streams.radius_uniform(n, 3)));
}
