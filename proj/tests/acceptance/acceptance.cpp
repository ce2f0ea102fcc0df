// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria, capped at 1.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rumour/engine.hpp"
#include "rumour/estimators.hpp"
#include "rumour/oracles.hpp"
#include "rumour/parallel.hpp"
#include "rumour/radius_law.hpp"
#include "rumour/reactivation.hpp"
#include "rumour/renewal.hpp"
#include "rumour/statistics.hpp"

using namespace rumour;

namespace {

constexpr std::uint64_t kMaster = 0x5eed2024;

std::uint64_t seed_for(int criterion) {
  return split_seed(kMaster, static_cast<std::uint64_t>(criterion), Purpose::Replicate);
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

const RadiusLaw kSplit = RadiusLaw::finite_support({0.5, 0.0, 0.5});
const RadiusLaw kZeroOne = RadiusLaw::finite_support({0.5, 0.5});
const RadiusLaw kGeomMin1 = RadiusLaw::geometric_min1(0.5);

bool covers(const ProbInterval& ci, double v) { return ci.lo <= v && v <= ci.hi; }

std::vector<std::int64_t> range(std::int64_t a, std::int64_t b) {
  std::vector<std::int64_t> v;
  for (std::int64_t n = a; n <= b; ++n) v.push_back(n);
  return v;
}

// Exact subcritical law: engine frequencies against the oracle values.
void exact_law(Outcome& out, unsigned workers) {
  const auto tables = exact_basic_tables({kSplit, 3});
  const double tau1 = 0.5, tau2 = 0.03125, m5 = 0.03125;  // frozen oracle values
  out.require(tables.tau.at(1) == tau1 && tables.tau.at(2) == tau2 && tables.cluster.at(5) == m5,
              "oracle disagrees with frozen values");
  constexpr std::int64_t reps = 1'000'000;
  const auto runs = basic_replicates(kSplit, SiteEnvironment::all_occupied(), reps, 1000,
                                     {seed_for(1), 0.999, workers});
  std::int64_t t1 = 0, t2 = 0, c5 = 0;
  for (const auto& r : runs) {
    t1 += r.extinct && r.tau == 1;
    t2 += r.extinct && r.tau == 2;
    c5 += r.extinct && r.cluster == 5;
  }
  const auto ci1 = wilson_interval(t1, reps, 0.999);
  const auto ci2 = wilson_interval(t2, reps, 0.999);
  const auto ci5 = wilson_interval(c5, reps, 0.999);
  out.detail << "P(tau=1)=" << double(t1) / reps << " P(tau=2)=" << double(t2) / reps
             << " P(M=5)=" << double(c5) / reps;
  out.require(covers(ci1, tau1), "P(tau=1) outside 99.9% Wilson interval");
  out.require(covers(ci2, tau2), "P(tau=2) outside 99.9% Wilson interval");
  out.require(covers(ci5, m5), "P(M=5) outside 99.9% Wilson interval");
}

void survival_sharpness(Outcome& out, unsigned workers) {
  const auto t = survival_tail(kSplit, SiteEnvironment::all_occupied(), range(3, 25), 1'000'000,
                               {seed_for(2), 0.95, workers});
  out.detail << "slope=" << t.fit.slope << " R2=" << t.fit.r_squared << " points=" << t.fit.points
             << " dropped=" << t.dropped.size();
  out.require(t.fit.slope < 0.0, "slope not negative");
  out.require(t.fit.r_squared >= 0.98, "R2 below 0.98");
}

void hazard_bound(Outcome& out, unsigned workers) {
  const std::pair<const char*, RadiusLaw> laws[] = {{"split", kSplit}, {"geometric(0.5)", RadiusLaw::geometric(0.5)}};
  for (const auto& [name, law] : laws) {
    const auto rep = hazard_check(law, SiteEnvironment::all_occupied(), 30, 1'000'000,
                                  {seed_for(3), 0.95, workers}, 1000);
    std::int64_t checked = 0;
    double worst = 1e300;
    for (const auto& p : rep.points) {
      if (!p.checked) continue;
      ++checked;
      worst = std::min(worst, (p.h_hat - rep.bound) / std::max(p.sigma, 1e-300));
    }
    out.detail << name << ": P(O=0)=" << rep.p_o0 << " bound=" << rep.bound << " checked=" << checked
               << " min (h-bound)/sigma=" << worst << "; ";
    out.require(rep.pass(), std::string(name) + " hazard below bound - 3 sigma");
    out.require(checked > 0, std::string(name) + " no step had enough samples");
  }
}

void overshoot_law(Outcome& out, unsigned) {
  const RadiusLaw laws[] = {RadiusLaw::constant(0), RadiusLaw::constant(1), RadiusLaw::constant(2),
                            RadiusLaw::constant(3), kSplit, kZeroOne,
                            RadiusLaw::finite_support({0.3, 0.4, 0.3})};
  double max_diff = 0.0, max_dkw_ratio = 0.0;
  constexpr std::int64_t samples = 100'000;
  const double eps = dkw_epsilon(samples, 0.01);
  std::uint64_t k = 0;
  for (const auto& law : laws) {
    const auto exact = exact_overshoot_distribution(law);
    const OvershootSampler sampler(law, DepthPolicy::exact_bounded());
    SplitMix64 rng(split_seed(seed_for(4), k++, Purpose::Overshoot));
    std::map<Radius, std::int64_t> counts;
    for (std::int64_t i = 0; i < samples; ++i) ++counts[sampler(rng).value];
    const Radius top = *law.support_bound() + 1;
    double cdf = 0.0;
    std::int64_t below = 0;
    for (Radius m = 0; m <= top; ++m) {
      if (auto it = exact.find(m); it != exact.end()) cdf += it->second;
      if (auto it = counts.find(m); it != counts.end()) below += it->second;
      const auto formula = overshoot_cdf_exact(OvershootQuery::with_depth(law, top + 1), m);
      max_diff = std::max(max_diff, std::abs(formula.value - cdf));
      max_dkw_ratio = std::max(max_dkw_ratio, std::abs(double(below) / samples - cdf) / eps);
    }
  }
  out.detail << "max |formula - enumeration|=" << max_diff << " max ECDF gap / DKW eps=" << max_dkw_ratio;
  out.require(max_diff <= 1e-12, "closed form and enumeration differ");
  out.require(max_dkw_ratio <= 1.0, "ECDF leaves the 99% DKW band");
}

void renewal_structure(Outcome& out, unsigned workers) {
  constexpr std::size_t J = 2000;
  const RadiusField field(kGeomMin1, seed_for(5));
  const auto ledger = collect_renewals(field, J + 1, DepthPolicy::tail_budget(1e-12));
  auto incs = ledger.iid_increments();
  incs.resize(std::min(incs.size(), J));
  out.require(incs.size() == J, "not enough renewals");
  const auto diag = iid_diagnostics(incs, seed_for(5));
  const double bound = 3.0 / std::sqrt(double(J));
  out.detail << "lag1(dtau)=" << diag.d_tau.lag1 << " lag1(dr)=" << diag.d_r.lag1 << " bound=" << bound
             << " half-KS p=" << diag.d_tau.half_vs_half.p_value << "," << diag.d_r.half_vs_half.p_value;
  out.require(std::abs(diag.d_tau.lag1) <= bound && std::abs(diag.d_r.lag1) <= bound, "lag-1 autocorrelation");
  out.require(diag.d_tau.half_vs_half.p_value >= 0.01 && diag.d_r.half_vs_half.p_value >= 0.01,
              "half-vs-half KS");

  constexpr std::int64_t n = 10'000;
  const auto one_sided = parallel_map(n, workers, [&](std::int64_t i) {
    const RadiusField f(kGeomMin1, split_seed(seed_for(5), static_cast<std::uint64_t>(i), Purpose::RadiusField),
                        RadiusField::Keying::StepKeyed);
    return sample_one_sided_renewal(f);
  });
  const RadiusField long_field(kGeomMin1, split_seed(seed_for(5), 0, Purpose::Centering));
  auto full = collect_renewals(long_field, n + 1, DepthPolicy::tail_budget(1e-12)).iid_increments();
  full.resize(n);
  std::vector<double> a_t, a_r, b_t, b_r;
  for (const auto& s : one_sided) {
    out.require(s.found, "one-sided process censored");
    a_t.push_back(double(s.time));
    a_r.push_back(double(s.r));
  }
  for (const auto& inc : full) {
    b_t.push_back(double(inc.d_tau));
    b_r.push_back(double(inc.d_r));
  }
  const auto kt = ks_two_sample(a_t, b_t);
  const auto kr = ks_two_sample(a_r, b_r);
  out.detail << " one-sided vs full KS p=" << kt.p_value << "," << kr.p_value;
  out.require(kt.p_value >= 0.01 && kr.p_value >= 0.01, "one-sided increment law differs");
}

void speed(Outcome& out, unsigned workers) {
  for (Radius c : {1, 2, 3}) {
    const auto law = RadiusLaw::constant(c);
    const auto lln = speed_lln(law, 10'000, 32, {seed_for(6), 0.95, workers});
    const auto ren = speed_renewal(law, 10'000, {seed_for(6), 0.95, workers}, DepthPolicy::exact_bounded());
    out.require(lln.point == double(c) && ren.point == double(c), "Constant(" + std::to_string(c) + ") not exact");
  }
  const RunOptions opt{seed_for(6), 0.95, workers};
  const auto lln = speed_lln(kGeomMin1, 100'000, 32, opt);
  const auto ren = speed_renewal(kGeomMin1, 10'000'000, opt);
  const double joint = 1.959963984540054 * std::hypot(lln.standard_error(), ren.standard_error());
  out.detail << "constants exact; lln=" << lln.point << " [" << lln.lo << "," << lln.hi << "] renewal=" << ren.point
             << " [" << ren.lo << "," << ren.hi << "] |diff|=" << std::abs(lln.point - ren.point)
             << " joint=" << joint;
  out.require(std::abs(lln.point - ren.point) <= joint, "estimates disagree");
  out.require(lln.point >= 1.0 && ren.point >= 1.0, "speed below 1");
}

void clt(Outcome& out, unsigned workers) {
  const auto rep = clt_check(kGeomMin1, 2000, 2000, {seed_for(7), 0.95, workers});
  out.detail << "mu=" << rep.mu_hat << " psi=" << rep.psi_hat << " KS=" << rep.ks_distance
             << " (lattice-corrected " << rep.ks_distance_lattice << ") crit=" << rep.ks_critical
             << " sqrt(n)*se(mu)=" << rep.mu_se * std::sqrt(2000.0) << " mean z=" << rep.mean_z
             << " 3psi/sqrtM=" << 3.0 * rep.psi_hat / std::sqrt(2000.0);
  out.require(!rep.degenerate, "degenerate");
  out.require(rep.ks_pass(), "KS distance above critical value");
  out.require(rep.centering_pass(), "mean of z too far from 0");
}

void criterion(Outcome& out, unsigned) {
  const std::tuple<const char*, RadiusLaw, PercolationVerdict> cases[] = {
      {"Geometric(0.5)", RadiusLaw::geometric(0.5), PercolationVerdict::NoPercolation},
      {"Constant(1)", RadiusLaw::constant(1), PercolationVerdict::PercolatesWithPositiveProb},
      {"PolynomialTail(0.5,0.5)", RadiusLaw::polynomial_tail(0.5, 0.5), PercolationVerdict::PercolatesWithPositiveProb},
      {"PolynomialTail(2,0.5)", RadiusLaw::polynomial_tail(2.0, 0.5), PercolationVerdict::NoPercolation},
  };
  for (const auto& [name, law, expected] : cases) {
    const auto got = percolation_criterion(law).verdict;
    out.detail << name << "=" << to_string(got) << "; ";
    out.require(got == expected, std::string(name) + " verdict");
  }
}

void react_couplings(Outcome& out, unsigned workers) {
  constexpr std::int64_t seeds = 1000, steps = 200;
  const RadiusLaw laws[] = {kGeomMin1, RadiusLaw::geometric(0.5), kZeroOne};
  // (a) p2 = 0 against the basic engine on the same step-keyed radii.
  std::int64_t mismatches = 0;
  for (const auto& law : laws) {
    const auto bad = parallel_map(seeds, workers, [&](std::int64_t i) {
      ReactParams p;
      p.law = law;
      p.seed = split_seed(seed_for(9), static_cast<std::uint64_t>(i), Purpose::ReactRadius);
      const auto react = run_react(p, steps);
      const RadiusField field(law, p.seed, RadiusField::Keying::StepKeyed);
      Occupancy occ(SiteEnvironment::all_occupied(), 0);
      BasicState s = init_state();
      StepRecord rec0 = react.path.steps[0];
      int diff = rec0.l != s.l || rec0.r != s.r || rec0.active_count != s.active_count();
      for (std::int64_t n = 1; n <= steps; ++n) {
        s = step(s, field, occ);
        const auto& rec = react.path.steps[static_cast<std::size_t>(n)];
        diff += rec.l != s.l || rec.r != s.r || rec.active_count != s.active_count();
      }
      return diff;
    });
    for (int b : bad) mismatches += b;
  }
  // (b) monotone in p2 with activation-keyed radii; (c) drift walk below the front.
  std::int64_t monotone_violations = 0, drift_violations = 0;
  for (const auto& law : {kGeomMin1, kZeroOne}) {
    const auto v = parallel_map(seeds, workers, [&](std::int64_t i) {
      ReactParams p;
      p.law = law;
      p.seed = split_seed(seed_for(9), static_cast<std::uint64_t>(i), Purpose::ReactClock);
      p.keying = RadiusKeying::ActivationKeyed;
      p.p2 = 0.2;
      const auto lo = run_react(p, steps);
      p.p2 = 0.6;
      const auto hi = run_react(p, steps);
      std::pair<std::int64_t, std::int64_t> bad{0, 0};
      for (std::size_t n = 0; n < lo.path.steps.size(); ++n)
        bad.first += lo.path.steps[n].r > hi.path.steps[n].r;
      for (double p2 : {0.2, 0.6}) {
        ReactParams q = p;
        q.keying = RadiusKeying::StepKeyed;
        q.p2 = p2;
        const auto t = run_react(q, steps);
        const auto x = drift_walk(q, t.path);
        for (std::size_t n = 0; n < x.size(); ++n) bad.second += x[n] > t.path.steps[n].r;
      }
      return bad;
    });
    for (const auto& [m, d] : v) {
      monotone_violations += m;
      drift_violations += d;
    }
  }
  out.detail << "p2=0 mismatching steps=" << mismatches << " monotonicity violations=" << monotone_violations
             << " drift violations=" << drift_violations;
  out.require(mismatches == 0, "p2 = 0 run differs from basic run");
  out.require(monotone_violations == 0, "front not monotone in p2");
  out.require(drift_violations == 0, "drift walk above the front");
}

void react_speed(Outcome& out, unsigned workers) {
  ReactParams p;
  p.law = kZeroOne;
  p.p2 = 0.5;
  p.window = 1;  // exact for a law bounded by 1
  const double theta = drift_theta(p.law, p.p2);
  const RunOptions opt{seed_for(10), 0.95, workers};
  const auto a = speed_lln_react(p, 100'000, 32, opt);
  const auto b = speed_lln_react(p, 200'000, 32, opt);
  out.detail << "theta=" << theta << " mu'(N)=" << a.point << " [" << a.lo << "," << a.hi << "] mu'(2N)=" << b.point
             << " |diff|=" << std::abs(a.point - b.point) << " halfwidth=" << a.halfwidth();
  out.require(theta == 0.25, "theta");
  out.require(a.lo >= theta && a.hi <= 1.0, "CI outside [theta, 1]");
  out.require(std::abs(a.point - b.point) <= a.halfwidth(), "N and 2N disagree");
}

void beta_tail(Outcome& out, unsigned workers) {
  ReactParams p;
  p.law = kZeroOne;
  p.p2 = 0.5;
  const auto b = beta_survival(p, 500, 100'000, {seed_for(11), 0.95, workers});
  out.detail << "failed probes=" << b.failed << " slope=" << b.fit.slope << " R2=" << b.fit.r_squared
             << " points=" << b.fit.points << " survivors at n=10,40,160,320: " << b.points[10].survivors << ","
             << b.points[40].survivors << "," << b.points[160].survivors << "," << b.points[320].survivors;
  out.require(b.fit.slope < 0.0, "slope not negative");
  out.require(b.fit.r_squared >= 0.9, "R2 below 0.9");
}

void site_environment(Outcome& out, unsigned workers) {
  const auto law = RadiusLaw::geometric(0.5);
  const auto env = SiteEnvironment::bernoulli(0.7);
  const auto g = percolation_prob(law, env, 1000, 10'000, {seed_for(12), 0.95, workers});
  const auto t = survival_tail(law, env, range(3, 25), 100'000, {seed_for(12) + 1, 0.95, workers});
  out.detail << "gamma=" << g.point << " slope=" << t.fit.slope << " R2=" << t.fit.r_squared
             << " points=" << t.fit.points;
  out.require(g.point <= 0.001, "gamma above 0.001");
  out.require(t.fit.slope < 0.0, "slope not negative");
  out.require(t.fit.r_squared >= 0.95, "R2 below 0.95");
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  void (*run)(Outcome&, unsigned);
};

}  // namespace

int main() {
  const unsigned workers = default_workers();
  const Criterion all[] = {
      {1, "exact subcritical law", 60, exact_law},
      {2, "survival tail sharpness", 120, survival_sharpness},
      {3, "hazard lower bound", 120, hazard_bound},
      {4, "overshoot law", 30, overshoot_law},
      {5, "renewal iid structure", 300, renewal_structure},
      {6, "speed", 300, speed},
      {7, "central limit theorem", 600, clt},
      {8, "percolation criterion", 10, criterion},
      {9, "reactivation couplings", 180, react_couplings},
      {10, "reactivation speed", 600, react_speed},
      {11, "beta tail", 600, beta_tail},
      {12, "site environment", 180, site_environment},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(out, workers);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(secs < c.budget_seconds, "runtime budget");
    failed += !out.pass;
    std::printf("%s criterion %d (%s): %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(all)) - failed, std::size(all));
  return failed ? 1 : 0;
}
