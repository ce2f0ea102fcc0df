#include "rumour/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "rumour/parallel.hpp"

namespace rumour {

unsigned default_workers() {
  if (const char* env = std::getenv("RUMOUR_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

DepthPolicy sigma_policy_for(const RadiusLaw& law) {
  return law.support_bound() ? DepthPolicy::exact_bounded() : DepthPolicy::tail_budget(1e-12);
}

EstimateReport mean_report(const std::string& quantity, const std::vector<double>& x, double level,
                           bool student) {
  const MeanVar mv = mean_variance(x);
  EstimateReport rep;
  rep.quantity = quantity;
  rep.level = level;
  rep.replicates = mv.n;
  rep.point = mv.mean;
  double q = z_for_level(level);
  if (student && mv.n > 1) q = student_t_quantile(static_cast<double>(mv.n - 1), 0.5 + 0.5 * level);
  const double half = mv.n > 1 ? q * std::sqrt(mv.variance / static_cast<double>(mv.n)) : 0.0;
  rep.lo = mv.mean - half;
  rep.hi = mv.mean + half;
  return rep;
}

bool is_point_mass(const RadiusLaw& law) {
  const auto b = law.support_bound();
  return b && (*b == 0 || law.cdf(*b - 1) == 0.0);
}

}  // namespace

BasicOutcome basic_replicate(const RadiusLaw& law, const SiteEnvironment& env, std::uint64_t seed,
                             std::int64_t index, std::int64_t cap) {
  const auto i = static_cast<std::uint64_t>(index);
  const RadiusField field(law, split_seed(seed, i, Purpose::RadiusField));
  Occupancy occupancy(env, split_seed(seed, i, Purpose::SiteField));
  BasicState s = init_state();
  while (!s.extinct() && s.n < cap) s = step(s, field, occupancy);
  return {s.n, s.r - s.l + 1, s.extinct()};
}

std::vector<BasicOutcome> basic_replicates(const RadiusLaw& law, const SiteEnvironment& env,
                                           std::int64_t replicates, std::int64_t cap,
                                           const RunOptions& opt) {
  if (replicates < 1) throw std::invalid_argument("replicates must be positive");
  if (cap < 1) throw std::invalid_argument("cap must be positive");
  return parallel_map(replicates, opt.workers, [&](std::int64_t i) {
    return basic_replicate(law, env, opt.seed, i, cap);
  });
}

LinearFit fit_log_survival(const std::vector<SurvivalPoint>& points, std::vector<std::int64_t>* dropped) {
  std::vector<double> x, y, w;
  for (const auto& p : points) {
    if (p.survivors == 0) {
      if (dropped) dropped->push_back(p.n);
      continue;
    }
    const double n = static_cast<double>(p.replicates);
    const double q = std::max(1.0 - p.p_hat, 1.0 / n);
    x.push_back(static_cast<double>(p.n));
    y.push_back(std::log(p.p_hat));
    w.push_back(n * p.p_hat / q);
  }
  return weighted_linear_fit(x, y, w);
}

SurvivalTable survival_from_taus(const std::vector<BasicOutcome>& runs, const std::vector<std::int64_t>& ns,
                                 double level) {
  SurvivalTable t;
  t.replicates = static_cast<std::int64_t>(runs.size());
  const std::int64_t nmax = ns.empty() ? 0 : *std::max_element(ns.begin(), ns.end());
  std::vector<std::int64_t> sorted;
  sorted.reserve(runs.size());
  for (const auto& r : runs) {
    if (!r.extinct) {
      if (r.tau <= nmax) throw std::invalid_argument("run censored before the largest n");
      ++t.censored;
    }
    sorted.push_back(r.extinct ? r.tau : nmax + 1);
  }
  std::sort(sorted.begin(), sorted.end());
  for (std::int64_t n : ns) {
    SurvivalPoint p;
    p.n = n;
    p.replicates = t.replicates;
    p.survivors = static_cast<std::int64_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), n));
    p.p_hat = static_cast<double>(p.survivors) / static_cast<double>(p.replicates);
    const auto ci = wilson_interval(p.survivors, p.replicates, level);
    p.lo = ci.lo;
    p.hi = ci.hi;
    t.points.push_back(p);
  }
  t.fit = fit_log_survival(t.points, &t.dropped);
  if (!t.dropped.empty()) t.notes.push_back("ns with zero survivors dropped from the fit");
  return t;
}

SurvivalTable survival_tail(const RadiusLaw& law, const SiteEnvironment& env,
                            const std::vector<std::int64_t>& ns, std::int64_t replicates,
                            const RunOptions& opt) {
  if (ns.empty()) throw std::invalid_argument("survival_tail needs at least one n");
  const std::int64_t nmax = *std::max_element(ns.begin(), ns.end());
  SurvivalTable t = survival_from_taus(basic_replicates(law, env, replicates, nmax + 1, opt), ns, opt.level);
  if (law.p1() == 0.0 && env.kind() == SiteEnvironment::Kind::AllOccupied)
    t.notes.push_back("warning: p1 = 0, the rumour survives forever");
  else if (percolation_criterion(law).verdict != PercolationVerdict::NoPercolation)
    t.notes.push_back("warning: criterion does not certify the subcritical regime");
  return t;
}

bool HazardReport::pass() const {
  return std::all_of(points.begin(), points.end(), [](const HazardPoint& p) { return p.pass; });
}

HazardReport hazard_from_taus(const RadiusLaw& law, const std::vector<BasicOutcome>& runs,
                              std::int64_t nmax, std::int64_t min_conditional) {
  HazardReport rep;
  rep.min_conditional = min_conditional;
  const OvershootCdf o = overshoot_cdf_exact(OvershootQuery::with_error(law), 0);
  if (o.status == OvershootStatus::Inconclusive) throw std::invalid_argument("P(O = 0) is not computable for this law");
  rep.p_o0 = o.value;
  rep.bound = o.value * o.value;

  std::vector<std::int64_t> at_tau(static_cast<std::size_t>(nmax) + 2, 0);
  std::int64_t beyond = 0;  // tau > nmax + 1 or censored
  for (const auto& r : runs) {
    if (r.extinct && r.tau <= nmax + 1)
      ++at_tau[static_cast<std::size_t>(r.tau)];
    else
      ++beyond;
  }
  std::int64_t at_risk = static_cast<std::int64_t>(runs.size());  // tau > 0 always
  for (std::int64_t n = 0; n <= nmax; ++n) {
    HazardPoint p;
    p.n = n;
    p.at_risk = at_risk;
    p.events = at_tau[static_cast<std::size_t>(n) + 1];
    if (at_risk > 0) {
      p.h_hat = static_cast<double>(p.events) / static_cast<double>(at_risk);
      p.sigma = std::sqrt(p.h_hat * (1.0 - p.h_hat) / static_cast<double>(at_risk));
    }
    p.checked = at_risk >= min_conditional;
    p.pass = !p.checked || p.h_hat >= rep.bound - 3.0 * p.sigma;
    rep.points.push_back(p);
    at_risk -= p.events;
  }
  (void)beyond;
  const auto skipped = std::count_if(rep.points.begin(), rep.points.end(),
                                     [](const HazardPoint& p) { return !p.checked; });
  if (skipped > 0)
    rep.notes.push_back(std::to_string(skipped) + " steps skipped for lack of conditional samples");
  return rep;
}

HazardReport hazard_check(const RadiusLaw& law, const SiteEnvironment& env, std::int64_t nmax,
                          std::int64_t replicates, const RunOptions& opt, std::int64_t min_conditional) {
  return hazard_from_taus(law, basic_replicates(law, env, replicates, nmax + 2, opt), nmax,
                          min_conditional);
}

EstimateReport percolation_prob(const RadiusLaw& law, const SiteEnvironment& env,
                                std::int64_t horizon, std::int64_t replicates, const RunOptions& opt) {
  const auto runs = basic_replicates(law, env, replicates, horizon, opt);
  const auto alive = std::count_if(runs.begin(), runs.end(), [](const BasicOutcome& r) { return !r.extinct; });
  EstimateReport rep;
  rep.quantity = "gamma";
  rep.method = "survivors_at_horizon";
  rep.level = opt.level;
  rep.replicates = replicates;
  rep.censored = alive;
  rep.point = static_cast<double>(alive) / static_cast<double>(replicates);
  const auto ci = wilson_interval(alive, replicates, opt.level);
  rep.lo = ci.lo;
  rep.hi = ci.hi;
  rep.notes.push_back("biased upward: runs alive at horizon " + std::to_string(horizon) +
                      " are counted as percolating");
  return rep;
}

ClusterReport cluster_from_runs(const std::vector<BasicOutcome>& runs, double level) {
  ClusterReport rep;
  rep.replicates = static_cast<std::int64_t>(runs.size());
  std::vector<double> m1, m2;
  for (const auto& r : runs) {
    if (!r.extinct) {
      ++rep.censored;
      continue;
    }
    ++rep.counts[r.cluster];
    m1.push_back(static_cast<double>(r.cluster));
    m2.push_back(static_cast<double>(r.cluster) * static_cast<double>(r.cluster));
  }
  rep.mean = mean_report("M", m1, level, false);
  rep.second_moment = mean_report("M^2", m2, level, false);
  rep.mean.censored = rep.second_moment.censored = rep.censored;
  rep.mean.method = rep.second_moment.method = "sample_moment_extinct_runs";

  const auto done = static_cast<std::int64_t>(m1.size());
  std::int64_t above = done;
  for (const auto& [m, c] : rep.counts) {
    above -= c;
    SurvivalPoint p;
    p.n = m;
    p.replicates = done;
    p.survivors = above;
    p.p_hat = static_cast<double>(above) / static_cast<double>(done);
    const auto ci = wilson_interval(above, done, level);
    p.lo = ci.lo;
    p.hi = ci.hi;
    rep.survival.push_back(p);
  }
  rep.tail_fit = fit_log_survival(rep.survival, nullptr);
  if (static_cast<double>(rep.censored) > 0.01 * static_cast<double>(rep.replicates)) {
    rep.flagged = true;
    rep.notes.push_back("warning: more than 1% of runs censored");
  }
  return rep;
}

ClusterReport cluster_moments(const RadiusLaw& law, const SiteEnvironment& env,
                              std::int64_t replicates, std::int64_t cap, const RunOptions& opt) {
  return cluster_from_runs(basic_replicates(law, env, replicates, cap, opt), opt.level);
}

Vertex basic_right_front(const RadiusField& field, std::int64_t steps) {
  Occupancy occupancy(SiteEnvironment::all_occupied(), 0);
  BasicState s = init_state();
  while (s.n < steps && !s.extinct()) s = step(s, field, occupancy);
  return s.r;
}

EstimateReport speed_lln(const RadiusLaw& law, std::int64_t steps, std::int64_t replicates,
                         const RunOptions& opt) {
  if (steps < 1) throw std::invalid_argument("speed_lln needs N >= 1");
  const auto ratios = parallel_map(replicates, opt.workers, [&](std::int64_t i) {
    const RadiusField field(law, split_seed(opt.seed, static_cast<std::uint64_t>(i), Purpose::RadiusField));
    return static_cast<double>(basic_right_front(field, steps)) / static_cast<double>(steps);
  });
  EstimateReport rep = mean_report("mu", ratios, opt.level, true);
  rep.method = "lln_across_replicates";
  if (law.p1() > 0.0) rep.notes.push_back("warning: p1 > 0, the basic model is not supercritical");
  return rep;
}

EstimateReport speed_lln_react(const ReactParams& params, std::int64_t steps,
                               std::int64_t replicates, const RunOptions& opt) {
  if (steps < 1) throw std::invalid_argument("speed_lln needs N >= 1");
  params.validate();
  const auto ratios = parallel_map(replicates, opt.workers, [&](std::int64_t i) {
    ReactParams p = params;
    p.seed = split_seed(opt.seed, static_cast<std::uint64_t>(i), Purpose::ReactRadius);
    ReactivationState s = react_init(ReactShape::TwoSided, 0, p);
    while (s.n < steps) step_react(s, p);
    return static_cast<double>(s.r) / static_cast<double>(steps);
  });
  EstimateReport rep = mean_report("mu_prime", ratios, opt.level, true);
  rep.method = "lln_across_replicates";
  if (params.window) {
    ReactParams p = params;
    const double budget = std::min(1.0, static_cast<double>(steps) * react_step_error(p, ReactShape::TwoSided));
    rep.notes.push_back("windowed fronts, per-path error budget " + std::to_string(budget));
  }
  return rep;
}

EstimateReport speed_renewal(const RadiusLaw& law, std::int64_t steps, const RunOptions& opt,
                             DepthPolicy policy, RatioCiMethod method) {
  const RadiusField field(law, split_seed(opt.seed, 0, Purpose::Centering));
  const auto deterministic = [&] {
    // Constant(c >= 2) never advances by exactly one; the path is deterministic.
    EstimateReport rep;
    rep.quantity = "mu";
    rep.method = "deterministic_law";
    rep.level = opt.level;
    rep.replicates = 1;
    rep.point = rep.lo = rep.hi =
        static_cast<double>(basic_right_front(field, steps)) / static_cast<double>(steps);
    rep.notes.push_back("point-mass law has no renewals; reported r_N / N");
    return rep;
  };
  if (method == RatioCiMethod::Delta) {
    const RenewalSummary sum = summarize_renewals(field, steps, policy);
    if (sum.moments.count == 0 && is_point_mass(law)) return deterministic();
    EstimateReport rep = speed_from_moments(sum.moments, opt.level);
    if (!sum.sigma_certified) rep.notes.push_back("uncertified sigma");
    return rep;
  }
  const RenewalLedger ledger = renewals_over_horizon(field, steps, policy);
  if (ledger.iid_increments().empty() && is_point_mass(law)) return deterministic();
  EstimateReport rep = speed_from_renewals(ledger, opt.level, method, opt.seed);
  rep.censored = ledger.truncated ? 1 : 0;
  return rep;
}

CltReport clt_check(const RadiusLaw& law, std::int64_t n, std::int64_t replicates,
                    const RunOptions& opt, const CltOptions& clt) {
  if (n < 1 || replicates < 2) throw std::invalid_argument("clt_check needs n >= 1 and at least 2 replicates");
  CltReport rep;
  rep.n = n;
  rep.replicates = replicates;
  rep.mu_source = clt.mu_source;
  rep.ks_alpha = clt.ks_alpha;
  if (law.p1() > 0.0) rep.notes.push_back("warning: p1 > 0");
  if (!(law.moment_order() > 4.0)) rep.notes.push_back("warning: fourth moment of the radius may be infinite");

  const auto fronts = parallel_map(replicates, opt.workers, [&](std::int64_t i) {
    const RadiusField field(law, split_seed(opt.seed, static_cast<std::uint64_t>(i), Purpose::RadiusField));
    return static_cast<double>(basic_right_front(field, n));
  });

  switch (clt.mu_source) {
    case MuSource::Fixed:
      rep.mu_hat = clt.fixed_mu;
      break;
    case MuSource::Lln:
      rep.mu_hat = std::accumulate(fronts.begin(), fronts.end(), 0.0) /
                   (static_cast<double>(replicates) * static_cast<double>(n));
      rep.notes.push_back("centering reuses the tested paths");
      break;
    case MuSource::Renewal: {
      const RadiusField field(law, split_seed(opt.seed, 1, Purpose::Centering));
      const RenewalSummary sum = summarize_renewals(field, clt.centering_steps, sigma_policy_for(law));
      const auto& m = sum.moments;
      if (m.count == 0) {
        // Degenerate laws without renewals still have a deterministic speed.
        rep.mu_hat = static_cast<double>(basic_right_front(field, clt.centering_steps)) /
                     static_cast<double>(clt.centering_steps);
        rep.notes.push_back("no renewals in the centering run; used r_N / N");
        break;
      }
      const EstimateReport mu = speed_from_moments(m, opt.level);
      rep.mu_hat = mu.point;
      rep.mu_se = mu.standard_error();
      if (m.count > 1) {
        const double j1 = static_cast<double>(m.count - 1);
        const double var = (m.m_rr - 2.0 * rep.mu_hat * m.m_rt + rep.mu_hat * rep.mu_hat * m.m_tt) / j1;
        rep.psi_renewal = std::sqrt(std::max(0.0, var) / m.mean_t);
      }
      if (!sum.sigma_certified) rep.notes.push_back("uncertified sigma in the centering run");
      break;
    }
  }

  const double sn = std::sqrt(static_cast<double>(n));
  rep.r_n = fronts;
  for (double r : fronts) rep.z.push_back((r - static_cast<double>(n) * rep.mu_hat) / sn);
  const auto& z = rep.z;
  const MeanVar mv = mean_variance(z);
  rep.mean_z = mv.mean;
  rep.psi_hat = std::sqrt(mv.variance);
  const bool constant_paths = std::all_of(fronts.begin(), fronts.end(), [&](double r) { return r == fronts[0]; });
  if (constant_paths) {
    rep.degenerate = true;
    rep.psi_hat = 0.0;
    rep.notes.push_back("degenerate: r_n is deterministic");
    return rep;
  }
  const double psi = rep.psi_hat;
  rep.ks_distance = ks_distance(z, [psi](double x) { return normal_cdf(x / psi); });
  {
    std::vector<double> sorted = fronts;
    std::sort(sorted.begin(), sorted.end());
    const double m = static_cast<double>(sorted.size());
    const double centre = static_cast<double>(n) * rep.mu_hat;
    const auto cdf = [&](double x) { return normal_cdf((x - centre) / (sn * psi)); };
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
      const double v = sorted[i];
      const double before = static_cast<double>(i) / m;
      while (i < sorted.size() && sorted[i] == v) ++i;
      d = std::max({d, std::abs(before - cdf(v - 0.5)), std::abs(static_cast<double>(i) / m - cdf(v + 0.5))});
    }
    rep.ks_distance_lattice = d;
  }
  if (rep.mu_se * sn > 0.25 * psi / std::sqrt(static_cast<double>(replicates)))
    rep.notes.push_back("warning: centering error sqrt(n) * se(mu_hat) exceeds psi / (4 sqrt(M))");
  rep.ks_critical = ks_critical_value(replicates, clt.ks_alpha);
  rep.notes.push_back("KS critical value ignores estimation of psi (conservative)");
  return rep;
}

BetaSurvival beta_survival(const ReactParams& params, std::int64_t horizon, std::int64_t probes,
                           const RunOptions& opt) {
  if (horizon < 1 || probes < 1) throw std::invalid_argument("beta_survival needs positive horizon and probes");
  params.validate();
  BetaSurvival out;
  out.probes = parallel_map(probes, opt.workers, [&](std::int64_t i) {
    ReactParams p = params;
    p.seed = split_seed(opt.seed, static_cast<std::uint64_t>(i), Purpose::ReactRadius);
    return probe_domination(0, p, horizon, 0);
  });
  std::vector<std::int64_t> hist(static_cast<std::size_t>(horizon) + 1, 0);
  for (const auto& pr : out.probes) {
    out.error_budget = std::max(out.error_budget, pr.error_budget);
    if (pr.dominated()) continue;
    ++out.failed;
    ++hist[static_cast<std::size_t>(std::clamp<std::int64_t>(pr.beta, 0, horizon))];
  }
  std::int64_t above = out.failed;  // #{n < beta <= horizon}
  for (std::int64_t n = 0; n < horizon; ++n) {
    above -= hist[static_cast<std::size_t>(n)];
    SurvivalPoint p;
    p.n = n;
    p.replicates = probes;
    p.survivors = above;
    p.p_hat = static_cast<double>(above) / static_cast<double>(probes);
    const auto ci = wilson_interval(above, probes, opt.level);
    p.lo = ci.lo;
    p.hi = ci.hi;
    out.points.push_back(p);
  }
  out.fit = fit_log_survival(out.points, nullptr);
  return out;
}

}  // namespace rumour
