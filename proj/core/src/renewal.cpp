#include "rumour/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>

namespace rumour {

namespace {

void fisher_yates(std::vector<double>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

}  // namespace

SigmaResult detect_sigma(const RadiusField& field, DepthPolicy policy) {
  if (field.keying() != RadiusField::Keying::Static)
    throw std::invalid_argument("detect_sigma needs a static radius field");
  const RadiusLaw& law = field.law();
  const auto bound = law.support_bound();
  if (!bound && law.moment_order() <= 1.0)
    throw std::invalid_argument("sigma is not a.s. finite unless E I^(1+eps) < inf");

  SigmaResult out;
  if (bound) {
    out.depth_examined = std::max<Radius>(*bound - 1, 0);
  } else {
    if (policy.kind == DepthPolicy::Kind::ExactBounded)
      throw std::invalid_argument("ExactBounded sigma detection needs a bounded law");
    const OvershootQuery q = OvershootQuery::with_error(law, policy.epsilon);
    out.depth_examined = q.truncation_depth;
    out.residual = q.truncation_error_bound;
    out.certified = out.residual == 0.0;
  }
  // Vertex -d violates when I_{-d} > d; sigma is one past the deepest violator.
  for (Radius d = 1; d <= out.depth_examined; ++d)
    if (field.radius(-d) > d) out.sigma = std::max<std::int64_t>(out.sigma, d + 1);
  return out;
}

std::vector<Increment> RenewalLedger::increments() const {
  std::vector<Increment> out;
  for (std::size_t j = 1; j < taus.size(); ++j)
    out.push_back({taus[j].step - taus[j - 1].step, taus[j].r - taus[j - 1].r});
  return out;
}

std::vector<Increment> RenewalLedger::iid_increments() const {
  auto all = increments();
  if (!all.empty()) all.erase(all.begin());
  return all;
}

RenewalLedger detect_taus(const Trajectory& traj, std::int64_t sigma, bool sigma_certified) {
  RenewalLedger ledger;
  ledger.sigma = sigma;
  ledger.sigma_certified = sigma_certified;
  ledger.truncated = traj.extinct();
  const auto& steps = traj.steps;
  ledger.scanned_until = steps.empty() ? 0 : steps.back().n;
  if (sigma < 0 || static_cast<std::size_t>(sigma) >= steps.size()) {
    ledger.truncated = true;
    return ledger;
  }
  ledger.taus.push_back({sigma, steps[sigma].r});
  for (std::size_t n = static_cast<std::size_t>(sigma) + 1; n < steps.size(); ++n)
    if (steps[n].r - steps[n - 1].r == 1) ledger.taus.push_back({steps[n].n, steps[n].r});
  if (ledger.renewal_count() == 0) ledger.truncated = true;
  return ledger;
}

namespace {

RenewalLedger scan_renewals(const RadiusField& field, std::size_t min_renewals,
                            DepthPolicy sigma_policy, std::int64_t max_steps) {
  if (max_steps < 1) throw std::invalid_argument("renewal scan needs a positive step budget");
  const SigmaResult sigma = detect_sigma(field, sigma_policy);
  RenewalLedger ledger;
  ledger.sigma = sigma.sigma;
  ledger.sigma_certified = sigma.certified;
  Occupancy occupancy(SiteEnvironment::all_occupied(), 0);
  BasicState s = init_state();
  while (s.n < max_steps && !s.extinct() && ledger.renewal_count() < min_renewals) {
    const Vertex prev = s.r;
    s = step(s, field, occupancy);
    if (s.n == sigma.sigma)
      ledger.taus.push_back({s.n, s.r});
    else if (s.n > sigma.sigma && s.r - prev == 1)
      ledger.taus.push_back({s.n, s.r});
  }
  ledger.scanned_until = s.n;
  ledger.truncated = s.extinct() || ledger.renewal_count() < std::max<std::size_t>(min_renewals, 1);
  return ledger;
}

}  // namespace

RenewalLedger collect_renewals(const RadiusField& field, std::size_t min_renewals,
                               DepthPolicy sigma_policy, std::int64_t max_steps) {
  return scan_renewals(field, min_renewals, sigma_policy, max_steps);
}

RenewalLedger renewals_over_horizon(const RadiusField& field, std::int64_t horizon,
                                    DepthPolicy sigma_policy) {
  RenewalLedger ledger = scan_renewals(field, SIZE_MAX, sigma_policy, horizon);
  ledger.truncated = ledger.renewal_count() == 0;
  return ledger;
}

void IncrementMoments::add(const Increment& inc) {
  ++count;
  const double t = static_cast<double>(inc.d_tau);
  const double r = static_cast<double>(inc.d_r);
  const double dt = t - mean_t;
  const double dr = r - mean_r;
  const double k = static_cast<double>(count);
  mean_t += dt / k;
  mean_r += dr / k;
  m_tt += dt * (t - mean_t);
  m_rr += dr * (r - mean_r);
  m_rt += dt * (r - mean_r);
}

RenewalSummary summarize_renewals(const RadiusField& field, std::int64_t horizon, DepthPolicy sigma_policy) {
  if (horizon < 1) throw std::invalid_argument("renewal scan needs a positive step budget");
  const SigmaResult sigma = detect_sigma(field, sigma_policy);
  RenewalSummary out;
  out.sigma = sigma.sigma;
  out.sigma_certified = sigma.certified;
  Occupancy occupancy(SiteEnvironment::all_occupied(), 0);
  BasicState s = init_state();
  std::optional<RenewalPoint> last;
  while (s.n < horizon && !s.extinct()) {
    const Vertex prev = s.r;
    s = step(s, field, occupancy);
    if (s.n < sigma.sigma || (s.n > sigma.sigma && s.r - prev != 1)) continue;
    const RenewalPoint here{s.n, s.r};
    if (s.n > sigma.sigma) {
      ++out.renewals;
      // The sigma -> tau_1 leg is not part of the i.i.d. sequence.
      if (out.renewals > 1) out.moments.add({here.step - last->step, here.r - last->r});
    }
    last = here;
  }
  out.truncated = out.renewals == 0;
  return out;
}

EstimateReport speed_from_moments(const IncrementMoments& m, double level) {
  if (m.count == 0) throw NoRenewalsFound("no renewal increments available");
  EstimateReport rep;
  rep.quantity = "mu";
  rep.method = "renewal_ratio_delta";
  rep.level = level;
  rep.replicates = m.count;
  rep.point = m.mean_r / m.mean_t;
  rep.lo = rep.hi = rep.point;
  if (m.count < 2) {
    rep.notes.push_back("single increment: interval degenerate");
    return rep;
  }
  const double j = static_cast<double>(m.count);
  const double mu = rep.point;
  const double var = std::max(0.0, (m.m_rr - 2.0 * mu * m.m_rt + mu * mu * m.m_tt) / (j - 1) /
                                       (m.mean_t * m.mean_t * j));
  const double half = z_for_level(level) * std::sqrt(var);
  rep.lo = mu - half;
  rep.hi = mu + half;
  return rep;
}

EstimateReport speed_from_increments(std::span<const Increment> increments, double level,
                                     RatioCiMethod method, std::uint64_t bootstrap_seed) {
  if (increments.empty()) throw NoRenewalsFound("no renewal increments available");
  const auto j = static_cast<double>(increments.size());
  double sum_r = 0.0;
  double sum_t = 0.0;
  for (const auto& inc : increments) {
    sum_r += static_cast<double>(inc.d_r);
    sum_t += static_cast<double>(inc.d_tau);
  }
  EstimateReport rep;
  rep.quantity = "mu";
  rep.level = level;
  rep.replicates = static_cast<std::int64_t>(increments.size());
  rep.point = sum_r / sum_t;
  rep.lo = rep.hi = rep.point;

  if (method == RatioCiMethod::Delta) {
    rep.method = "renewal_ratio_delta";
    if (increments.size() < 2) {
      rep.notes.push_back("single increment: interval degenerate");
      return rep;
    }
    const double mr = sum_r / j;
    const double mt = sum_t / j;
    double srr = 0, stt = 0, srt = 0;
    for (const auto& inc : increments) {
      const double dr = static_cast<double>(inc.d_r) - mr;
      const double dt = static_cast<double>(inc.d_tau) - mt;
      srr += dr * dr;
      stt += dt * dt;
      srt += dr * dt;
    }
    srr /= j - 1;
    stt /= j - 1;
    srt /= j - 1;
    const double mu = rep.point;
    const double var = std::max(0.0, (srr - 2.0 * mu * srt + mu * mu * stt) / (mt * mt * j));
    const double half = z_for_level(level) * std::sqrt(var);
    rep.lo = mu - half;
    rep.hi = mu + half;
    return rep;
  }

  rep.method = "renewal_ratio_batch_bootstrap";
  const std::size_t batches = std::min<std::size_t>(increments.size(), 32);
  if (batches < 2) {
    rep.notes.push_back("too few increments for batching: interval degenerate");
    return rep;
  }
  std::vector<double> br(batches, 0.0);
  std::vector<double> bt(batches, 0.0);
  for (std::size_t i = 0; i < increments.size(); ++i) {
    const std::size_t b = i * batches / increments.size();
    br[b] += static_cast<double>(increments[i].d_r);
    bt[b] += static_cast<double>(increments[i].d_tau);
  }
  SplitMix64 rng(split_seed(bootstrap_seed, 0, Purpose::Permutation));
  constexpr int kResamples = 2000;
  std::vector<double> ratios;
  ratios.reserve(kResamples);
  for (int k = 0; k < kResamples; ++k) {
    double r = 0.0;
    double t = 0.0;
    for (std::size_t i = 0; i < batches; ++i) {
      const auto pick = std::min(batches - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(batches)));
      r += br[pick];
      t += bt[pick];
    }
    ratios.push_back(r / t);
  }
  std::sort(ratios.begin(), ratios.end());
  const double a = 0.5 * (1.0 - level);
  const auto idx = [&](double p) {
    return std::min(ratios.size() - 1, static_cast<std::size_t>(p * static_cast<double>(ratios.size())));
  };
  rep.lo = std::min(rep.point, ratios[idx(a)]);
  rep.hi = std::max(rep.point, ratios[idx(1.0 - a)]);
  return rep;
}

EstimateReport speed_from_renewals(const RenewalLedger& ledger, double level, RatioCiMethod method,
                                   std::uint64_t bootstrap_seed) {
  const auto incs = ledger.iid_increments();
  if (incs.empty()) throw NoRenewalsFound("ledger holds no increments between renewals");
  EstimateReport rep = speed_from_increments(incs, level, method, bootstrap_seed);
  if (!ledger.sigma_certified) rep.notes.push_back("uncertified sigma");
  if (ledger.truncated) rep.notes.push_back("ledger truncated");
  return rep;
}

SeriesDiagnostics series_diagnostics(std::span<const double> x, std::uint64_t seed,
                                     int permutations) {
  SeriesDiagnostics d;
  d.lag1 = autocorrelation(x, 1);
  d.lag2 = autocorrelation(x, 2);

  SplitMix64 rng(split_seed(seed, 0, Purpose::Permutation));
  std::vector<double> shuffled(x.begin(), x.end());
  int extreme = 0;
  for (int k = 0; k < permutations; ++k) {
    fisher_yates(shuffled, rng);
    if (std::abs(autocorrelation(shuffled, 1)) >= std::abs(d.lag1)) ++extreme;
  }
  d.permutation_p = static_cast<double>(extreme + 1) / static_cast<double>(permutations + 1);

  const std::size_t half = x.size() / 2;
  if (half > 0) d.half_vs_half = ks_two_sample(x.subspan(0, half), x.subspan(half));
  return d;
}

IidReport iid_diagnostics(std::span<const Increment> increments, std::uint64_t seed,
                          int permutations) {
  IidReport rep;
  rep.count = increments.size();
  if (increments.empty()) return rep;
  std::vector<double> dt, dr, res;
  dt.reserve(increments.size());
  dr.reserve(increments.size());
  for (const auto& inc : increments) {
    dt.push_back(static_cast<double>(inc.d_tau));
    dr.push_back(static_cast<double>(inc.d_r));
  }
  rep.mu_hat = std::accumulate(dr.begin(), dr.end(), 0.0) / std::accumulate(dt.begin(), dt.end(), 0.0);
  for (std::size_t i = 0; i < dt.size(); ++i) res.push_back(dr[i] - rep.mu_hat * dt[i]);
  rep.d_tau = series_diagnostics(dt, seed, permutations);
  rep.d_r = series_diagnostics(dr, seed + 1, permutations);
  rep.residual = series_diagnostics(res, seed + 2, permutations);
  return rep;
}

OneSidedRenewal sample_one_sided_renewal(const RadiusField& field, std::int64_t cap) {
  Vertex r = 0;
  Vertex lo = 0;
  Vertex hi = 0;
  for (std::int64_t n = 0; n < cap; ++n) {
    Vertex reach = r;
    for (Vertex u = lo; u <= hi; ++u) reach = std::max(reach, u + field.radius(u, n));
    if (reach == r) return {n + 1, r, false};  // died out
    lo = r + 1;
    hi = reach;
    const bool renewal = reach - r == 1;
    r = reach;
    if (renewal) return {n + 1, r, true};
  }
  return {cap, r, false};
}

std::int64_t post_sigma_containment_violation(const RadiusField& field, std::int64_t sigma,
                                              std::int64_t horizon) {
  Occupancy occupancy(SiteEnvironment::all_occupied(), 0);
  BasicState s = init_state();
  while (s.n < horizon && !s.extinct()) {
    s = step(s, field, occupancy);
    if (s.n > sigma && s.active_left) {
      for (Vertex u = s.active_left->lo; u <= std::min<Vertex>(s.active_left->hi, 0); ++u)
        if (u + field.radius(u, s.n) > 0) return s.n;
    }
  }
  return 0;
}

}  // namespace rumour
