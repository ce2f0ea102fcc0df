#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rumour/engine.hpp"
#include "rumour/radius_law.hpp"
#include "rumour/statistics.hpp"

namespace rumour {

struct SigmaResult {
  std::int64_t sigma = 1;
  bool certified = true;
  Radius depth_examined = 0;  ///< vertices -1 .. -depth were inspected
  double residual = 0.0;      ///< probability mass of violations beyond the depth
};

/// First n >= 1 such that every vertex i <= -n has i + I_i <= 0, i.e. no
/// vertex left of -n can ever reach the positive half-line.
/// Exact for bounded laws; otherwise inspects the field down to a depth whose
/// remaining violation probability is below the policy's epsilon.
SigmaResult detect_sigma(const RadiusField& field, DepthPolicy policy);

struct RenewalPoint {
  std::int64_t step = 0;
  Vertex r = 0;
  friend bool operator==(const RenewalPoint&, const RenewalPoint&) = default;
};

struct Increment {
  std::int64_t d_tau = 0;
  std::int64_t d_r = 0;
  friend bool operator==(const Increment&, const Increment&) = default;
};

/// sigma followed by the renewal steps: post-sigma steps where the right
/// front advances by exactly one vertex.
struct RenewalLedger {
  std::int64_t sigma = 0;
  bool sigma_certified = true;
  std::vector<RenewalPoint> taus;  ///< taus[0] = (sigma, r_sigma); taus[j] = j-th renewal
  bool truncated = false;          ///< trajectory ended (extinct or horizon) before more renewals
  std::int64_t scanned_until = 0;

  std::size_t renewal_count() const { return taus.empty() ? 0 : taus.size() - 1; }
  /// Consecutive differences, starting with the sigma -> tau_1 leg.
  std::vector<Increment> increments() const;
  /// Increments between renewals only (j >= 1); these are i.i.d.
  std::vector<Increment> iid_increments() const;
};

RenewalLedger detect_taus(const Trajectory& traj, std::int64_t sigma, bool sigma_certified = true);

/// Runs the full-line process on `field` until at least `min_renewals`
/// renewals after sigma are found or max_steps is reached. Streams the path.
RenewalLedger collect_renewals(const RadiusField& field, std::size_t min_renewals,
                               DepthPolicy sigma_policy, std::int64_t max_steps = 1 << 26);
/// All renewals up to a fixed horizon.
RenewalLedger renewals_over_horizon(const RadiusField& field, std::int64_t horizon,
                                    DepthPolicy sigma_policy);

/// Running means and co-moments of (d_tau, d_r), updated one increment at a time.
struct IncrementMoments {
  std::int64_t count = 0;
  double mean_t = 0.0;
  double mean_r = 0.0;
  double m_tt = 0.0;  ///< sums of centred products
  double m_rr = 0.0;
  double m_rt = 0.0;

  void add(const Increment& inc);
};

/// Streaming counterpart of renewals_over_horizon: keeps only the moments of
/// the i.i.d. increments, so memory stays constant for long runs.
struct RenewalSummary {
  std::int64_t sigma = 0;
  bool sigma_certified = true;
  std::int64_t renewals = 0;
  IncrementMoments moments;
  bool truncated = false;
};

RenewalSummary summarize_renewals(const RadiusField& field, std::int64_t horizon, DepthPolicy sigma_policy);

enum class RatioCiMethod { Delta, BatchBootstrap };

/// Delta-method ratio estimate from streamed moments; same numbers as
/// speed_from_increments with RatioCiMethod::Delta.
EstimateReport speed_from_moments(const IncrementMoments& m, double level = 0.95);

/// Ratio-of-means speed estimate sum(d_r) / sum(d_tau) from i.i.d. increments.
EstimateReport speed_from_increments(std::span<const Increment> increments, double level = 0.95,
                                     RatioCiMethod method = RatioCiMethod::Delta,
                                     std::uint64_t bootstrap_seed = 0);

/// Speed from a ledger, dropping the sigma -> tau_1 leg. Throws
/// NoRenewalsFound when fewer than one i.i.d. increment is available.
EstimateReport speed_from_renewals(const RenewalLedger& ledger, double level = 0.95,
                                   RatioCiMethod method = RatioCiMethod::Delta,
                                   std::uint64_t bootstrap_seed = 0);

struct NoRenewalsFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeriesDiagnostics {
  double lag1 = 0.0;
  double lag2 = 0.0;
  double permutation_p = 1.0;  ///< two-sided test of lag-1 dependence
  KsResult half_vs_half;
};

struct IidReport {
  std::size_t count = 0;
  double mu_hat = 0.0;
  SeriesDiagnostics d_tau;
  SeriesDiagnostics d_r;
  SeriesDiagnostics residual;  ///< d_r - mu_hat * d_tau
};

IidReport iid_diagnostics(std::span<const Increment> increments, std::uint64_t seed = 1,
                          int permutations = 999);
SeriesDiagnostics series_diagnostics(std::span<const double> x, std::uint64_t seed,
                                     int permutations = 999);

/// (oneSidedRenewalTime, r at that time) for the process on {0, 1, ...}:
/// first n >= 1 with r_n - r_{n-1} = 1. Distributed as a renewal increment.
struct OneSidedRenewal {
  std::int64_t time = 0;
  Vertex r = 0;
  bool found = false;
};

OneSidedRenewal sample_one_sided_renewal(const RadiusField& field, std::int64_t cap = 1'000'000);

/// For every n > sigma up to `horizon`, checks that the left active vertices
/// cannot reach past the origin. Returns the first offending step, or 0.
std::int64_t post_sigma_containment_violation(const RadiusField& field, std::int64_t sigma,
                                              std::int64_t horizon);

}  // namespace rumour
