#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rumour/engine.hpp"
#include "rumour/radius_law.hpp"
#include "rumour/reactivation.hpp"
#include "rumour/renewal.hpp"
#include "rumour/statistics.hpp"

namespace rumour {

struct RunOptions {
  std::uint64_t seed = 1;
  double level = 0.95;
  unsigned workers = 1;
};

/// Outcome of one basic-model replicate run until extinction or the cap.
struct BasicOutcome {
  std::int64_t tau = 0;  ///< extinction step, or the cap when censored
  std::int64_t cluster = 0;
  bool extinct = false;
};

/// Replicate i reads radius and site fields seeded from (seed, i).
BasicOutcome basic_replicate(const RadiusLaw& law, const SiteEnvironment& env, std::uint64_t seed,
                             std::int64_t index, std::int64_t cap);

std::vector<BasicOutcome> basic_replicates(const RadiusLaw& law, const SiteEnvironment& env,
                                           std::int64_t replicates, std::int64_t cap,
                                           const RunOptions& opt);

struct SurvivalPoint {
  std::int64_t n = 0;
  std::int64_t survivors = 0;  ///< #{tau > n}
  std::int64_t replicates = 0;
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct SurvivalTable {
  std::vector<SurvivalPoint> points;
  LinearFit fit;                       ///< log P(tau > n) against n, weighted
  std::vector<std::int64_t> dropped;   ///< ns with no survivors, left out of the fit
  std::int64_t replicates = 0;
  std::int64_t censored = 0;           ///< runs still active past max(ns)
  std::vector<std::string> notes;
};

/// Weighted log-linear fit of an empirical survival curve; points with zero
/// survivors are dropped. Weights are the inverse delta-method variances of log p.
LinearFit fit_log_survival(const std::vector<SurvivalPoint>& points, std::vector<std::int64_t>* dropped);

SurvivalTable survival_from_taus(const std::vector<BasicOutcome>& runs, const std::vector<std::int64_t>& ns,
                                 double level);
SurvivalTable survival_tail(const RadiusLaw& law, const SiteEnvironment& env,
                            const std::vector<std::int64_t>& ns, std::int64_t replicates,
                            const RunOptions& opt);

struct HazardPoint {
  std::int64_t n = 0;
  std::int64_t at_risk = 0;  ///< #{tau > n}
  std::int64_t events = 0;   ///< #{tau = n + 1}
  double h_hat = 0.0;
  double sigma = 0.0;        ///< binomial standard deviation of h_hat
  bool checked = false;      ///< enough conditional samples to test
  bool pass = true;
};

struct HazardReport {
  double p_o0 = 0.0;   ///< P(O = 0)
  double bound = 0.0;  ///< P(O = 0)^2
  std::int64_t min_conditional = 0;
  std::vector<HazardPoint> points;
  std::vector<std::string> notes;

  bool pass() const;
};

HazardReport hazard_from_taus(const RadiusLaw& law, const std::vector<BasicOutcome>& runs,
                              std::int64_t nmax, std::int64_t min_conditional = 1000);
HazardReport hazard_check(const RadiusLaw& law, const SiteEnvironment& env, std::int64_t nmax,
                          std::int64_t replicates, const RunOptions& opt,
                          std::int64_t min_conditional = 1000);

/// gamma-hat: fraction of replicates still active at the horizon. Biased upward.
EstimateReport percolation_prob(const RadiusLaw& law, const SiteEnvironment& env,
                                std::int64_t horizon, std::int64_t replicates, const RunOptions& opt);

struct ClusterReport {
  EstimateReport mean;
  EstimateReport second_moment;
  std::map<std::int64_t, std::int64_t> counts;  ///< M -> replicates, extinct runs only
  std::vector<SurvivalPoint> survival;          ///< P(M > m)
  LinearFit tail_fit;
  std::int64_t replicates = 0;
  std::int64_t censored = 0;
  bool flagged = false;  ///< censor fraction above 1%
  std::vector<std::string> notes;
};

ClusterReport cluster_from_runs(const std::vector<BasicOutcome>& runs, double level);
ClusterReport cluster_moments(const RadiusLaw& law, const SiteEnvironment& env,
                              std::int64_t replicates, std::int64_t cap, const RunOptions& opt);

/// r_N of a basic run (all sites occupied), streamed without keeping the path.
Vertex basic_right_front(const RadiusField& field, std::int64_t steps);

/// mu-hat = mean over replicates of r_N / N, CI from the across-replicate spread.
EstimateReport speed_lln(const RadiusLaw& law, std::int64_t steps, std::int64_t replicates,
                         const RunOptions& opt);
/// Same for the reactivation model; params.seed is replaced per replicate.
EstimateReport speed_lln_react(const ReactParams& params, std::int64_t steps,
                               std::int64_t replicates, const RunOptions& opt);

/// Speed from renewals on one long run seeded from opt.seed.
EstimateReport speed_renewal(const RadiusLaw& law, std::int64_t steps, const RunOptions& opt,
                             DepthPolicy policy = DepthPolicy::tail_budget(1e-12),
                             RatioCiMethod method = RatioCiMethod::Delta);

enum class MuSource { Renewal, Lln, Fixed };

struct CltReport {
  std::int64_t n = 0;
  std::int64_t replicates = 0;
  MuSource mu_source = MuSource::Renewal;
  double mu_hat = 0.0;
  double mu_se = 0.0;  ///< standard error of mu_hat when it comes from a renewal run
  double psi_hat = 0.0;
  double mean_z = 0.0;
  double ks_distance = 0.0;
  /// Same distance with the normal CDF continuity-corrected for integer r_n; diagnostic only.
  double ks_distance_lattice = 0.0;
  double ks_critical = 0.0;
  double ks_alpha = 0.01;
  bool degenerate = false;
  /// Var(d_r - mu d_tau) / E(d_tau) from the centering ledger, when available.
  std::optional<double> psi_renewal;
  std::vector<double> r_n;  ///< per replicate, index order
  std::vector<double> z;    ///< (r_n - n mu_hat) / sqrt(n)
  std::vector<std::string> notes;

  bool ks_pass() const { return degenerate || ks_distance <= ks_critical; }
  bool centering_pass() const {
    return degenerate || std::abs(mean_z) <= 3.0 * psi_hat / std::sqrt(static_cast<double>(replicates));
  }
};

struct CltOptions {
  MuSource mu_source = MuSource::Renewal;
  double fixed_mu = 0.0;
  /// Length of the independent renewal run. Its error sqrt(n) * se(mu_hat)
  /// should stay well below psi / sqrt(M), or the KS test sees a shifted centre.
  std::int64_t centering_steps = 100'000'000;
  double ks_alpha = 0.01;
};

CltReport clt_check(const RadiusLaw& law, std::int64_t n, std::int64_t replicates,
                    const RunOptions& opt, const CltOptions& clt = {});

struct BetaSurvival {
  std::vector<DominationProbe> probes;  ///< probe i uses ReactRadius/ReactClock keys from (seed, i)
  std::int64_t failed = 0;              ///< beta <= horizon
  /// P(n < beta <= horizon) for n = 0 .. horizon - 1, a censored proxy for P(n < beta < inf).
  std::vector<SurvivalPoint> points;
  LinearFit fit;
  double error_budget = 0.0;  ///< largest per-probe windowing error
};

BetaSurvival beta_survival(const ReactParams& params, std::int64_t horizon, std::int64_t probes,
                           const RunOptions& opt);

}  // namespace rumour
