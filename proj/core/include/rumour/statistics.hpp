#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rumour {

/// Point estimate with a confidence interval.
struct EstimateReport {
  std::string quantity;
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  std::int64_t replicates = 0;
  std::int64_t censored = 0;
  std::string method;
  std::vector<std::string> notes;

  double halfwidth() const { return 0.5 * (hi - lo); }
  /// Standard error implied by a symmetric normal interval.
  double standard_error() const;
};

struct ProbInterval {
  double lo = 0.0;
  double hi = 1.0;
};

double normal_cdf(double x);
double normal_quantile(double p);
double student_t_quantile(double df, double p);
/// Two-sided z for a central interval at `level`.
double z_for_level(double level);

ProbInterval wilson_interval(std::int64_t successes, std::int64_t trials, double level);

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  std::int64_t n = 0;
};

MeanVar mean_variance(std::span<const double> x);

/// Sample autocorrelation at `lag` (biased normalisation, as in the usual ACF).
double autocorrelation(std::span<const double> x, std::size_t lag);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// sup |F_n - F| for a continuous reference CDF.
double ks_distance(std::span<const double> x, const std::function<double(double)>& cdf);
/// Asymptotic one-sample critical value at significance `alpha`, with the
/// usual finite-n correction.
double ks_critical_value(std::int64_t n, double alpha);
/// DKW band half-width: P(sup |F_n - F| > eps) <= alpha.
double dkw_epsilon(std::int64_t n, double alpha);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares y = a + b x; R^2 is the weighted coefficient of determination.
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w);

}  // namespace rumour
