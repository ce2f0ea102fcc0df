#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rumour/keyed_random.hpp"

namespace rumour {

using Vertex = std::int64_t;
using Radius = std::int64_t;

enum class LawKind { Constant, Geometric, GeometricMin1, PolynomialTail, FiniteSupport };

/// Integer-valued radius-of-influence distribution.
///
/// Only the integer part of a radius decides which lattice vertices are
/// reached, so every law is supported on {0, 1, 2, ...}. Sampling is by
/// inverse CDF from a single uniform, which makes couplings across laws and
/// parameters monotone.
class RadiusLaw {
 public:
  static RadiusLaw constant(Radius c);
  /// P(I = k) = (1 - q) q^k on {0, 1, ...}.
  static RadiusLaw geometric(double q);
  /// P(I = k) = (1 - q) q^(k-1) on {1, 2, ...}.
  static RadiusLaw geometric_min1(double q);
  /// P(I > i) = c (i + 1)^(-alpha) for i >= 0, exactly.
  static RadiusLaw polynomial_tail(double alpha, double c);
  /// pmf[k] = P(I = k), k = 0..K. Must sum to 1 within 1e-12.
  static RadiusLaw finite_support(std::vector<double> pmf);

  LawKind kind() const noexcept { return kind_; }

  double cdf(Radius i) const;
  /// P(I > i), evaluated directly rather than as 1 - cdf.
  double tail(Radius i) const;
  double pmf(Radius k) const;
  double p1() const { return cdf(0); }

  std::optional<Radius> support_bound() const;
  /// Largest m with E I^m finite; +inf for light-tailed and bounded laws.
  double moment_order() const;

  double mean() const;
  double second_moment() const;
  double variance() const { return second_moment() - mean() * mean(); }

  /// sum_{j > d} P(I > j); +inf when E I is infinite.
  double tail_sum_beyond(Radius d) const;

  /// Inverse CDF: smallest k with u < cdf(k). u must lie in [0, 1).
  Radius quantile(double u) const;

  template <typename Rng>
  Radius sample(Rng& rng) const {
    return quantile(rng.uniform());
  }

  Radius constant_value() const { return constant_; }
  double q() const { return q_; }
  double alpha() const { return alpha_; }
  double c() const { return c_; }
  const std::vector<double>& pmf_table() const { return pmf_; }

  std::string describe() const;

 private:
  RadiusLaw() = default;

  LawKind kind_ = LawKind::Constant;
  Radius constant_ = 0;
  double q_ = 0.0;
  double alpha_ = 0.0;
  double c_ = 0.0;
  std::vector<double> pmf_;
  std::vector<double> cumulative_;
};

/// a_n = prod_{i=0}^{n} P(I <= i).
double a_n(const RadiusLaw& law, std::int64_t n);

enum class PercolationVerdict { NoPercolation, PercolatesWithPositiveProb, Inconclusive };

std::string to_string(PercolationVerdict v);

struct CriterionResult {
  PercolationVerdict verdict = PercolationVerdict::Inconclusive;
  std::int64_t nmax = 0;
  double log_a_nmax = 0.0;
  double partial_sum = 0.0;  ///< sum_{n=1}^{nmax} a_n
  /// Certified upper bound on sum_{n > nmax} a_n (convergence route), or
  /// certified lower bound on lim a_n (divergence route).
  double certificate_value = 0.0;
  double log_certificate = 0.0;  ///< log of the convergence bound, kept when it underflows
  std::string certificate;
};

/// Decides whether sum a_n diverges (rumour dies a.s.) or converges
/// (percolation with positive probability). Only returns a verdict backed by
/// an analytic bound on the part of the series beyond nmax.
CriterionResult percolation_criterion(const RadiusLaw& law, std::int64_t nmax = 1'000'000,
                                      double tol = 1e-8);

struct OvershootQuery {
  RadiusLaw law;
  Radius truncation_depth = 0;
  /// >= sum_{i > depth} P(I > i); zero when depth reaches the support bound.
  double truncation_error_bound = 0.0;

  static OvershootQuery with_depth(const RadiusLaw& law, Radius depth);
  /// Smallest depth whose error bound is below eps (capped at max_depth).
  static OvershootQuery with_error(const RadiusLaw& law, double eps = 1e-16,
                                   Radius max_depth = 10'000'000);
};

enum class OvershootStatus { Exact, Bounded, Inconclusive };

struct OvershootCdf {
  double value = 0.0;
  double error_bound = 0.0;
  OvershootStatus status = OvershootStatus::Exact;
};

/// P(O <= m) = prod_{i >= 0} P(I <= m + i), where O = sup_{i <= 0} (i + I_i).
OvershootCdf overshoot_cdf_exact(const OvershootQuery& query, Radius m);

struct DepthPolicy {
  enum class Kind { ExactBounded, TailBudget };
  Kind kind = Kind::ExactBounded;
  double epsilon = 0.0;

  static DepthPolicy exact_bounded() { return {Kind::ExactBounded, 0.0}; }
  static DepthPolicy tail_budget(double eps) { return {Kind::TailBudget, eps}; }
};

struct OvershootSample {
  Radius value = 0;
  bool certified = true;
};

/// Draws I_0, I_{-1}, I_{-2}, ... lazily and returns max_i (I_{-i} - i).
OvershootSample overshoot_sample(const RadiusLaw& law, SplitMix64& rng, DepthPolicy policy);

/// Same as overshoot_sample, with the stopping depth for the tail budget
/// worked out once for repeated draws.
class OvershootSampler {
 public:
  OvershootSampler(RadiusLaw law, DepthPolicy policy);
  OvershootSample operator()(SplitMix64& rng) const;

 private:
  RadiusLaw law_;
  std::optional<Radius> bound_;
  Radius budget_depth_ = 0;  ///< smallest d with tail_sum_beyond(d) <= eps
  bool budget_exact_ = false;
};

}  // namespace rumour
