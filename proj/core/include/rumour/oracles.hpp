#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

#include "rumour/radius_law.hpp"

namespace rumour {

/// Brute-force enumeration of the basic model on a bounded law for a few steps.
struct EnumerationSpec {
  RadiusLaw law;
  std::int64_t horizon = 3;       ///< at most 4
  double budget = 1e8;            ///< cap on |support|^(window size)

  Radius support_bound() const;
  /// Vertices [-K h, K h] that can possibly hear the rumour within the horizon.
  std::int64_t window_size() const;
  /// |support|^(window size), the worst-case number of radius assignments.
  double required_budget() const;
};

struct BudgetExceeded : std::runtime_error {
  double required = 0.0;
  BudgetExceeded(const std::string& what, double req) : std::runtime_error(what), required(req) {}
};

struct ExactDistribution {
  std::map<std::int64_t, double> pmf;  ///< outcome -> probability, for paths extinct by the horizon
  double overflow = 0.0;               ///< P(still active at the horizon)

  double total() const;
  double at(std::int64_t k) const {
    auto it = pmf.find(k);
    return it == pmf.end() ? 0.0 : it->second;
  }
};

struct ExactBasicTables {
  ExactDistribution tau;      ///< P(tau = k)
  ExactDistribution cluster;  ///< P(M = m)
  std::int64_t leaves = 0;    ///< radius assignments visited
};

/// Depth-first over radius assignments, drawing radii only for vertices that
/// are actually activated. Throws BudgetExceeded before starting when the enumeration's
/// worst case exceeds its budget.
ExactBasicTables exact_basic_tables(const EnumerationSpec& spec);
ExactDistribution exact_tau_distribution(const EnumerationSpec& spec);
ExactDistribution exact_cluster_distribution(const EnumerationSpec& spec);

/// Enumerates every assignment of the whole window, with no pruning. Spot
/// check for the pruned enumeration on tiny specs.
ExactBasicTables exact_basic_tables_unpruned(const EnumerationSpec& spec);

/// P(O = m) for a bounded law, enumerating I_0, I_{-1}, ..., I_{-(K-1)}.
std::map<Radius, double> exact_overshoot_distribution(const RadiusLaw& law, double budget = 1e8);

struct MomentCheck {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double predicted = 0.0;
  bool consistent() const noexcept { return lo <= predicted && predicted <= hi; }
};

struct RandomSumReport {
  std::int64_t replicates = 0;
  MomentCheck mean;      ///< E Z = E eta E X
  MomentCheck variance;  ///< Var Z = E eta Var X + Var eta (E X)^2
};

/// Monte Carlo check of the Wald and Blackwell-Girshick identities for
/// Z = X_1 + ... + X_eta with eta independent of the X's.
RandomSumReport random_sum_identities(const RadiusLaw& law_x, const RadiusLaw& law_eta,
                                      std::int64_t replicates, std::uint64_t seed,
                                      double level = 0.99);

}  // namespace rumour
