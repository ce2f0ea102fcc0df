#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "rumour/engine.hpp"
#include "rumour/radius_law.hpp"
#include "rumour/renewal.hpp"

namespace rumour {

/// How the radius of an active vertex is looked up.
///
/// StepKeyed reads I^n_v at the current step n, as in the model definition.
/// ActivationKeyed reads the k-th radius of v at its k-th activation
/// (k = 0, 1, ...). Both give i.i.d. radii; the second makes the fronts
/// monotone in p2 under shared clock uniforms.
enum class RadiusKeying { StepKeyed, ActivationKeyed };

struct ReactParams {
  RadiusLaw law = RadiusLaw::constant(0);
  double p2 = 0.0;
  std::uint64_t seed = 0;
  RadiusKeying keying = RadiusKeying::StepKeyed;
  /// Only vertices within `window` of a front are simulated. Exact for the
  /// fronts once window >= support bound; otherwise see error_budget.
  std::optional<Radius> window;

  void validate() const;
};

enum class ReactShape {
  TwoSided,      ///< started from a single vertex, spreads both ways
  OneSided,      ///< started from {u}, spreads to the right only
  LeftHalfLine,  ///< started from (-inf, u-1], all heard and active
};

struct ReactivationState {
  struct Cell {
    std::uint32_t activations = 0;
    bool active = false;
  };

  ReactShape shape = ReactShape::TwoSided;
  std::int64_t n = 0;   ///< local step count
  std::int64_t t0 = 0;  ///< key offset: local step m reads keys of step t0 + m
  Vertex l = 0;         ///< meaningless for LeftHalfLine
  Vertex r = 0;
  Vertex base = 0;          ///< vertex held by cells.front()
  std::deque<Cell> cells;   ///< per-vertex data for [base, base + size)
  std::int64_t active_count = 0;  ///< counted over the simulated vertices

  bool contains(Vertex v) const noexcept {
    return v >= base && v < base + static_cast<Vertex>(cells.size());
  }
  Cell& cell(Vertex v) { return cells[static_cast<std::size_t>(v - base)]; }
  const Cell& cell(Vertex v) const { return cells[static_cast<std::size_t>(v - base)]; }
  bool active(Vertex v) const { return contains(v) && cell(v).active; }
};

ReactivationState react_init(ReactShape shape, Vertex u, const ReactParams& params,
                             std::int64_t t0 = 0);

/// One step of the reactivation dynamics: every active vertex w spreads with
/// its radius, newly reached vertices become active, and each previously heard
/// vertex u is active at the next step iff B^{n+1}_u = 1.
void step_react(ReactivationState& state, const ReactParams& params);

struct ReactTrajectory {
  Trajectory path;  ///< status is always Censored; active_count is windowed when a window is set
  std::optional<Radius> window;
  /// Upper bound on P(windowed fronts differ from the exact ones somewhere on the path).
  double error_budget = 0.0;
};

ReactTrajectory run_react(const ReactParams& params, std::int64_t horizon);
ReactTrajectory run_one_sided_react(Vertex u, const ReactParams& params, std::int64_t horizon,
                                    std::int64_t t0 = 0);

/// Windowed-mode error bound per step for the given shape.
double react_step_error(const ReactParams& params, ReactShape shape);

struct DominationProbe {
  enum class Outcome { Failed, DominatedThrough };
  Vertex u = 0;
  std::int64_t t0 = 0;
  std::int64_t horizon = 0;
  Outcome outcome = Outcome::DominatedThrough;
  std::int64_t beta = 0;  ///< first failing step when Failed
  double error_budget = 0.0;

  bool dominated() const noexcept { return outcome == Outcome::DominatedThrough; }
};

/// Co-evolves the (-inf, u) process and the one-sided process from {u} on the
/// shared keys of steps t0, t0 + 1, ... and reports the first step at which
/// the former's front passes the latter's. Always step keyed; the (-inf, u)
/// process needs a window (defaulting to the support bound).
DominationProbe probe_domination(Vertex u, const ReactParams& params, std::int64_t horizon,
                                 std::int64_t t0 = 0);

struct ReactRenewalLedger {
  std::int64_t confirm_lag = 0;  ///< H: renewals are Dom^(H) surrogates
  std::vector<RenewalPoint> taus;
  double error_budget = 0.0;

  std::vector<Increment> increments() const;
};

/// Declares a renewal at every step n of the path where Dom^(H)(r_n) holds.
ReactRenewalLedger detect_renewals_react(const ReactParams& params, std::int64_t horizon,
                                         std::int64_t confirm_lag);

/// theta = P(B = 1, I >= 1) = p2 * P(I >= 1).
double drift_theta(const RadiusLaw& law, double p2);

/// X_0 = 0 and X_n - X_{n-1} = 1{B^{n-1}_v = 1, I^{n-1}_v >= 1} with v = r_{n-1},
/// read from the same step-keyed randomness as the path.
std::vector<Vertex> drift_walk(const ReactParams& params, const Trajectory& path);

}  // namespace rumour
