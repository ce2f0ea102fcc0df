#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rumour/keyed_random.hpp"
#include "rumour/radius_law.hpp"

namespace rumour {

/// Closed integer interval [lo, hi], lo <= hi.
struct Interval {
  Vertex lo = 0;
  Vertex hi = 0;

  std::int64_t size() const noexcept { return hi - lo + 1; }
  bool contains(Vertex v) const noexcept { return lo <= v && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Channel : std::uint64_t { Radius = 11, Clock = 12, Site = 13 };

/// All randomness of one replicate, addressed by key rather than by draw order.
struct KeyedStreams {
  std::uint64_t seed = 0;

  /// Uniform behind the radius of vertex v under key `index` (a step or an
  /// activation count, depending on the caller's keying).
  double radius_uniform(std::int64_t index, Vertex v) const noexcept {
    return keyed_uniform(seed, static_cast<std::uint64_t>(Channel::Radius), index, v);
  }
  double clock_uniform(std::int64_t step, Vertex v) const noexcept {
    return keyed_uniform(seed, static_cast<std::uint64_t>(Channel::Clock), step, v);
  }
  double site_uniform(Vertex v) const noexcept {
    return keyed_uniform(seed, static_cast<std::uint64_t>(Channel::Site), v);
  }
};

/// Radius assignment for the basic model: each vertex spreads once, at activation.
///
/// Static keying draws one radius per vertex (key 0). StepKeyed reads
/// I^n_u at the activation step n, which is the field the reactivation
/// engine uses, so the two engines can be coupled path by path.
class RadiusField {
 public:
  enum class Keying { Static, StepKeyed };

  RadiusField(RadiusLaw law, std::uint64_t seed, Keying keying = Keying::Static)
      : law_(std::move(law)), streams_{seed}, keying_(keying) {}

  Radius radius(Vertex u, std::int64_t activation_step = 0) const {
    if (!overrides_.empty()) {
      if (auto it = overrides_.find(u); it != overrides_.end()) return it->second;
    }
    const std::int64_t key = keying_ == Keying::Static ? 0 : activation_step;
    return law_.quantile(streams_.radius_uniform(key, u));
  }

  /// Pins the radius of u, e.g. to replay a hand-built configuration.
  void set_override(Vertex u, Radius r) { overrides_[u] = r; }

  const RadiusLaw& law() const noexcept { return law_; }
  std::uint64_t seed() const noexcept { return streams_.seed; }
  Keying keying() const noexcept { return keying_; }

 private:
  RadiusLaw law_;
  KeyedStreams streams_;
  Keying keying_;
  std::unordered_map<Vertex, Radius> overrides_;
};

/// Placement of individuals on Z. Unoccupied sites hear the rumour but never spread it.
class SiteEnvironment {
 public:
  enum class Kind { AllOccupied, BernoulliSites, MarkovSites };

  static SiteEnvironment all_occupied() { return SiteEnvironment{}; }
  static SiteEnvironment bernoulli(double p_occupied);
  /// Two-state chain with P(0 -> 0) = p00 and P(1 -> 1) = p11.
  static SiteEnvironment markov(double p00, double p11);

  Kind kind() const noexcept { return kind_; }
  double p_occupied() const noexcept { return p_occ_; }
  double p00() const noexcept { return p00_; }
  double p11() const noexcept { return p11_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::AllOccupied;
  double p_occ_ = 1.0;
  double p00_ = 0.0;
  double p11_ = 1.0;
};

/// Occupancy flags of one replicate, materialised on demand and never resampled.
/// The origin is always occupied; Markov flags extend outward from it in both directions.
class Occupancy {
 public:
  Occupancy(SiteEnvironment env, std::uint64_t seed) : env_(env), streams_{seed} {}

  bool occupied(Vertex v);

  const SiteEnvironment& environment() const noexcept { return env_; }

 private:
  SiteEnvironment env_;
  KeyedStreams streams_;
  std::vector<char> right_{1};  // flags of 0, 1, 2, ...
  std::vector<char> left_{1};   // flags of 0, -1, -2, ...
};

struct BasicState {
  std::int64_t n = 0;
  Vertex l = 0;
  Vertex r = 0;
  std::optional<Interval> active_left;
  std::optional<Interval> active_right;

  bool extinct() const noexcept { return !active_left && !active_right; }
  std::int64_t active_count() const noexcept;
  friend bool operator==(const BasicState&, const BasicState&) = default;
};

/// A_0 = active set = {0}.
BasicState init_state();

/// One step of the basic process. Every occupied active vertex reaches the
/// contiguous block [u - I_u, u + I_u], so the new active set is the (at most
/// two) intervals just beyond the previous cluster.
BasicState step(const BasicState& state, const RadiusField& field, Occupancy& occupancy);

struct StepRecord {
  std::int64_t n = 0;
  Vertex l = 0;
  Vertex r = 0;
  std::int64_t active_count = 0;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

enum class TerminalStatus { Extinct, Censored };

struct Trajectory {
  std::vector<StepRecord> steps;  ///< steps[k].n == k, starting at n = 0
  TerminalStatus status = TerminalStatus::Censored;
  std::int64_t tau = 0;           ///< extinction step when Extinct, else the last step
  std::int64_t cluster_size = 0;  ///< M = r - l + 1 at the last step
  std::int64_t size_plus = 0;     ///< #(A cap [0, inf))
  std::int64_t size_minus = 0;    ///< #(A cap (-inf, 0])

  bool extinct() const noexcept { return status == TerminalStatus::Extinct; }
  const StepRecord& last() const { return steps.back(); }
};

struct UntilExtinct {
  std::int64_t cap = 1'000'000;
};
struct Horizon {
  std::int64_t steps = 0;
};
struct RightReaches {
  Vertex x = 0;
  std::int64_t cap = 100'000'000;
};
using StopRule = std::variant<UntilExtinct, Horizon, RightReaches>;

Trajectory run(const RadiusField& field, Occupancy& occupancy, const StopRule& stop);
Trajectory run(const RadiusField& field, const StopRule& stop);

/// Process confined to {0, 1, 2, ...}; vertices below the origin do not exist.
Trajectory run_one_sided(const RadiusField& field, const StopRule& stop);

/// Literal set-based transcription of the model, for differential testing.
struct SetState {
  std::int64_t n = 0;
  std::set<Vertex> heard;
  std::set<Vertex> active;
};

SetState init_set_state();
SetState step_reference(const SetState& state, const RadiusField& field, Occupancy& occupancy);

/// Set view of an interval state: heard = [l, r], active = union of the active intervals.
SetState to_set_state(const BasicState& state);

}  // namespace rumour
