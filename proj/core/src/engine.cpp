#include "rumour/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rumour {

namespace {

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

SiteEnvironment SiteEnvironment::bernoulli(double p_occupied) {
  if (!is_prob(p_occupied)) throw std::invalid_argument("occupation probability must lie in [0, 1]");
  SiteEnvironment env;
  env.kind_ = Kind::BernoulliSites;
  env.p_occ_ = p_occupied;
  return env;
}

SiteEnvironment SiteEnvironment::markov(double p00, double p11) {
  if (!is_prob(p00) || !is_prob(p11))
    throw std::invalid_argument("Markov site transition probabilities must lie in [0, 1]");
  SiteEnvironment env;
  env.kind_ = Kind::MarkovSites;
  env.p00_ = p00;
  env.p11_ = p11;
  return env;
}

std::string SiteEnvironment::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::AllOccupied:
      os << "all_occupied";
      break;
    case Kind::BernoulliSites:
      os << "bernoulli(p=" << p_occ_ << ")";
      break;
    case Kind::MarkovSites:
      os << "markov(p00=" << p00_ << ",p11=" << p11_ << ")";
      break;
  }
  return os.str();
}

bool Occupancy::occupied(Vertex v) {
  if (v == 0) return true;
  switch (env_.kind()) {
    case SiteEnvironment::Kind::AllOccupied:
      return true;
    case SiteEnvironment::Kind::BernoulliSites:
      return streams_.site_uniform(v) < env_.p_occupied();
    case SiteEnvironment::Kind::MarkovSites: {
      // Two-state chains are reversible, so the left extension uses the same kernel.
      auto& flags = v > 0 ? right_ : left_;
      const auto idx = static_cast<std::size_t>(v > 0 ? v : -v);
      const Vertex sign = v > 0 ? 1 : -1;
      while (flags.size() <= idx) {
        const Vertex w = sign * static_cast<Vertex>(flags.size());
        const bool prev = flags.back() != 0;
        const double u = streams_.site_uniform(w);
        const bool next = prev ? u < env_.p11() : u >= env_.p00();
        flags.push_back(next ? 1 : 0);
      }
      return flags[idx] != 0;
    }
  }
  return true;
}

std::int64_t BasicState::active_count() const noexcept {
  if (active_left && active_right && *active_left == *active_right) return active_left->size();
  return (active_left ? active_left->size() : 0) + (active_right ? active_right->size() : 0);
}

BasicState init_state() {
  BasicState s;
  s.active_left = Interval{0, 0};
  s.active_right = Interval{0, 0};
  return s;
}

BasicState step(const BasicState& state, const RadiusField& field, Occupancy& occupancy) {
  Vertex reach_r = state.r;
  Vertex reach_l = state.l;
  auto spread = [&](const Interval& iv) {
    for (Vertex u = iv.lo; u <= iv.hi; ++u) {
      if (!occupancy.occupied(u)) continue;
      const Radius rad = field.radius(u, state.n);
      reach_r = std::max(reach_r, u + rad);
      reach_l = std::min(reach_l, u - rad);
    }
  };
  if (state.active_left) spread(*state.active_left);
  if (state.active_right && !(state.active_left && *state.active_left == *state.active_right))
    spread(*state.active_right);

  BasicState next;
  next.n = state.n + 1;
  next.l = reach_l;
  next.r = reach_r;
  if (reach_r > state.r) next.active_right = Interval{state.r + 1, reach_r};
  if (reach_l < state.l) next.active_left = Interval{reach_l, state.l - 1};
  return next;
}

namespace {

StepRecord record_of(const BasicState& s) { return {s.n, s.l, s.r, s.active_count()}; }

struct StopCheck {
  std::int64_t cap;
  std::optional<Vertex> target;
};

StopCheck stop_check(const StopRule& stop) {
  return std::visit(
      [](const auto& rule) -> StopCheck {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, UntilExtinct>) {
          if (rule.cap <= 0) throw std::invalid_argument("UntilExtinct cap must be positive");
          return {rule.cap, std::nullopt};
        } else if constexpr (std::is_same_v<T, Horizon>) {
          if (rule.steps <= 0) throw std::invalid_argument("Horizon must be positive");
          return {rule.steps, std::nullopt};
        } else {
          if (rule.x <= 0 || rule.cap <= 0)
            throw std::invalid_argument("RightReaches target and cap must be positive");
          return {rule.cap, rule.x};
        }
      },
      stop);
}

template <typename Stepper>
Trajectory drive(BasicState s, const StopRule& stop, Stepper&& advance) {
  const StopCheck check = stop_check(stop);
  Trajectory t;
  t.steps.push_back(record_of(s));
  while (!s.extinct() && s.n < check.cap && !(check.target && s.r >= *check.target)) {
    s = advance(s);
    t.steps.push_back(record_of(s));
  }
  t.status = s.extinct() ? TerminalStatus::Extinct : TerminalStatus::Censored;
  t.tau = s.n;
  t.cluster_size = s.r - s.l + 1;
  t.size_plus = s.r + 1;
  t.size_minus = 1 - s.l;
  return t;
}

}  // namespace

Trajectory run(const RadiusField& field, Occupancy& occupancy, const StopRule& stop) {
  return drive(init_state(), stop,
               [&](const BasicState& s) { return step(s, field, occupancy); });
}

Trajectory run(const RadiusField& field, const StopRule& stop) {
  Occupancy occupancy(SiteEnvironment::all_occupied(), 0);
  return run(field, occupancy, stop);
}

Trajectory run_one_sided(const RadiusField& field, const StopRule& stop) {
  BasicState s;
  s.active_right = Interval{0, 0};
  return drive(s, stop, [&](const BasicState& cur) {
    Vertex reach = cur.r;
    for (Vertex u = cur.active_right->lo; u <= cur.active_right->hi; ++u)
      reach = std::max(reach, u + field.radius(u, cur.n));
    BasicState next;
    next.n = cur.n + 1;
    next.r = reach;
    if (reach > cur.r) next.active_right = Interval{cur.r + 1, reach};
    return next;
  });
}

SetState init_set_state() {
  SetState s;
  s.heard.insert(0);
  s.active.insert(0);
  return s;
}

SetState step_reference(const SetState& state, const RadiusField& field, Occupancy& occupancy) {
  SetState next;
  next.n = state.n + 1;
  next.heard = state.heard;
  for (Vertex u : state.active) {
    if (!occupancy.occupied(u)) continue;
    const Radius rad = field.radius(u, state.n);
    for (Vertex z = u - rad; z <= u + rad; ++z)
      if (!state.heard.contains(z)) next.active.insert(z);
  }
  next.heard.insert(next.active.begin(), next.active.end());
  return next;
}

SetState to_set_state(const BasicState& state) {
  SetState s;
  s.n = state.n;
  for (Vertex v = state.l; v <= state.r; ++v) s.heard.insert(v);
  for (const auto& iv : {state.active_left, state.active_right})
    if (iv)
      for (Vertex v = iv->lo; v <= iv->hi; ++v) s.active.insert(v);
  return s;
}

}  // namespace rumour
