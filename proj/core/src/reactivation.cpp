#include "rumour/reactivation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rumour {

namespace {

constexpr std::int64_t kMaxCells = std::int64_t{1} << 28;

struct Range {
  Vertex lo;
  Vertex hi;
};

// Vertices whose state is simulated; at most two disjoint ranges.
int simulated_ranges(const ReactivationState& s, const std::optional<Radius>& window, Range out[2]) {
  switch (s.shape) {
    case ReactShape::TwoSided:
      if (!window || s.r - s.l + 1 <= 2 * *window) {
        out[0] = {s.l, s.r};
        return 1;
      }
      out[0] = {s.l, s.l + *window - 1};
      out[1] = {s.r - *window + 1, s.r};
      return 2;
    case ReactShape::OneSided:
      out[0] = {window ? std::max(s.l, s.r - *window + 1) : s.l, s.r};
      return 1;
    case ReactShape::LeftHalfLine:
      out[0] = {s.r - *window + 1, s.r};
      return 1;
  }
  return 0;
}

}  // namespace

void ReactParams::validate() const {
  if (!(p2 >= 0.0 && p2 <= 1.0)) throw std::invalid_argument("p2 must lie in [0, 1]");
  if (window && *window < 1) throw std::invalid_argument("window must be at least 1");
}

ReactivationState react_init(ReactShape shape, Vertex u, const ReactParams& params,
                             std::int64_t t0) {
  params.validate();
  ReactivationState s;
  s.shape = shape;
  s.t0 = t0;
  if (shape == ReactShape::LeftHalfLine) {
    if (!params.window) throw std::invalid_argument("the (-inf, u) process needs a window");
    s.r = u - 1;
    s.l = s.r;
    s.base = s.r - *params.window + 1;
    s.cells.assign(static_cast<std::size_t>(*params.window), {0, true});
    s.active_count = *params.window;
    return s;
  }
  s.l = s.r = s.base = u;
  s.cells.push_back({0, true});
  s.active_count = 1;
  return s;
}

void step_react(ReactivationState& s, const ReactParams& params) {
  const KeyedStreams streams{params.seed};
  const std::int64_t key_step = s.t0 + s.n;
  Range ranges[2];
  const int nr = simulated_ranges(s, params.window, ranges);

  Vertex reach_r = s.r;
  Vertex reach_l = s.l;
  for (int k = 0; k < nr; ++k) {
    for (Vertex v = ranges[k].lo; v <= ranges[k].hi; ++v) {
      auto& c = s.cell(v);
      if (!c.active) continue;
      const std::int64_t key = params.keying == RadiusKeying::StepKeyed ? key_step : c.activations;
      const Radius rad = params.law.quantile(streams.radius_uniform(key, v));
      ++c.activations;
      reach_r = std::max(reach_r, v + rad);
      if (s.shape == ReactShape::TwoSided) reach_l = std::min(reach_l, v - rad);
    }
    for (Vertex v = ranges[k].lo; v <= ranges[k].hi; ++v) s.cell(v).active = false;
  }
  if (reach_r - s.r > kMaxCells || s.l - reach_l > kMaxCells)
    throw std::length_error("reactivation cluster grew beyond the cell budget");

  const Vertex old_l = s.l;
  const Vertex old_r = s.r;
  for (Vertex v = old_r + 1; v <= reach_r; ++v) s.cells.push_back({0, true});
  for (Vertex v = old_l - 1; v >= reach_l; --v) s.cells.push_front({0, true});
  s.base -= old_l - reach_l;
  s.l = reach_l;
  s.r = reach_r;
  ++s.n;

  // Previously heard vertices are active now iff their clock fires.
  const std::int64_t clock_step = s.t0 + s.n;
  const int nn = simulated_ranges(s, params.window, ranges);
  s.active_count = 0;
  for (int k = 0; k < nn; ++k) {
    for (Vertex v = ranges[k].lo; v <= ranges[k].hi; ++v) {
      auto& c = s.cell(v);
      const bool heard_before = v <= old_r && (s.shape == ReactShape::LeftHalfLine || v >= old_l);
      c.active = heard_before ? streams.clock_uniform(clock_step, v) < params.p2 : true;
      s.active_count += c.active;
    }
  }
  if (s.shape != ReactShape::TwoSided && params.window) {
    while (s.base < s.r - *params.window + 1) {
      s.cells.pop_front();
      ++s.base;
    }
  }
}

double react_step_error(const ReactParams& params, ReactShape shape) {
  if (!params.window) return 0.0;
  const double per_front = params.p2 * params.law.tail_sum_beyond(*params.window - 1);
  return shape == ReactShape::TwoSided ? 2.0 * per_front : per_front;
}

namespace {

ReactTrajectory drive_react(ReactivationState s, const ReactParams& params, std::int64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be positive");
  ReactTrajectory out;
  out.window = params.window;
  out.path.steps.reserve(static_cast<std::size_t>(horizon) + 1);
  out.path.steps.push_back({s.n, s.l, s.r, s.active_count});
  while (s.n < horizon) {
    step_react(s, params);
    out.path.steps.push_back({s.n, s.l, s.r, s.active_count});
  }
  out.path.status = TerminalStatus::Censored;
  out.path.tau = s.n;
  out.path.cluster_size = s.r - s.l + 1;
  out.path.size_plus = s.r + 1;
  out.path.size_minus = 1 - s.l;
  out.error_budget =
      std::min(1.0, static_cast<double>(horizon) * react_step_error(params, s.shape));
  return out;
}

}  // namespace

ReactTrajectory run_react(const ReactParams& params, std::int64_t horizon) {
  return drive_react(react_init(ReactShape::TwoSided, 0, params), params, horizon);
}

ReactTrajectory run_one_sided_react(Vertex u, const ReactParams& params, std::int64_t horizon,
                                    std::int64_t t0) {
  ReactTrajectory t = drive_react(react_init(ReactShape::OneSided, u, params, t0), params, horizon);
  t.path.size_minus = 0;
  t.path.size_plus = t.path.last().r - u + 1;
  return t;
}

DominationProbe probe_domination(Vertex u, const ReactParams& params, std::int64_t horizon,
                                 std::int64_t t0) {
  if (horizon < 1) throw std::invalid_argument("probe horizon must be positive");
  ReactParams p = params;
  p.keying = RadiusKeying::StepKeyed;
  if (!p.window) {
    const auto k = p.law.support_bound();
    if (!k) throw std::invalid_argument("probes on unbounded laws need an explicit window");
    p.window = std::max<Radius>(*k, 1);
  }
  ReactivationState left = react_init(ReactShape::LeftHalfLine, u, p, t0);
  ReactivationState right = react_init(ReactShape::OneSided, u, p, t0);

  DominationProbe probe;
  probe.u = u;
  probe.t0 = t0;
  probe.horizon = horizon;
  const double tail = p.law.tail_sum_beyond(*p.window - 1);
  probe.error_budget = std::min(1.0, tail + 2.0 * static_cast<double>(horizon) * p.p2 * tail);
  for (std::int64_t m = 1; m <= horizon; ++m) {
    step_react(left, p);
    step_react(right, p);
    if (left.r > right.r) {
      probe.outcome = DominationProbe::Outcome::Failed;
      probe.beta = m;
      return probe;
    }
  }
  probe.outcome = DominationProbe::Outcome::DominatedThrough;
  return probe;
}

std::vector<Increment> ReactRenewalLedger::increments() const {
  std::vector<Increment> out;
  for (std::size_t j = 1; j < taus.size(); ++j)
    out.push_back({taus[j].step - taus[j - 1].step, taus[j].r - taus[j - 1].r});
  return out;
}

ReactRenewalLedger detect_renewals_react(const ReactParams& params, std::int64_t horizon,
                                         std::int64_t confirm_lag) {
  if (confirm_lag < 1) throw std::invalid_argument("confirm lag must be at least 1");
  ReactParams p = params;
  p.keying = RadiusKeying::StepKeyed;
  const ReactTrajectory path = run_react(p, horizon);
  ReactRenewalLedger ledger;
  ledger.confirm_lag = confirm_lag;
  ledger.error_budget = path.error_budget;
  for (const auto& rec : path.path.steps) {
    const DominationProbe probe = probe_domination(rec.r, p, confirm_lag, rec.n);
    ledger.error_budget = std::min(1.0, ledger.error_budget + probe.error_budget);
    if (probe.dominated()) ledger.taus.push_back({rec.n, rec.r});
  }
  return ledger;
}

double drift_theta(const RadiusLaw& law, double p2) {
  if (!(p2 >= 0.0 && p2 <= 1.0)) throw std::invalid_argument("p2 must lie in [0, 1]");
  return p2 * law.tail(0);
}

std::vector<Vertex> drift_walk(const ReactParams& params, const Trajectory& path) {
  if (params.keying != RadiusKeying::StepKeyed)
    throw std::invalid_argument("the drift walk reads step-keyed radii");
  const KeyedStreams streams{params.seed};
  std::vector<Vertex> x(path.steps.size(), 0);
  for (std::size_t n = 1; n < path.steps.size(); ++n) {
    const auto step = static_cast<std::int64_t>(n) - 1;
    const Vertex v = path.steps[n - 1].r;
    const bool fires = streams.clock_uniform(step, v) < params.p2;
    const bool reaches = params.law.quantile(streams.radius_uniform(step, v)) >= 1;
    x[n] = x[n - 1] + (fires && reaches ? 1 : 0);
  }
  return x;
}

}  // namespace rumour
