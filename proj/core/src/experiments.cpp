#include "rumour/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "rumour/oracles.hpp"
#include "rumour/parallel.hpp"

#ifndef RUMOUR_VERSION
#define RUMOUR_VERSION "0.0.0"
#endif

namespace rumour {

using nlohmann::json;

std::string library_version() { return RUMOUR_VERSION; }

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::Simulate, "simulate"}, {ExperimentKind::Survival, "survival"},
    {ExperimentKind::Speed, "speed"},       {ExperimentKind::Clt, "clt"},
    {ExperimentKind::React, "react"},       {ExperimentKind::Criterion, "criterion"},
    {ExperimentKind::Oracle, "oracle"},     {ExperimentKind::Probe, "probe"},
};

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt(bool x) { return x ? "1" : "0"; }

/// Reads keys of one JSON object, remembering which were consumed so leftovers
/// can be reported as unknown.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& errors)
      : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  std::optional<double> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_number()) {
      error(key + " must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::int64_t> integer(const std::string& key, std::int64_t min) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) {
      error(key + " must be an integer");
      return std::nullopt;
    }
    const auto x = v.get<std::int64_t>();
    if (x < min) {
      error(key + " must be at least " + std::to_string(min));
      return std::nullopt;
    }
    return x;
  }

  std::optional<double> probability(const std::string& key) {
    auto x = number(key);
    if (x && !(*x >= 0.0 && *x <= 1.0)) {
      error(key + " must lie in [0, 1], got " + fmt(*x));
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_string()) {
      error(key + " must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  const json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  void error(const std::string& msg) { errors_.push_back(prefix_ + msg); }

  void finish() {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) error("unknown key '" + key + "'");
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::optional<RadiusLaw> parse_law(const json& spec, json& normalised, std::vector<std::string>& errors) {
  if (!spec.is_object()) {
    errors.push_back("law must be an object");
    return std::nullopt;
  }
  Reader rd(spec, "law: ", errors);
  const auto kind = rd.string("kind");
  std::optional<RadiusLaw> law;
  const std::size_t before = errors.size();
  normalised = json::object();
  if (!kind) {
    rd.error("kind is required");
  } else if (*kind == "constant") {
    const auto c = rd.integer("c", 0);
    if (!c && errors.size() == before) rd.error("c is required");
    if (c) {
      law = RadiusLaw::constant(*c);
      normalised = {{"kind", "constant"}, {"c", *c}};
    }
  } else if (*kind == "geometric" || *kind == "geometric_min1") {
    const auto q = rd.probability("q");
    if (!q && errors.size() == before) rd.error("q is required");
    if (q && *q >= 1.0) rd.error("q must be below 1");
    if (q && *q < 1.0) {
      law = *kind == "geometric" ? RadiusLaw::geometric(*q) : RadiusLaw::geometric_min1(*q);
      normalised = {{"kind", *kind}, {"q", *q}};
    }
  } else if (*kind == "polynomial") {
    const auto alpha = rd.number("alpha");
    const auto c = rd.probability("c");
    if (!alpha) rd.error("alpha is required");
    if (alpha && !(*alpha > 0.0)) rd.error("alpha must be positive, got " + fmt(*alpha));
    if (!rd.has("c")) rd.error("c is required");
    if (alpha && *alpha > 0.0 && c) {
      law = RadiusLaw::polynomial_tail(*alpha, *c);
      normalised = {{"kind", "polynomial"}, {"alpha", *alpha}, {"c", *c}};
    }
  } else if (*kind == "finite") {
    const json* pmf = rd.raw("pmf");
    if (!pmf || !pmf->is_array() || pmf->empty()) {
      rd.error("pmf must be a nonempty array");
    } else {
      std::vector<double> p;
      bool good = true;
      for (const auto& v : *pmf) {
        if (!v.is_number() || !(v.get<double>() >= 0.0 && v.get<double>() <= 1.0)) {
          rd.error("pmf entries must be numbers in [0, 1]");
          good = false;
          break;
        }
        p.push_back(v.get<double>());
      }
      if (good) {
        const double mass = std::accumulate(p.begin(), p.end(), 0.0);
        if (std::abs(mass - 1.0) > 1e-12) {
          std::ostringstream os;
          os << "pmf mass " << mass;
          rd.error(os.str());
        } else {
          law = RadiusLaw::finite_support(p);
          normalised = {{"kind", "finite"}, {"pmf", p}};
        }
      }
    }
  } else {
    rd.error("unknown kind '" + *kind + "'");
  }
  rd.finish();
  if (errors.size() != before) return std::nullopt;
  return law;
}

std::optional<SiteEnvironment> parse_env(const json& spec, json& normalised, std::vector<std::string>& errors) {
  if (!spec.is_object()) {
    errors.push_back("environment must be an object");
    return std::nullopt;
  }
  Reader rd(spec, "environment: ", errors);
  const std::size_t before = errors.size();
  const auto kind = rd.string("kind");
  std::optional<SiteEnvironment> env;
  if (!kind || *kind == "all") {
    env = SiteEnvironment::all_occupied();
    normalised = {{"kind", "all"}};
  } else if (*kind == "bernoulli") {
    const auto p = rd.probability("p");
    if (!rd.has("p")) rd.error("p is required");
    if (p) {
      env = SiteEnvironment::bernoulli(*p);
      normalised = {{"kind", "bernoulli"}, {"p", *p}};
    }
  } else if (*kind == "markov") {
    const auto p00 = rd.probability("p00");
    const auto p11 = rd.probability("p11");
    if (!rd.has("p00") || !rd.has("p11")) rd.error("p00 and p11 are required");
    if (p00 && p11) {
      env = SiteEnvironment::markov(*p00, *p11);
      normalised = {{"kind", "markov"}, {"p00", *p00}, {"p11", *p11}};
    }
  } else {
    rd.error("unknown kind '" + *kind + "'");
  }
  rd.finish();
  if (errors.size() != before) return std::nullopt;
  return env;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "unknown";
}

std::optional<ExperimentKind> experiment_kind_from(const std::string& name) {
  for (const auto& [kind, n] : kKindNames)
    if (name == n) return kind;
  return std::nullopt;
}

json ExperimentConfig::canonical() const {
  json j;
  j["experiment"] = to_string(kind);
  j["law"] = law_spec;
  j["environment"] = env_spec;
  j["p2"] = p2;
  j["keying"] = keying == RadiusKeying::StepKeyed ? "step" : "activation";
  j["window"] = window ? json(*window) : json(nullptr);
  j["horizon"] = horizon;
  j["replicates"] = replicates;
  j["ns"] = ns;
  j["steps"] = steps;
  j["cap"] = cap;
  j["min_conditional"] = min_conditional;
  j["mu_source"] = mu_source == MuSource::Renewal ? "renewal" : mu_source == MuSource::Lln ? "lln" : "fixed";
  j["fixed_mu"] = fixed_mu;
  j["centering_steps"] = centering_steps;
  j["ks_alpha"] = ks_alpha;
  j["oracle_horizon"] = oracle_horizon;
  j["oracle_budget"] = oracle_budget;
  j["criterion_nmax"] = criterion_nmax;
  j["seed"] = seed;
  j["level"] = level;
  return j;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical().dump()); }

ParseResult parse_config(const std::string& text) {
  ParseResult res;
  auto& errors = res.errors;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    errors.push_back(std::string("malformed config: ") + e.what());
    return res;
  }
  if (!root.is_object()) {
    errors.push_back("config must be an object");
    return res;
  }

  ExperimentConfig cfg;
  Reader rd(root, "", errors);
  const auto kind_name = rd.string("experiment");
  if (!kind_name) {
    if (!root.contains("experiment")) rd.error("experiment is required");
  } else if (auto k = experiment_kind_from(*kind_name)) {
    cfg.kind = *k;
  } else {
    rd.error("unknown experiment '" + *kind_name + "'");
  }
  const bool reactive = cfg.kind == ExperimentKind::React || cfg.kind == ExperimentKind::Probe;

  if (const json* law = rd.raw("law")) {
    if (auto l = parse_law(*law, cfg.law_spec, errors)) cfg.law = *l;
  } else {
    rd.error("law is required");
  }
  cfg.env_spec = {{"kind", "all"}};
  if (const json* env = rd.raw("environment"))
    if (auto e = parse_env(*env, cfg.env_spec, errors)) cfg.env = *e;

  if (auto p2 = rd.probability("p2")) cfg.p2 = *p2;
  if (auto key = rd.string("keying")) {
    if (*key == "step")
      cfg.keying = RadiusKeying::StepKeyed;
    else if (*key == "activation")
      cfg.keying = RadiusKeying::ActivationKeyed;
    else
      rd.error("keying must be 'step' or 'activation'");
  }
  if (auto w = rd.integer("window", 1)) cfg.window = *w;

  // Replicate defaults depend on the experiment.
  if (cfg.kind == ExperimentKind::Speed || cfg.kind == ExperimentKind::React) cfg.replicates = 32;
  if (cfg.kind == ExperimentKind::Probe) cfg.horizon = 500;
  if (cfg.kind == ExperimentKind::Simulate) cfg.replicates = 10;

  if (auto v = rd.integer("horizon", 1)) cfg.horizon = *v;
  if (auto v = rd.integer("replicates", 1)) cfg.replicates = *v;
  if (auto v = rd.integer("steps", 1)) cfg.steps = *v;
  if (auto v = rd.integer("cap", 1)) cfg.cap = *v;
  if (auto v = rd.integer("min_conditional", 1)) cfg.min_conditional = *v;
  if (auto v = rd.integer("centering_steps", 1)) cfg.centering_steps = *v;
  if (auto v = rd.integer("oracle_horizon", 1)) cfg.oracle_horizon = *v;
  if (auto v = rd.integer("criterion_nmax", 1)) cfg.criterion_nmax = *v;
  if (auto v = rd.number("oracle_budget")) {
    if (*v > 0.0)
      cfg.oracle_budget = *v;
    else
      rd.error("oracle_budget must be positive");
  }
  if (auto v = rd.number("fixed_mu")) cfg.fixed_mu = *v;
  if (auto v = rd.number("ks_alpha")) {
    if (*v > 0.0 && *v < 1.0)
      cfg.ks_alpha = *v;
    else
      rd.error("ks_alpha must lie in (0, 1)");
  }
  if (auto v = rd.number("level")) {
    if (*v > 0.0 && *v < 1.0)
      cfg.level = *v;
    else
      rd.error("level must lie in (0, 1)");
  }
  if (auto src = rd.string("mu_source")) {
    if (*src == "renewal")
      cfg.mu_source = MuSource::Renewal;
    else if (*src == "lln")
      cfg.mu_source = MuSource::Lln;
    else if (*src == "fixed")
      cfg.mu_source = MuSource::Fixed;
    else
      rd.error("mu_source must be 'renewal', 'lln' or 'fixed'");
  }
  if (rd.has("seed")) {
    const json& s = root.at("seed");
    if (s.is_number_unsigned() || (s.is_number_integer() && s.get<std::int64_t>() >= 0))
      cfg.seed = s.get<std::uint64_t>();
    else
      rd.error("seed must be a nonnegative 64-bit integer");
  }
  if (auto out = rd.string("out")) cfg.out = *out;

  if (const json* ns = rd.raw("ns")) {
    if (!ns->is_array()) {
      rd.error("ns must be an array of nonnegative integers");
    } else {
      for (const auto& v : *ns) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
          rd.error("ns must be an array of nonnegative integers");
          cfg.ns.clear();
          break;
        }
        cfg.ns.push_back(v.get<std::int64_t>());
      }
    }
  } else {
    for (std::int64_t n = 1; n <= 10; ++n) cfg.ns.push_back(n);
  }
  std::sort(cfg.ns.begin(), cfg.ns.end());
  cfg.ns.erase(std::unique(cfg.ns.begin(), cfg.ns.end()), cfg.ns.end());
  rd.finish();

  if (cfg.kind == ExperimentKind::Survival) {
    const std::int64_t nmax = cfg.ns.empty() ? 0 : cfg.ns.back();
    if (cfg.cap < nmax + 2) rd.error("cap must exceed max(ns) + 1");
    if (cfg.horizon > cfg.cap) rd.error("horizon must not exceed cap");
  }
  if (cfg.kind == ExperimentKind::Clt && cfg.replicates < 2) rd.error("clt needs at least 2 replicates");
  if (cfg.kind == ExperimentKind::Oracle && cfg.oracle_horizon > 4) rd.error("oracle_horizon must lie in [1, 4]");
  if (reactive && cfg.keying == RadiusKeying::ActivationKeyed && cfg.window)
    rd.error("windowed runs need step-keyed radii");
  if (cfg.kind == ExperimentKind::Probe && !cfg.window && !cfg.law.support_bound() && errors.empty())
    rd.error("probe experiments on unbounded laws need a window");
  if (!reactive && cfg.p2 != 0.0) rd.error("p2 only applies to react and probe experiments");

  if (errors.empty()) res.config = std::move(cfg);
  return res;
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::string& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    out_ << "# config_hash=" << hash << '\n' << header << '\n';
  }

  template <typename... T>
  void row(const T&... cells) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cell(cells)), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(bool x) { return fmt(x); }
  template <typename I, std::enable_if_t<std::is_integral_v<I>, int> = 0>
  static std::string cell(I x) {
    return std::to_string(x);
  }

  std::ofstream out_;
};

json estimate_json(const EstimateReport& r) {
  return {{"quantity", r.quantity}, {"point", r.point},         {"lo", r.lo},
          {"hi", r.hi},             {"level", r.level},         {"replicates", r.replicates},
          {"censored", r.censored}, {"method", r.method},       {"notes", r.notes}};
}

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points}};
}

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  std::string hash;
  RunOptions opt;
  std::vector<std::string> files;
  json results = json::object();

  CsvWriter csv(const std::string& name, const std::string& header) {
    files.push_back(name);
    return CsvWriter(dir / name, hash, header);
  }
};

void write_survival_csv(Context& ctx, const std::string& name, const std::vector<SurvivalPoint>& pts,
                        const std::string& header) {
  auto w = ctx.csv(name, header);
  for (const auto& p : pts) w.row(p.n, p.survivors, p.replicates, p.p_hat, p.lo, p.hi);
}

void run_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto paths = parallel_map(cfg.replicates, ctx.opt.workers, [&](std::int64_t i) {
    const auto u = static_cast<std::uint64_t>(i);
    const RadiusField field(cfg.law, split_seed(cfg.seed, u, Purpose::RadiusField));
    Occupancy occupancy(cfg.env, split_seed(cfg.seed, u, Purpose::SiteField));
    return run(field, occupancy, Horizon{cfg.horizon});
  });
  auto traj = ctx.csv("trajectories.csv", "replicate,n,l,r,active_count");
  auto outc = ctx.csv("outcomes.csv", "replicate,status,tau,cluster_size");
  std::int64_t extinct = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
      const auto& s = p.steps[k];
      if (s.l > 0 || s.r < 0 || (k > 0 && (s.l > p.steps[k - 1].l || s.r < p.steps[k - 1].r)))
        throw InvariantViolation("replicate " + std::to_string(i) + ": cluster not nested at step " +
                                 std::to_string(s.n));
      traj.row(i, s.n, s.l, s.r, s.active_count);
    }
    outc.row(i, p.extinct() ? "extinct" : "censored", p.tau, p.cluster_size);
    extinct += p.extinct() ? 1 : 0;
  }
  ctx.results["extinct"] = extinct;
  ctx.results["replicates"] = cfg.replicates;
}

void run_survival(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto runs = basic_replicates(cfg.law, cfg.env, cfg.replicates, cfg.cap, ctx.opt);
  SurvivalTable table = survival_from_taus(runs, cfg.ns, cfg.level);
  write_survival_csv(ctx, "survival.csv", table.points, "n,survivors,replicates,p_hat,lo,hi");
  json surv = {{"fit", fit_json(table.fit)}, {"dropped", table.dropped}, {"censored", table.censored},
               {"notes", table.notes}};

  const OvershootCdf o = overshoot_cdf_exact(OvershootQuery::with_error(cfg.law), 0);
  if (o.status != OvershootStatus::Inconclusive) {
    const std::int64_t nmax = cfg.ns.empty() ? 0 : cfg.ns.back();
    const HazardReport hz = hazard_from_taus(cfg.law, runs, nmax, cfg.min_conditional);
    auto w = ctx.csv("hazard.csv", "n,at_risk,events,h_hat,sigma,checked,pass");
    for (const auto& p : hz.points) w.row(p.n, p.at_risk, p.events, p.h_hat, p.sigma, p.checked, p.pass);
    ctx.results["hazard"] = {{"p_o0", hz.p_o0}, {"bound", hz.bound}, {"pass", hz.pass()}, {"notes", hz.notes}};
  } else {
    ctx.results["hazard"] = {{"skipped", "P(O = 0) not computable"}};
  }

  const ClusterReport cl = cluster_from_runs(runs, cfg.level);
  write_survival_csv(ctx, "cluster.csv", cl.survival, "m,above,replicates,p_hat,lo,hi");
  ctx.results["cluster"] = {{"mean", estimate_json(cl.mean)},
                            {"second_moment", estimate_json(cl.second_moment)},
                            {"tail_fit", fit_json(cl.tail_fit)},
                            {"censored", cl.censored},
                            {"flagged", cl.flagged},
                            {"notes", cl.notes}};

  const auto alive = std::count_if(runs.begin(), runs.end(), [&](const BasicOutcome& r) {
    return !r.extinct || r.tau > cfg.horizon;
  });
  const auto ci = wilson_interval(alive, cfg.replicates, cfg.level);
  ctx.results["gamma"] = {{"horizon", cfg.horizon},
                          {"point", static_cast<double>(alive) / static_cast<double>(cfg.replicates)},
                          {"lo", ci.lo},
                          {"hi", ci.hi},
                          {"note", "biased upward: runs alive at the horizon count as percolating"}};
  ctx.results["survival"] = surv;
  const auto crit = percolation_criterion(cfg.law);
  ctx.results["criterion"] = to_string(crit.verdict);
}

void run_speed(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const EstimateReport lln = speed_lln(cfg.law, cfg.steps, cfg.replicates, ctx.opt);
  std::optional<EstimateReport> ren;
  std::string ren_error;
  try {
    const auto policy = cfg.law.support_bound() ? DepthPolicy::exact_bounded() : DepthPolicy::tail_budget(1e-12);
    ren = speed_renewal(cfg.law, cfg.steps * cfg.replicates, ctx.opt, policy);
  } catch (const std::exception& e) {
    ren_error = e.what();
  }
  auto w = ctx.csv("speed.csv", "estimator,point,lo,hi,level,replicates,method");
  w.row("lln", lln.point, lln.lo, lln.hi, lln.level, lln.replicates, lln.method);
  ctx.results["lln"] = estimate_json(lln);
  if (ren) {
    w.row("renewal", ren->point, ren->lo, ren->hi, ren->level, ren->replicates, ren->method);
    ctx.results["renewal"] = estimate_json(*ren);
    const double se = std::hypot(lln.standard_error(), ren->standard_error());
    ctx.results["agree"] = std::abs(lln.point - ren->point) <= z_for_level(cfg.level) * se;
  } else {
    ctx.results["renewal"] = {{"error", ren_error}};
  }
}

void run_clt(Context& ctx) {
  const auto& cfg = ctx.cfg;
  CltOptions c;
  c.mu_source = cfg.mu_source;
  c.fixed_mu = cfg.fixed_mu;
  c.centering_steps = cfg.centering_steps;
  c.ks_alpha = cfg.ks_alpha;
  const CltReport rep = clt_check(cfg.law, cfg.steps, cfg.replicates, ctx.opt, c);
  auto w = ctx.csv("clt_samples.csv", "replicate,r_n,z");
  for (std::size_t i = 0; i < rep.z.size(); ++i) w.row(i, static_cast<std::int64_t>(rep.r_n[i]), rep.z[i]);
  ctx.results = {{"n", rep.n},
                 {"replicates", rep.replicates},
                 {"mu_hat", rep.mu_hat},
                 {"psi_hat", rep.psi_hat},
                 {"psi_renewal", rep.psi_renewal ? json(*rep.psi_renewal) : json(nullptr)},
                 {"mean_z", rep.mean_z},
                 {"ks_distance", rep.ks_distance},
                 {"ks_distance_lattice", rep.ks_distance_lattice},
                 {"mu_se", rep.mu_se},
                 {"ks_critical", rep.ks_critical},
                 {"ks_alpha", rep.ks_alpha},
                 {"degenerate", rep.degenerate},
                 {"ks_pass", rep.ks_pass()},
                 {"centering_pass", rep.centering_pass()},
                 {"notes", rep.notes}};
}

ReactParams react_params(const ExperimentConfig& cfg) {
  ReactParams p;
  p.law = cfg.law;
  p.p2 = cfg.p2;
  p.keying = cfg.keying;
  p.window = cfg.window;
  p.seed = cfg.seed;
  return p;
}

void run_react(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ReactParams p = react_params(cfg);
  const double theta = drift_theta(cfg.law, cfg.p2);
  auto w = ctx.csv("react_speed.csv", "steps,point,lo,hi,level,replicates");
  json rows = json::array();
  std::vector<EstimateReport> reps;
  for (std::int64_t n : {cfg.steps, 2 * cfg.steps}) {
    reps.push_back(speed_lln_react(p, n, cfg.replicates, ctx.opt));
    const auto& r = reps.back();
    w.row(n, r.point, r.lo, r.hi, r.level, r.replicates);
    json e = estimate_json(r);
    e["steps"] = n;
    rows.push_back(e);
  }
  ctx.results["theta"] = theta;
  ctx.results["estimates"] = rows;
  // Fronts move at most K per step for a law bounded by K.
  const auto bound = cfg.law.support_bound();
  ctx.results["within_drift_bounds"] =
      reps[0].lo >= theta && (!bound || reps[0].hi <= static_cast<double>(*bound));
  ctx.results["scaling_consistent"] = std::abs(reps[0].point - reps[1].point) <= reps[0].halfwidth();
}

void run_criterion(Context& ctx) {
  const auto c = percolation_criterion(ctx.cfg.law, ctx.cfg.criterion_nmax);
  auto w = ctx.csv("criterion.csv", "verdict,nmax,log_a_nmax,partial_sum,certificate_value,log_certificate");
  w.row(to_string(c.verdict), c.nmax, c.log_a_nmax, c.partial_sum, c.certificate_value, c.log_certificate);
  ctx.results = {{"verdict", to_string(c.verdict)},
                 {"nmax", c.nmax},
                 {"partial_sum", c.partial_sum},
                 {"certificate", c.certificate}};
}

void run_oracle(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const ExactBasicTables t = exact_basic_tables({cfg.law, cfg.oracle_horizon, cfg.oracle_budget});
  auto w = ctx.csv("oracle.csv", "quantity,value,probability");
  json tau = json::object();
  json cluster = json::object();
  for (const auto& [k, p] : t.tau.pmf) {
    w.row("tau", k, p);
    tau[std::to_string(k)] = p;
  }
  for (const auto& [m, p] : t.cluster.pmf) {
    w.row("cluster", m, p);
    cluster[std::to_string(m)] = p;
  }
  ctx.results = {{"horizon", cfg.oracle_horizon},
                 {"tau", tau},
                 {"cluster", cluster},
                 {"overflow", t.tau.overflow},
                 {"leaves", t.leaves}};
  if (cfg.law.support_bound()) {
    json over = json::object();
    for (const auto& [m, p] : exact_overshoot_distribution(cfg.law, cfg.oracle_budget)) over[std::to_string(m)] = p;
    ctx.results["overshoot"] = over;
  }
}

void run_probe(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const BetaSurvival b = beta_survival(react_params(cfg), cfg.horizon, cfg.replicates, ctx.opt);
  auto w = ctx.csv("probes.csv", "probe,outcome,beta");
  for (std::size_t i = 0; i < b.probes.size(); ++i) {
    const auto& p = b.probes[i];
    w.row(i, p.dominated() ? "dominated" : "failed", p.dominated() ? std::int64_t{-1} : p.beta);
  }
  write_survival_csv(ctx, "beta_survival.csv", b.points, "n,failed_after,probes,p_hat,lo,hi");
  ctx.results = {{"horizon", cfg.horizon},
                 {"probes", cfg.replicates},
                 {"failed", b.failed},
                 {"fit", fit_json(b.fit)},
                 {"error_budget", b.error_budget}};
}

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string file_hash(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

}  // namespace

std::vector<std::pair<std::string, std::string>> csv_schema(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Simulate:
      return {{"trajectories.csv", "replicate,n,l,r,active_count"},
              {"outcomes.csv", "replicate,status,tau,cluster_size"}};
    case ExperimentKind::Survival:
      return {{"survival.csv", "n,survivors,replicates,p_hat,lo,hi"},
              {"hazard.csv", "n,at_risk,events,h_hat,sigma,checked,pass"},
              {"cluster.csv", "m,above,replicates,p_hat,lo,hi"}};
    case ExperimentKind::Speed:
      return {{"speed.csv", "estimator,point,lo,hi,level,replicates,method"}};
    case ExperimentKind::Clt:
      return {{"clt_samples.csv", "replicate,r_n,z"}};
    case ExperimentKind::React:
      return {{"react_speed.csv", "steps,point,lo,hi,level,replicates"}};
    case ExperimentKind::Criterion:
      return {{"criterion.csv", "verdict,nmax,log_a_nmax,partial_sum,certificate_value,log_certificate"}};
    case ExperimentKind::Oracle:
      return {{"oracle.csv", "quantity,value,probability"}};
    case ExperimentKind::Probe:
      return {{"probes.csv", "probe,outcome,beta"}, {"beta_survival.csv", "n,failed_after,probes,p_hat,lo,hi"}};
  }
  return {};
}

RunResult run_experiment(const ExperimentConfig& cfg, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = iso_now();
  RunResult result;
  result.dir = cfg.out;
  std::filesystem::create_directories(result.dir);

  Context ctx{cfg, result.dir, cfg.hash(), RunOptions{cfg.seed, cfg.level, std::max(1u, workers)}, {}, {}};
  json report;
  report["config_hash"] = ctx.hash;
  report["experiment"] = to_string(cfg.kind);
  report["config"] = cfg.canonical();
  report["law"] = cfg.law.describe();
  report["environment"] = cfg.env.describe();
  try {
    switch (cfg.kind) {
      case ExperimentKind::Simulate: run_simulate(ctx); break;
      case ExperimentKind::Survival: run_survival(ctx); break;
      case ExperimentKind::Speed: run_speed(ctx); break;
      case ExperimentKind::Clt: run_clt(ctx); break;
      case ExperimentKind::React: run_react(ctx); break;
      case ExperimentKind::Criterion: run_criterion(ctx); break;
      case ExperimentKind::Oracle: run_oracle(ctx); break;
      case ExperimentKind::Probe: run_probe(ctx); break;
    }
    report["status"] = "ok";
  } catch (const InvariantViolation& e) {
    report["status"] = "invariant_violation";
    report["error"] = e.what();
    result.exit_code = 3;
  }
  report["results"] = ctx.results;
  {
    std::ofstream out(result.dir / "report.json", std::ios::binary);
    out << report.dump(2) << '\n';
  }
  ctx.files.push_back("report.json");

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest;
  manifest["config_hash"] = ctx.hash;
  manifest["seed"] = cfg.seed;
  manifest["experiment"] = to_string(cfg.kind);
  manifest["version"] = library_version();
  manifest["compiler"] = __VERSION__;
  manifest["started_utc"] = started;
  manifest["wall_time_seconds"] = wall;
  manifest["workers"] = ctx.opt.workers;
  json files = json::array();
  for (const auto& f : ctx.files) files.push_back({{"name", f}, {"fnv1a", file_hash(result.dir / f)}});
  manifest["files"] = files;
  {
    std::ofstream out(result.dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
  }
  ctx.files.push_back("manifest.json");
  result.files = ctx.files;
  result.report = std::move(report);
  return result;
}

}  // namespace rumour
