#include "rumour/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "rumour/keyed_random.hpp"
#include "rumour/statistics.hpp"

namespace rumour {

namespace {

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct Accumulator {
  std::map<std::int64_t, CompensatedSum> tau;
  std::map<std::int64_t, CompensatedSum> cluster;
  CompensatedSum overflow;
  std::int64_t leaves = 0;

  ExactBasicTables finish() const {
    ExactBasicTables t;
    for (const auto& [k, s] : tau) t.tau.pmf[k] = s.value();
    for (const auto& [k, s] : cluster) t.cluster.pmf[k] = s.value();
    t.tau.overflow = t.cluster.overflow = overflow.value();
    t.leaves = leaves;
    return t;
  }
};

struct Atom {
  Radius value;
  double mass;
};

std::vector<Atom> atoms_of(const RadiusLaw& law) {
  const auto k = law.support_bound();
  if (!k) throw std::invalid_argument("enumeration needs a law with bounded support");
  std::vector<Atom> out;
  for (Radius v = 0; v <= *k; ++v)
    if (law.pmf(v) > 0.0) out.push_back({v, law.pmf(v)});
  return out;
}

void check_spec(const EnumerationSpec& spec) {
  if (spec.horizon < 1 || spec.horizon > 4)
    throw std::invalid_argument("enumeration horizon must lie in [1, 4]");
  const double need = spec.required_budget();
  if (need > spec.budget) {
    std::ostringstream os;
    os << "enumeration needs up to " << need << " assignments, budget is " << spec.budget;
    throw BudgetExceeded(os.str(), need);
  }
}

using VSet = std::set<Vertex>;

// Literal model step given radii for every active vertex.
VSet newly_heard(const VSet& heard, const VSet& active, const std::map<Vertex, Radius>& radius) {
  VSet next;
  for (Vertex u : active) {
    const Radius rad = radius.at(u);
    for (Vertex z = u - rad; z <= u + rad; ++z)
      if (!heard.contains(z)) next.insert(z);
  }
  return next;
}

void record(Accumulator& acc, std::int64_t n, const VSet& heard, const VSet& active, double w) {
  if (active.empty()) {
    acc.tau[n].add(w);
    acc.cluster[static_cast<std::int64_t>(heard.size())].add(w);
  } else {
    acc.overflow.add(w);
  }
}

void explore(const std::vector<Atom>& atoms, std::int64_t horizon, std::int64_t n, const VSet& heard,
             const VSet& active, double weight, Accumulator& acc) {
  if (active.empty() || n == horizon) {
    ++acc.leaves;
    record(acc, n, heard, active, weight);
    return;
  }
  const std::vector<Vertex> todo(active.begin(), active.end());
  std::map<Vertex, Radius> radius;
  std::function<void(std::size_t, double)> assign = [&](std::size_t i, double w) {
    if (i == todo.size()) {
      VSet next = newly_heard(heard, active, radius);
      VSet heard2 = heard;
      heard2.insert(next.begin(), next.end());
      explore(atoms, horizon, n + 1, heard2, next, w, acc);
      return;
    }
    for (const Atom& a : atoms) {
      radius[todo[i]] = a.value;
      assign(i + 1, w * a.mass);
    }
  };
  assign(0, weight);
}

}  // namespace

Radius EnumerationSpec::support_bound() const {
  const auto k = law.support_bound();
  if (!k) throw std::invalid_argument("enumeration needs a law with bounded support");
  return *k;
}

std::int64_t EnumerationSpec::window_size() const { return 2 * support_bound() * horizon + 1; }

double EnumerationSpec::required_budget() const {
  return std::pow(static_cast<double>(atoms_of(law).size()), static_cast<double>(window_size()));
}

double ExactDistribution::total() const {
  CompensatedSum s;
  for (const auto& [k, p] : pmf) s.add(p);
  s.add(overflow);
  return s.value();
}

ExactBasicTables exact_basic_tables(const EnumerationSpec& spec) {
  check_spec(spec);
  Accumulator acc;
  explore(atoms_of(spec.law), spec.horizon, 0, VSet{0}, VSet{0}, 1.0, acc);
  return acc.finish();
}

ExactDistribution exact_tau_distribution(const EnumerationSpec& spec) {
  return exact_basic_tables(spec).tau;
}

ExactDistribution exact_cluster_distribution(const EnumerationSpec& spec) {
  return exact_basic_tables(spec).cluster;
}

ExactBasicTables exact_basic_tables_unpruned(const EnumerationSpec& spec) {
  check_spec(spec);
  const auto atoms = atoms_of(spec.law);
  const Vertex half = spec.support_bound() * spec.horizon;
  const auto width = static_cast<std::size_t>(2 * half + 1);
  std::vector<std::size_t> digit(width, 0);
  Accumulator acc;
  for (;;) {
    std::map<Vertex, Radius> radius;
    double w = 1.0;
    for (std::size_t i = 0; i < width; ++i) {
      radius[static_cast<Vertex>(i) - half] = atoms[digit[i]].value;
      w *= atoms[digit[i]].mass;
    }
    VSet heard{0};
    VSet active{0};
    std::int64_t n = 0;
    while (!active.empty() && n < spec.horizon) {
      active = newly_heard(heard, active, radius);
      heard.insert(active.begin(), active.end());
      ++n;
    }
    ++acc.leaves;
    record(acc, n, heard, active, w);

    std::size_t i = 0;
    while (i < width && ++digit[i] == atoms.size()) digit[i++] = 0;
    if (i == width) break;
  }
  return acc.finish();
}

std::map<Radius, double> exact_overshoot_distribution(const RadiusLaw& law, double budget) {
  const auto atoms = atoms_of(law);
  const Radius k = std::max<Radius>(*law.support_bound(), 1);
  // Vertices i <= -K have i + I_i <= 0 and never matter.
  const auto depth = static_cast<std::size_t>(k);
  if (std::pow(static_cast<double>(atoms.size()), static_cast<double>(depth)) > budget)
    throw BudgetExceeded("overshoot enumeration exceeds budget",
                         std::pow(static_cast<double>(atoms.size()), static_cast<double>(depth)));
  std::map<Radius, CompensatedSum> acc;
  std::vector<std::size_t> digit(depth, 0);
  for (;;) {
    Radius o = 0;
    double w = 1.0;
    for (std::size_t i = 0; i < depth; ++i) {
      o = std::max(o, atoms[digit[i]].value - static_cast<Radius>(i));
      w *= atoms[digit[i]].mass;
    }
    acc[o].add(w);
    std::size_t i = 0;
    while (i < depth && ++digit[i] == atoms.size()) digit[i++] = 0;
    if (i == depth) break;
  }
  std::map<Radius, double> out;
  for (const auto& [m, s] : acc) out[m] = s.value();
  return out;
}

RandomSumReport random_sum_identities(const RadiusLaw& law_x, const RadiusLaw& law_eta,
                                      std::int64_t replicates, std::uint64_t seed, double level) {
  if (replicates < 2) throw std::invalid_argument("random_sum_identities needs at least 2 replicates");
  SplitMix64 rng_eta(split_seed(seed, 0, Purpose::Sequential));
  SplitMix64 rng_x(split_seed(seed, 1, Purpose::Sequential));
  std::vector<double> z(static_cast<std::size_t>(replicates));
  for (auto& v : z) {
    const Radius eta = law_eta.sample(rng_eta);
    double s = 0.0;
    for (Radius i = 0; i < eta; ++i) s += static_cast<double>(law_x.sample(rng_x));
    v = s;
  }
  const MeanVar mv = mean_variance(z);
  double m4 = 0.0;
  for (double v : z) m4 += std::pow(v - mv.mean, 4);
  m4 /= static_cast<double>(replicates);

  const double zq = z_for_level(level);
  const double n = static_cast<double>(replicates);
  RandomSumReport rep;
  rep.replicates = replicates;
  rep.mean.estimate = mv.mean;
  rep.mean.lo = mv.mean - zq * std::sqrt(mv.variance / n);
  rep.mean.hi = mv.mean + zq * std::sqrt(mv.variance / n);
  rep.mean.predicted = law_eta.mean() * law_x.mean();

  // Large-sample standard error of the sample variance.
  const double se_var = std::sqrt(std::max(0.0, m4 - mv.variance * mv.variance) / n);
  rep.variance.estimate = mv.variance;
  rep.variance.lo = mv.variance - zq * se_var;
  rep.variance.hi = mv.variance + zq * se_var;
  rep.variance.predicted =
      law_eta.mean() * law_x.variance() + law_eta.variance() * law_x.mean() * law_x.mean();
  return rep;
}

}  // namespace rumour
