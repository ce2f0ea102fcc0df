#include "rumour/radius_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/zeta.hpp>

namespace rumour {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Radii beyond 2^52 cannot be distinguished from each other in double arithmetic.
constexpr Radius kMaxRadius = Radius{1} << 52;

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

RadiusLaw RadiusLaw::constant(Radius c) {
  if (c < 0) throw std::invalid_argument("constant radius must be nonnegative");
  RadiusLaw law;
  law.kind_ = LawKind::Constant;
  law.constant_ = c;
  return law;
}

RadiusLaw RadiusLaw::geometric(double q) {
  if (!is_prob(q) || q >= 1.0) throw std::invalid_argument("geometric q must lie in [0, 1)");
  RadiusLaw law;
  law.kind_ = LawKind::Geometric;
  law.q_ = q;
  return law;
}

RadiusLaw RadiusLaw::geometric_min1(double q) {
  if (!is_prob(q) || q >= 1.0) throw std::invalid_argument("geometric_min1 q must lie in [0, 1)");
  RadiusLaw law;
  law.kind_ = LawKind::GeometricMin1;
  law.q_ = q;
  return law;
}

RadiusLaw RadiusLaw::polynomial_tail(double alpha, double c) {
  if (!(std::isfinite(alpha) && alpha > 0.0))
    throw std::invalid_argument("polynomial tail alpha must be positive");
  if (!is_prob(c)) throw std::invalid_argument("polynomial tail c must lie in [0, 1]");
  RadiusLaw law;
  law.kind_ = LawKind::PolynomialTail;
  law.alpha_ = alpha;
  law.c_ = c;
  return law;
}

RadiusLaw RadiusLaw::finite_support(std::vector<double> pmf) {
  if (pmf.empty()) throw std::invalid_argument("pmf must be nonempty");
  for (double p : pmf)
    if (!is_prob(p)) throw std::invalid_argument("pmf entries must lie in [0, 1]");
  const double mass = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  if (std::abs(mass - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "pmf mass " << mass;
    throw std::invalid_argument(os.str());
  }
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  RadiusLaw law;
  law.kind_ = LawKind::FiniteSupport;
  law.cumulative_.resize(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), law.cumulative_.begin());
  law.cumulative_.back() = 1.0;
  law.pmf_ = std::move(pmf);
  return law;
}

double RadiusLaw::cdf(Radius i) const {
  if (i < 0) return 0.0;
  switch (kind_) {
    case LawKind::Constant:
      return i >= constant_ ? 1.0 : 0.0;
    case LawKind::FiniteSupport:
      return i >= static_cast<Radius>(cumulative_.size()) ? 1.0 : cumulative_[i];
    default:
      return 1.0 - tail(i);
  }
}

double RadiusLaw::tail(Radius i) const {
  if (i < 0) return 1.0;
  switch (kind_) {
    case LawKind::Constant:
      return i >= constant_ ? 0.0 : 1.0;
    case LawKind::Geometric:
      return std::pow(q_, static_cast<double>(i + 1));
    case LawKind::GeometricMin1:
      return std::pow(q_, static_cast<double>(i));
    case LawKind::PolynomialTail:
      return c_ * std::pow(static_cast<double>(i + 1), -alpha_);
    case LawKind::FiniteSupport: {
      if (i >= static_cast<Radius>(pmf_.size())) return 0.0;
      double s = 0.0;
      for (std::size_t k = static_cast<std::size_t>(i) + 1; k < pmf_.size(); ++k) s += pmf_[k];
      return s;
    }
  }
  return 0.0;
}

double RadiusLaw::pmf(Radius k) const {
  if (k < 0) return 0.0;
  switch (kind_) {
    case LawKind::Constant:
      return k == constant_ ? 1.0 : 0.0;
    case LawKind::FiniteSupport:
      return k < static_cast<Radius>(pmf_.size()) ? pmf_[k] : 0.0;
    case LawKind::Geometric:
      return (1.0 - q_) * std::pow(q_, static_cast<double>(k));
    case LawKind::GeometricMin1:
      return k == 0 ? 0.0 : (1.0 - q_) * std::pow(q_, static_cast<double>(k - 1));
    case LawKind::PolynomialTail:
      return tail(k - 1) - tail(k);
  }
  return 0.0;
}

std::optional<Radius> RadiusLaw::support_bound() const {
  switch (kind_) {
    case LawKind::Constant:
      return constant_;
    case LawKind::FiniteSupport:
      return static_cast<Radius>(pmf_.size()) - 1;
    case LawKind::Geometric:
      if (q_ == 0.0) return Radius{0};
      return std::nullopt;
    case LawKind::GeometricMin1:
      if (q_ == 0.0) return Radius{1};
      return std::nullopt;
    case LawKind::PolynomialTail:
      if (c_ == 0.0) return Radius{0};
      return std::nullopt;
  }
  return std::nullopt;
}

double RadiusLaw::moment_order() const {
  if (kind_ == LawKind::PolynomialTail && c_ > 0.0) return alpha_;
  return kInf;
}

double RadiusLaw::mean() const {
  switch (kind_) {
    case LawKind::Constant:
      return static_cast<double>(constant_);
    case LawKind::Geometric:
      return q_ / (1.0 - q_);
    case LawKind::GeometricMin1:
      return 1.0 / (1.0 - q_);
    case LawKind::PolynomialTail:
      if (c_ == 0.0) return 0.0;
      return alpha_ > 1.0 ? c_ * boost::math::zeta(alpha_) : kInf;
    case LawKind::FiniteSupport: {
      double m = 0.0;
      for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
      return m;
    }
  }
  return 0.0;
}

double RadiusLaw::second_moment() const {
  switch (kind_) {
    case LawKind::Constant:
      return static_cast<double>(constant_) * static_cast<double>(constant_);
    case LawKind::Geometric:
      return q_ * (1.0 + q_) / ((1.0 - q_) * (1.0 - q_));
    case LawKind::GeometricMin1:
      return (1.0 + q_) / ((1.0 - q_) * (1.0 - q_));
    case LawKind::PolynomialTail:
      // E I^2 = sum_{i>=0} (2i+1) P(I > i) = c (2 zeta(alpha-1) - zeta(alpha)).
      if (c_ == 0.0) return 0.0;
      return alpha_ > 2.0
                 ? c_ * (2.0 * boost::math::zeta(alpha_ - 1.0) - boost::math::zeta(alpha_))
                 : kInf;
    case LawKind::FiniteSupport: {
      double m = 0.0;
      for (std::size_t k = 0; k < pmf_.size(); ++k)
        m += static_cast<double>(k) * static_cast<double>(k) * pmf_[k];
      return m;
    }
  }
  return 0.0;
}

double RadiusLaw::tail_sum_beyond(Radius d) const {
  if (d < -1) d = -1;
  switch (kind_) {
    case LawKind::Constant:
      return static_cast<double>(std::max<Radius>(0, constant_ - 1 - d));
    case LawKind::Geometric:
      return std::pow(q_, static_cast<double>(d + 2)) / (1.0 - q_);
    case LawKind::GeometricMin1:
      return std::pow(q_, static_cast<double>(d + 1)) / (1.0 - q_);
    case LawKind::PolynomialTail:
      if (c_ == 0.0) return 0.0;
      if (alpha_ <= 1.0) return kInf;
      if (d < 0) return mean();
      // sum_{k >= d+2} k^-alpha <= int_{d+1}^inf x^-alpha dx
      return c_ * std::pow(static_cast<double>(d + 1), 1.0 - alpha_) / (alpha_ - 1.0);
    case LawKind::FiniteSupport: {
      double s = 0.0;
      for (Radius j = d + 1; j < static_cast<Radius>(pmf_.size()); ++j) s += tail(j);
      return s;
    }
  }
  return 0.0;
}

Radius RadiusLaw::quantile(double u) const {
  switch (kind_) {
    case LawKind::Constant:
      return constant_;
    case LawKind::FiniteSupport: {
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      if (it == cumulative_.end()) --it;
      return static_cast<Radius>(it - cumulative_.begin());
    }
    case LawKind::Geometric:
    case LawKind::GeometricMin1: {
      Radius k = 0;
      if (q_ > 0.0) {
        // I > k  <=>  1 - u <= q^(k+1)
        const double x = std::log1p(-u) / std::log(q_);
        k = x >= static_cast<double>(kMaxRadius) ? kMaxRadius : static_cast<Radius>(std::floor(x));
      }
      return kind_ == LawKind::Geometric ? k : k + 1;
    }
    case LawKind::PolynomialTail: {
      const double v = 1.0 - u;
      if (v > c_) return 0;
      // I > k  <=>  k + 1 <= (c / v)^(1/alpha)
      const double x = std::pow(c_ / v, 1.0 / alpha_);
      return x >= static_cast<double>(kMaxRadius) ? kMaxRadius
                                                  : static_cast<Radius>(std::floor(x));
    }
  }
  return 0;
}

std::string RadiusLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case LawKind::Constant:
      os << "constant(c=" << constant_ << ")";
      break;
    case LawKind::Geometric:
      os << "geometric(q=" << q_ << ")";
      break;
    case LawKind::GeometricMin1:
      os << "geometric_min1(q=" << q_ << ")";
      break;
    case LawKind::PolynomialTail:
      os << "polynomial(alpha=" << alpha_ << ",c=" << c_ << ")";
      break;
    case LawKind::FiniteSupport: {
      os << "finite(pmf=[";
      for (std::size_t k = 0; k < pmf_.size(); ++k) os << (k ? "," : "") << pmf_[k];
      os << "])";
      break;
    }
  }
  return os.str();
}

double a_n(const RadiusLaw& law, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("a_n requires n >= 0");
  double a = 1.0;
  for (std::int64_t i = 0; i <= n && a > 0.0; ++i) a *= law.cdf(i);
  return a;
}

std::string to_string(PercolationVerdict v) {
  switch (v) {
    case PercolationVerdict::NoPercolation:
      return "NoPercolation";
    case PercolationVerdict::PercolatesWithPositiveProb:
      return "PercolatesWithPositiveProb";
    case PercolationVerdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

CriterionResult percolation_criterion(const RadiusLaw& law, std::int64_t nmax, double tol) {
  if (nmax <= 0) throw std::invalid_argument("percolation_criterion requires nmax >= 1");
  CriterionResult out;
  out.nmax = nmax;

  double log_a = 0.0;
  for (std::int64_t i = 0; i <= nmax; ++i) {
    const double f = law.cdf(i);
    if (f <= 0.0) {
      // a_n = 0 from here on: the series is a finite sum.
      out.verdict = PercolationVerdict::PercolatesWithPositiveProb;
      out.log_a_nmax = -kInf;
      out.certificate_value = 0.0;
      out.certificate = "a_n vanishes from n=" + std::to_string(i);
      return out;
    }
    log_a += std::log(f);
    if (i >= 1) out.partial_sum += std::exp(log_a);
  }
  out.log_a_nmax = log_a;

  // Divergence: with sum_i P(I > i) finite the product has a positive limit,
  // lim a_n >= a_N exp(-S / (1 - P(I > N+1))) with S = sum_{i>N} P(I > i).
  const double tail_sum = law.tail_sum_beyond(nmax);
  if (std::isfinite(tail_sum)) {
    const double x = law.tail(nmax + 1);
    out.verdict = PercolationVerdict::NoPercolation;
    out.certificate_value = std::exp(log_a - tail_sum / (1.0 - x));
    out.certificate = "lim a_n >= " + std::to_string(out.certificate_value) + " > 0";
    return out;
  }

  if (law.kind() != LawKind::PolynomialTail) return out;

  const double alpha = law.alpha();
  const double c = law.c();
  const double big_n = static_cast<double>(nmax);

  if (alpha == 1.0) {
    // a_n >= a_N ((N+1)/(n+1))^e with e = c / (1 - c/(N+2)); diverges for e <= 1.
    const double e = c / (1.0 - c / (big_n + 2.0));
    if (e <= 1.0) {
      out.verdict = PercolationVerdict::NoPercolation;
      out.certificate_value = e;
      out.certificate = "a_n >= C n^-" + std::to_string(e) + ", not summable";
      return out;
    }
  }

  // Convergence: a_n <= a_N exp(-c (F(n+2) - F(N+2))) with F' = x^-alpha;
  // bound the remaining series over doubling blocks (N_j, 2 N_j].
  auto antiderivative = [alpha](double x) {
    return alpha == 1.0 ? std::log(x) : std::pow(x, 1.0 - alpha) / (1.0 - alpha);
  };
  const double f0 = antiderivative(big_n + 2.0);
  // Terms are accumulated in log space; a_N itself is often far below DBL_MIN.
  double log_bound = -kInf;
  double block_start = big_n;
  for (int j = 0; j < 2000; ++j) {
    const double block_end = 2.0 * block_start;
    if (!std::isfinite(block_end)) {
      log_bound = kInf;
      break;
    }
    const double log_term =
        std::log(block_end - block_start) + log_a - c * (antiderivative(block_start + 2.0) - f0);
    const double hi = std::max(log_bound, log_term);
    log_bound = hi + std::log(std::exp(log_bound - hi) + std::exp(log_term - hi));
    if (j > 8 && log_term < log_bound - 40.0) break;
    block_start = block_end;
  }
  const double bound = std::exp(log_bound);
  out.log_certificate = log_bound;
  out.certificate_value = bound;
  if (bound < tol) {
    out.verdict = PercolationVerdict::PercolatesWithPositiveProb;
    std::ostringstream os;
    os << "sum_{n>N} a_n <= exp(" << log_bound << ")";
    out.certificate = os.str();
  }
  return out;
}

OvershootQuery OvershootQuery::with_depth(const RadiusLaw& law, Radius depth) {
  if (depth < 0) throw std::invalid_argument("truncation depth must be nonnegative");
  return OvershootQuery{law, depth, law.tail_sum_beyond(depth)};
}

OvershootQuery OvershootQuery::with_error(const RadiusLaw& law, double eps, Radius max_depth) {
  if (auto k = law.support_bound()) return with_depth(law, std::max<Radius>(*k, 0));
  Radius lo = 0;
  Radius hi = 1;
  while (hi < max_depth && !(law.tail_sum_beyond(hi) <= eps)) hi *= 2;
  hi = std::min(hi, max_depth);
  if (!(law.tail_sum_beyond(hi) <= eps)) return with_depth(law, hi);
  while (lo < hi) {
    const Radius mid = lo + (hi - lo) / 2;
    if (law.tail_sum_beyond(mid) <= eps)
      hi = mid;
    else
      lo = mid + 1;
  }
  return with_depth(law, hi);
}

OvershootCdf overshoot_cdf_exact(const OvershootQuery& query, Radius m) {
  if (m < 0) throw std::invalid_argument("overshoot_cdf_exact requires m >= 0");
  const RadiusLaw& law = query.law;
  const auto bound = law.support_bound();

  OvershootCdf out;
  if (bound) {
    // Factors with m + i >= K equal one.
    double v = 1.0;
    for (Radius j = m; j < *bound && v > 0.0; ++j) v *= law.cdf(j);
    out.value = v;
    out.status = OvershootStatus::Exact;
    return out;
  }

  const Radius depth = query.truncation_depth;
  double v = 1.0;
  for (Radius i = 0; i <= depth; ++i) {
    v *= law.cdf(m + i);
    if (v == 0.0) break;
  }
  if (v == 0.0) {
    out.value = 0.0;
    out.status = OvershootStatus::Exact;
    return out;
  }
  if (law.moment_order() <= 1.0) {
    out.value = v;
    out.error_bound = kInf;
    out.status = OvershootStatus::Inconclusive;
    return out;
  }
  // The omitted factors lie in [1 - sum tail, 1].
  out.value = v;
  out.error_bound = std::min(1.0, law.tail_sum_beyond(m + depth)) * v;
  out.status = OvershootStatus::Bounded;
  return out;
}

OvershootSampler::OvershootSampler(RadiusLaw law, DepthPolicy policy)
    : law_(std::move(law)), bound_(law_.support_bound()) {
  if (policy.kind == DepthPolicy::Kind::ExactBounded && !bound_)
    throw std::invalid_argument("ExactBounded overshoot sampling needs a bounded law");
  if (!bound_ && law_.moment_order() <= 1.0)
    throw std::invalid_argument("overshoot is not a.s. finite without E I^(1+eps) < inf");
  if (!bound_) {
    const OvershootQuery q = OvershootQuery::with_error(law_, policy.epsilon, kMaxRadius);
    budget_depth_ = q.truncation_depth;
    budget_exact_ = q.truncation_error_bound == 0.0;
  }
}

OvershootSample OvershootSampler::operator()(SplitMix64& rng) const {
  OvershootSample out{0, true};
  for (Radius i = 0;; ++i) {
    // Remaining candidates j >= i can only win if I_{-j} > best + j.
    if (bound_) {
      if (*bound_ - i <= out.value) return out;
    } else if (out.value + i - 1 >= budget_depth_) {
      out.certified = budget_exact_;
      return out;
    }
    out.value = std::max(out.value, law_.sample(rng) - i);
  }
}

OvershootSample overshoot_sample(const RadiusLaw& law, SplitMix64& rng, DepthPolicy policy) {
  return OvershootSampler(law, policy)(rng);
}

}  // namespace rumour
