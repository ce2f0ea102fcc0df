#include "rumour/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace rumour {

double EstimateReport::standard_error() const {
  const double z = z_for_level(level);
  return z > 0.0 ? halfwidth() / z : 0.0;
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<>{}, x); }

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<>{}, p);
}

double student_t_quantile(double df, double p) {
  return boost::math::quantile(boost::math::students_t_distribution<>{df}, p);
}

double z_for_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  return normal_quantile(0.5 + 0.5 * level);
}

ProbInterval wilson_interval(std::int64_t successes, std::int64_t trials, double level) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z = z_for_level(level);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  ProbInterval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // Keep the point estimate inside the interval despite rounding.
  ci.lo = std::min(ci.lo, p);
  ci.hi = std::max(ci.hi, p);
  return ci;
}

MeanVar mean_variance(std::span<const double> x) {
  MeanVar mv;
  mv.n = static_cast<std::int64_t>(x.size());
  if (x.empty()) return mv;
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t k = 0;
  for (double v : x) {
    ++k;
    const double d = v - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (v - mean);
  }
  mv.mean = mean;
  mv.variance = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
  return mv;
}

double autocorrelation(std::span<const double> x, std::size_t lag) {
  const std::size_t n = x.size();
  if (n <= lag + 1) return 0.0;
  const double mean = mean_variance(x).mean;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    den += d * d;
    if (i + lag < n) num += d * (x[i + lag] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two-sample KS needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

double ks_distance(std::span<const double> x, const std::function<double(double)>& cdf) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    const double v = s[i];
    const double before = static_cast<double>(i) / n;
    while (i < s.size() && s[i] == v) ++i;
    const double after = static_cast<double>(i) / n;
    const double f = cdf(v);
    d = std::max({d, std::abs(f - before), std::abs(after - f)});
  }
  return d;
}

double ks_critical_value(std::int64_t n, double alpha) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c / (sn + 0.12 + 0.11 / sn);
}

double dkw_epsilon(std::int64_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size())
    throw std::invalid_argument("weighted_linear_fit: size mismatch");
  LinearFit fit;
  fit.points = x.size();
  if (x.size() < 2) return fit;
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace rumour
