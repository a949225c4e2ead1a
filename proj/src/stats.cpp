#include "batchq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "batchq/errors.hpp"

namespace batchq::stats {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}
} // namespace

MeanEstimate mean_estimate(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("mean_estimate: empty sample");
  MeanEstimate out;
  out.count = static_cast<std::int64_t>(xs.size());
  out.mean = mean_of(xs);
  if (xs.size() < 2) {
    out.variance = kNaN;
    out.se = kNaN;
    return out;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.variance = ss / static_cast<double>(xs.size() - 1);
  out.se = std::sqrt(out.variance / static_cast<double>(xs.size()));
  return out;
}

MeanEstimate jackknife_mean(std::span<const double> xs) {
  MeanEstimate out = mean_estimate(xs);
  if (xs.size() < 2) return out;
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  double ss = 0.0;
  for (double x : xs) {
    const double loo = (sum - x) / (n - 1.0);
    ss += (loo - out.mean) * (loo - out.mean);
  }
  out.se = std::sqrt((n - 1.0) / n * ss);
  return out;
}

VarianceEstimate variance_estimate(std::span<const double> xs) {
  if (xs.size() < 2) return {kNaN, kNaN};
  const auto n = static_cast<double>(xs.size());
  const double m = mean_of(xs);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d2 = (x - m) * (x - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double s2 = m2 / (n - 1.0);
  m4 /= n;
  return {s2, std::sqrt(std::max(0.0, m4 - s2 * s2) / n)};
}

double sample_skewness(std::span<const double> xs) {
  if (xs.size() < 3) return kNaN;
  const double m = mean_of(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const auto n = static_cast<double>(xs.size());
  m2 /= n;
  m3 /= n;
  return m3 / std::pow(m2, 1.5);
}

CorrelationEstimate correlation_estimate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("correlation_estimate: size mismatch");
  if (xs.size() < 3) return {kNaN, kNaN, kNaN};
  const auto n = static_cast<double>(xs.size());
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sx += dx;
    sy += dy;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  auto corr_from = [](double m, double ax, double ay, double axx, double ayy, double axy) {
    const double cxy = axy - ax * ay / m;
    const double cxx = axx - ax * ax / m;
    const double cyy = ayy - ay * ay / m;
    return cxy / std::sqrt(cxx * cyy);
  };
  CorrelationEstimate out;
  out.covariance = (sxy - sx * sy / n) / (n - 1.0);
  out.correlation = corr_from(n, sx, sy, sxx, syy, sxy);

  std::vector<double> loo(xs.size());
  double loo_sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    loo[i] = corr_from(n - 1.0, sx - dx, sy - dy, sxx - dx * dx, syy - dy * dy, sxy - dx * dy);
    loo_sum += loo[i];
  }
  const double loo_mean = loo_sum / n;
  double ss = 0.0;
  for (double r : loo) ss += (r - loo_mean) * (r - loo_mean);
  out.correlation_se = std::sqrt((n - 1.0) / n * ss);
  return out;
}

std::vector<double> empirical_pmf(std::span<const std::int64_t> xs) {
  if (xs.empty()) return {};
  const auto top = *std::max_element(xs.begin(), xs.end());
  if (*std::min_element(xs.begin(), xs.end()) < 0) throw InvalidArgument("empirical_pmf: negative sample");
  std::vector<double> out(static_cast<std::size_t>(top) + 1, 0.0);
  for (auto x : xs) out[static_cast<std::size_t>(x)] += 1.0;
  const auto n = static_cast<double>(xs.size());
  for (double& p : out) p /= n;
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  const std::size_t len = std::max(p.size(), q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    sum += std::abs(a - b);
  }
  return 0.5 * sum;
}

std::vector<double> to_double(std::span<const std::int64_t> xs) {
  return std::vector<double>(xs.begin(), xs.end());
}

} // namespace batchq::stats
