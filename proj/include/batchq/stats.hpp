#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace batchq::stats {

struct MeanEstimate {
  double mean = 0.0;
  double variance = 0.0; // unbiased sample variance; NaN when count < 2
  double se = 0.0;       // sqrt(variance / count); NaN when count < 2
  std::int64_t count = 0;
};

MeanEstimate mean_estimate(std::span<const double> xs);

// Sample mean with the delete-one jackknife standard error.
MeanEstimate jackknife_mean(std::span<const double> xs);

struct VarianceEstimate {
  double variance = 0.0;
  double se = 0.0; // sqrt((m4 - s^4) / n), large-sample
};
VarianceEstimate variance_estimate(std::span<const double> xs);

// g1 = m3 / m2^{3/2} with biased central moments.
double sample_skewness(std::span<const double> xs);

struct CorrelationEstimate {
  double covariance = 0.0; // unbiased
  double correlation = 0.0;
  double correlation_se = 0.0; // delete-one jackknife
};
CorrelationEstimate correlation_estimate(std::span<const double> xs, std::span<const double> ys);

// Normalised histogram of nonnegative integer samples: out[v] = #{x == v} / n.
std::vector<double> empirical_pmf(std::span<const std::int64_t> xs);

// (1/2) sum |p_i - q_i|, shorter vector padded with zeros.
double total_variation(std::span<const double> p, std::span<const double> q);

std::vector<double> to_double(std::span<const std::int64_t> xs);

} // namespace batchq::stats
