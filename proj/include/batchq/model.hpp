#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "batchq/random.hpp"

namespace batchq {

// lambda(t) = base + sum_{k=1}^K a_k cos(k t) + b_k sin(k t).
// Positivity is enforced through the l1 envelope base - sum(|a_k|+|b_k|) > 0.
class RatePattern {
public:
  explicit RatePattern(double base, std::vector<double> cos_coeffs = {},
                       std::vector<double> sin_coeffs = {});

  double base() const { return base_; }
  std::span<const double> cos_coeffs() const { return cos_; }
  std::span<const double> sin_coeffs() const { return sin_; }
  std::size_t harmonics() const { return cos_.size(); }
  bool stationary() const;

  // rate_at
  double at(double t) const;
  // rate_bound: base + sum(|a_k| + |b_k|), dominates at(t) for every t.
  double bound() const;

  bool operator==(const RatePattern&) const = default;

private:
  double base_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

struct SizeProb {
  std::int64_t size;
  double prob;
  bool operator==(const SizeProb&) const = default;
};

struct BatchMoments {
  double mean;
  double second_moment;
};

// Batch-size law. Fixed(n), a finite empirical pmf on sizes >= 1, or the
// n-fold independent sum of a base law on sizes >= 0.
class BatchDist {
public:
  struct Fixed {
    std::int64_t n;
    bool operator==(const Fixed&) const = default;
  };
  struct Empirical {
    std::vector<SizeProb> pmf;
    bool operator==(const Empirical&) const = default;
  };
  struct DivisibleSum {
    std::vector<SizeProb> base;
    std::int64_t n;
    bool operator==(const DivisibleSum&) const = default;
  };
  using Variant = std::variant<Fixed, Empirical, DivisibleSum>;

  static BatchDist fixed(std::int64_t n);
  static BatchDist empirical(std::vector<SizeProb> pmf);
  static BatchDist divisible_sum(std::vector<SizeProb> base, std::int64_t n);

  const Variant& law() const { return law_; }
  bool is_fixed() const { return std::holds_alternative<Fixed>(law_); }
  // Batch size n of a Fixed law; throws DomainError otherwise.
  std::int64_t fixed_size() const;

  BatchMoments moments() const;
  // P{N >= j}
  double ccdf(std::int64_t j) const;
  // Full pmf over the support, sizes increasing (DivisibleSum: exact
  // convolution of the base law, zero-probability sizes dropped).
  std::span<const SizeProb> pmf() const { return pmf_; }
  std::int64_t max_size() const { return pmf_.back().size; }
  // Mean of the base law B of a DivisibleSum; the batch mean otherwise.
  double base_mean() const;

  std::int64_t sample(Rng& rng) const;

  bool operator==(const BatchDist& other) const { return law_ == other.law_; }

private:
  explicit BatchDist(Variant law);

  Variant law_;
  std::vector<SizeProb> pmf_;
  std::vector<double> cdf_;
};

// Service-time law.
class ServiceDist {
public:
  struct Exponential {
    double mu;
    bool operator==(const Exponential&) const = default;
  };
  struct Deterministic {
    double d;
    bool operator==(const Deterministic&) const = default;
  };
  struct Uniform {
    double b; // Uniform(0, b)
    bool operator==(const Uniform&) const = default;
  };
  struct Empirical {
    std::vector<double> samples;
    bool operator==(const Empirical&) const = default;
  };
  using Variant = std::variant<Exponential, Deterministic, Uniform, Empirical>;

  static ServiceDist exponential(double mu);
  static ServiceDist deterministic(double d);
  static ServiceDist uniform(double b);
  static ServiceDist empirical(std::vector<double> samples);

  const Variant& law() const { return law_; }
  bool is_exponential() const { return std::holds_alternative<Exponential>(law_); }
  // Service rate of an Exponential law; throws DomainError otherwise.
  double exponential_rate() const;

  double mean() const;
  // Smallest T with P{S <= T} = 1; +inf for exponential service.
  double upper_bound() const;

  // (E[S_(1)], E[S_(2) - S_(1)], ..., E[S_(n) - S_(n-1)]) for an i.i.d.
  // n-sample.
  std::vector<double> order_stat_gap_means(std::int64_t n) const;
  // (E[S_(1,n)], ..., E[S_(n,n)]), the prefix sums of the gaps.
  std::vector<double> order_stat_means(std::int64_t n) const;

  double sample(Rng& rng) const;

  bool operator==(const ServiceDist& other) const { return law_ == other.law_; }

private:
  explicit ServiceDist(Variant law) : law_(std::move(law)) {}
  Variant law_;
};

struct QueueSpec {
  RatePattern rate;
  BatchDist batch;
  ServiceDist service;
  std::int64_t q0 = 0;

  bool operator==(const QueueSpec&) const = default;
};

// Throws InvalidArgument when q0 < 0. Component invariants are enforced by
// their constructors.
void validate(const QueueSpec& spec);

std::string describe(const BatchDist& batch);
std::string describe(const ServiceDist& service);

} // namespace batchq
