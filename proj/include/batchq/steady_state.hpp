#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "batchq/model.hpp"

namespace batchq::steady {

struct PoissonTerm {
  std::int64_t weight;
  double rate;
  bool operator==(const PoissonTerm&) const = default;
};

// Distribution of sum_i weight_i * Y_i with independent Y_i ~ Pois(rate_i).
// Terms sharing a weight are merged by adding rates; terms are kept sorted
// by weight.
class PoissonSumRep {
public:
  explicit PoissonSumRep(std::vector<PoissonTerm> terms, double tail_mass = 0.0);

  std::span<const PoissonTerm> terms() const { return terms_; }
  // Probability mass of batch sizes dropped during construction.
  double tail_mass() const { return tail_mass_; }

  double mean() const;
  double variance() const;
  // k-th cumulant: sum w^k r.
  double cumulant(int k) const;
  double log_mgf(double theta) const;
  double mgf(double theta) const;

private:
  std::vector<PoissonTerm> terms_;
  double tail_mass_;
};

// {(j, lambda / (j mu)) : j = 1..n}
PoissonSumRep rep_fixed_exponential(std::int64_t n, double lambda, double mu);
// {(n - j + 1, lambda * gap_j)} with gap_j = E[S_(j) - S_(j-1)] of an n-sample.
PoissonSumRep rep_fixed_general(std::int64_t n, double lambda, const ServiceDist& service);
// Thinned by batch size: rates lambda p_m gap_{j,m}, merged over m. tail_eps
// must lie in (0, 1); every supported batch law has finite support, so no
// mass is ever dropped and tail_mass() is 0.
PoissonSumRep rep_random_general(const BatchDist& batch, double lambda, const ServiceDist& service,
                                 double tail_eps = 1e-12);
// {(j, lambda P{N >= j} / (j mu)) : j = 1..max support}
PoissonSumRep rep_random_markov(const BatchDist& batch, double lambda, double mu);

// i.i.d. draws of the represented law from a single stream seeded by `seed`.
std::vector<std::int64_t> rep_sample(const PoissonSumRep& rep, std::uint64_t seed, std::int64_t count);

// i.i.d. draws of sum_{j=1}^n (j/n) Pois(lambda/(j mu)). Sampled as a single
// Pois(lambda H_n / mu) number of points, each landing on index j with
// probability (1/j) / H_n, which is the same law by Poisson splitting.
std::vector<double> scaled_limit_sample(std::int64_t n, double lambda, double mu, std::uint64_t seed,
                                        std::int64_t count);

// CSV with header `weight,rate`.
void write_csv(const PoissonSumRep& rep, std::ostream& out);

} // namespace batchq::steady
