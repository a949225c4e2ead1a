#pragma once

#include <cstdint>
#include <limits>

namespace batchq {

// xoshiro256** seeded through splitmix64. Streams for distinct seeds are
// decorrelated by the splitmix expansion, so replication r can simply use
// seed base + r. All variate generation below is done by hand on top of
// the raw 64-bit output so that streams are identical across standard
// library implementations.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  double exponential(double rate);
  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

// Poisson variates: sequential-search inversion for rate < 10 and Hoermann's
// transformed rejection (PTRS) otherwise. Constants are precomputed once so
// a sampler can be reused across many draws with the same rate.
class PoissonSampler {
public:
  explicit PoissonSampler(double rate);

  std::int64_t operator()(Rng& rng) const;
  double rate() const { return rate_; }

  static constexpr double kInversionLimit = 10.0;

private:
  std::int64_t inversion(Rng& rng) const;
  std::int64_t ptrs(Rng& rng) const;

  double rate_;
  double exp_neg_rate_ = 0.0;
  // PTRS constants.
  double log_rate_ = 0.0;
  double b_ = 0.0, a_ = 0.0, inv_alpha_ = 0.0, vr_ = 0.0;
};

} // namespace batchq
