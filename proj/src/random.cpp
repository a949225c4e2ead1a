#include "batchq/random.hpp"

#include <cmath>

#include "batchq/errors.hpp"

namespace batchq {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
} // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

Rng::result_type Rng::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log(uniform_pos()) / rate; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's nearly-divisionless bounded integer.
  __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<__uint128_t>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

PoissonSampler::PoissonSampler(double rate) : rate_(rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw InvalidArgument("PoissonSampler: rate must be finite and >= 0");
  }
  if (rate_ < kInversionLimit) {
    exp_neg_rate_ = std::exp(-rate_);
  } else {
    log_rate_ = std::log(rate_);
    const double root = std::sqrt(rate_);
    b_ = 0.931 + 2.53 * root;
    a_ = -0.059 + 0.02483 * b_;
    inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
    vr_ = 0.9277 - 3.6224 / (b_ - 2.0);
  }
}

std::int64_t PoissonSampler::operator()(Rng& rng) const {
  if (rate_ == 0.0) return 0;
  return rate_ < kInversionLimit ? inversion(rng) : ptrs(rng);
}

std::int64_t PoissonSampler::inversion(Rng& rng) const {
  const double u = rng.uniform();
  double p = exp_neg_rate_;
  double cdf = p;
  std::int64_t k = 0;
  // The cap only matters when u lands in the last ulp below 1.
  while (u >= cdf && k < 1000) {
    ++k;
    p *= rate_ / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

std::int64_t PoissonSampler::ptrs(Rng& rng) const {
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a_ / us + b_) * u + rate_ + 0.43));
    if (us >= 0.07 && v <= vr_) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v) + std::log(inv_alpha_) - std::log(a_ / (us * us) + b_);
    const double rhs = -rate_ + static_cast<double>(k) * log_rate_ - std::lgamma(static_cast<double>(k) + 1.0);
    if (lhs <= rhs) return k;
  }
}

} // namespace batchq
