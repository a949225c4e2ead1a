#include "batchq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <fmt/format.h>

#include "batchq/errors.hpp"

namespace batchq {

namespace {

constexpr double kPmfSumTol = 1e-12;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_pmf(const std::vector<SizeProb>& pmf, std::int64_t min_size, const char* what) {
  if (pmf.empty()) throw InvalidArgument(fmt::format("{}: pmf must be nonempty", what));
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const auto& [size, prob] = pmf[i];
    if (size < min_size) {
      throw InvalidArgument(fmt::format("{}: sizes must be >= {}, got {}", what, min_size, size));
    }
    if (i > 0 && size <= pmf[i - 1].size) {
      throw InvalidArgument(fmt::format("{}: sizes must be strictly increasing", what));
    }
    if (!(prob >= 0.0) || !std::isfinite(prob)) {
      throw InvalidArgument(fmt::format("{}: probabilities must be finite and >= 0", what));
    }
    total += prob;
  }
  if (std::abs(total - 1.0) > kPmfSumTol) {
    throw InvalidArgument(fmt::format("{}: probabilities sum to {:.17g}, not 1", what, total));
  }
}

std::vector<SizeProb> convolve_power(const std::vector<SizeProb>& base, std::int64_t n) {
  const auto top = static_cast<std::size_t>(base.back().size);
  std::vector<double> unit(top + 1, 0.0);
  for (const auto& [size, prob] : base) unit[static_cast<std::size_t>(size)] = prob;

  std::vector<double> acc{1.0};
  for (std::int64_t r = 0; r < n; ++r) {
    std::vector<double> next(acc.size() + top, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i] == 0.0) continue;
      for (std::size_t j = 0; j <= top; ++j) next[i + j] += acc[i] * unit[j];
    }
    acc = std::move(next);
  }
  std::vector<SizeProb> out;
  for (std::size_t s = 0; s < acc.size(); ++s) {
    if (acc[s] > 0.0) out.push_back({static_cast<std::int64_t>(s), acc[s]});
  }
  return out;
}

} // namespace

// ---------------------------------------------------------------- RatePattern

RatePattern::RatePattern(double base, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : base_(base), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  if (!finite_positive(base_)) throw InvalidArgument("RatePattern: base must be finite and > 0");
  if (cos_.size() != sin_.size()) {
    throw InvalidArgument("RatePattern: cos and sin coefficient lists must have equal length");
  }
  double l1 = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    if (!std::isfinite(cos_[k]) || !std::isfinite(sin_[k])) {
      throw InvalidArgument("RatePattern: coefficients must be finite");
    }
    l1 += std::abs(cos_[k]) + std::abs(sin_[k]);
  }
  if (!(base_ - l1 > 0.0)) {
    throw InvalidArgument(
        fmt::format("RatePattern: base {} must exceed sum |a_k|+|b_k| = {}", base_, l1));
  }
}

bool RatePattern::stationary() const {
  return std::all_of(cos_.begin(), cos_.end(), [](double a) { return a == 0.0; }) &&
         std::all_of(sin_.begin(), sin_.end(), [](double b) { return b == 0.0; });
}

double RatePattern::at(double t) const {
  double out = base_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double kt = static_cast<double>(k + 1) * t;
    out += cos_[k] * std::cos(kt) + sin_[k] * std::sin(kt);
  }
  return out;
}

double RatePattern::bound() const {
  double out = base_;
  for (std::size_t k = 0; k < cos_.size(); ++k) out += std::abs(cos_[k]) + std::abs(sin_[k]);
  return out;
}

// ------------------------------------------------------------------ BatchDist

BatchDist::BatchDist(Variant law) : law_(std::move(law)) {
  if (const auto* f = std::get_if<Fixed>(&law_)) {
    pmf_ = {{f->n, 1.0}};
  } else if (const auto* e = std::get_if<Empirical>(&law_)) {
    pmf_ = e->pmf;
  } else {
    const auto& d = std::get<DivisibleSum>(law_);
    pmf_ = convolve_power(d.base, d.n);
  }
  cdf_.reserve(pmf_.size());
  double run = 0.0;
  for (const auto& sp : pmf_) cdf_.push_back(run += sp.prob);
}

BatchDist BatchDist::fixed(std::int64_t n) {
  if (n < 1) throw InvalidArgument("BatchDist::fixed: n must be >= 1");
  return BatchDist(Fixed{n});
}

BatchDist BatchDist::empirical(std::vector<SizeProb> pmf) {
  check_pmf(pmf, 1, "BatchDist::empirical");
  return BatchDist(Empirical{std::move(pmf)});
}

BatchDist BatchDist::divisible_sum(std::vector<SizeProb> base, std::int64_t n) {
  check_pmf(base, 0, "BatchDist::divisible_sum");
  if (n < 1) throw InvalidArgument("BatchDist::divisible_sum: n must be >= 1");
  double mean = 0.0;
  for (const auto& [size, prob] : base) mean += static_cast<double>(size) * prob;
  if (!(mean > 0.0)) throw InvalidArgument("BatchDist::divisible_sum: base law must have E[B] > 0");
  return BatchDist(DivisibleSum{std::move(base), n});
}

std::int64_t BatchDist::fixed_size() const {
  if (const auto* f = std::get_if<Fixed>(&law_)) return f->n;
  throw DomainError("operation requires a fixed batch size");
}

BatchMoments BatchDist::moments() const {
  if (const auto* d = std::get_if<DivisibleSum>(&law_)) {
    double m1 = 0.0, m2 = 0.0;
    for (const auto& [size, prob] : d->base) {
      const auto s = static_cast<double>(size);
      m1 += s * prob;
      m2 += s * s * prob;
    }
    const auto n = static_cast<double>(d->n);
    const double mean = n * m1;
    return {mean, n * (m2 - m1 * m1) + mean * mean};
  }
  double m1 = 0.0, m2 = 0.0;
  for (const auto& [size, prob] : pmf_) {
    const auto s = static_cast<double>(size);
    m1 += s * prob;
    m2 += s * s * prob;
  }
  return {m1, m2};
}

double BatchDist::ccdf(std::int64_t j) const {
  double out = 0.0;
  for (auto it = pmf_.rbegin(); it != pmf_.rend() && it->size >= j; ++it) out += it->prob;
  return out;
}

double BatchDist::base_mean() const {
  if (const auto* d = std::get_if<DivisibleSum>(&law_)) {
    double m1 = 0.0;
    for (const auto& [size, prob] : d->base) m1 += static_cast<double>(size) * prob;
    return m1;
  }
  return moments().mean;
}

std::int64_t BatchDist::sample(Rng& rng) const {
  if (const auto* f = std::get_if<Fixed>(&law_)) return f->n;
  const double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return pmf_[static_cast<std::size_t>(it - cdf_.begin())].size;
}

// ---------------------------------------------------------------- ServiceDist

ServiceDist ServiceDist::exponential(double mu) {
  if (!finite_positive(mu)) throw InvalidArgument("ServiceDist::exponential: mu must be > 0");
  return ServiceDist(Exponential{mu});
}

ServiceDist ServiceDist::deterministic(double d) {
  if (!finite_positive(d)) throw InvalidArgument("ServiceDist::deterministic: d must be > 0");
  return ServiceDist(Deterministic{d});
}

ServiceDist ServiceDist::uniform(double b) {
  if (!finite_positive(b)) throw InvalidArgument("ServiceDist::uniform: b must be > 0");
  return ServiceDist(Uniform{b});
}

ServiceDist ServiceDist::empirical(std::vector<double> samples) {
  if (samples.empty()) throw InvalidArgument("ServiceDist::empirical: samples must be nonempty");
  for (double s : samples) {
    if (!finite_positive(s)) throw InvalidArgument("ServiceDist::empirical: samples must be > 0");
  }
  return ServiceDist(Empirical{std::move(samples)});
}

double ServiceDist::exponential_rate() const {
  if (const auto* e = std::get_if<Exponential>(&law_)) return e->mu;
  throw DomainError("operation requires exponential service");
}

double ServiceDist::mean() const {
  struct Visitor {
    double operator()(const Exponential& e) const { return 1.0 / e.mu; }
    double operator()(const Deterministic& d) const { return d.d; }
    double operator()(const Uniform& u) const { return u.b / 2.0; }
    double operator()(const Empirical& e) const {
      return std::accumulate(e.samples.begin(), e.samples.end(), 0.0) /
             static_cast<double>(e.samples.size());
    }
  };
  return std::visit(Visitor{}, law_);
}

double ServiceDist::upper_bound() const {
  struct Visitor {
    double operator()(const Exponential&) const { return std::numeric_limits<double>::infinity(); }
    double operator()(const Deterministic& d) const { return d.d; }
    double operator()(const Uniform& u) const { return u.b; }
    double operator()(const Empirical& e) const {
      return *std::max_element(e.samples.begin(), e.samples.end());
    }
  };
  return std::visit(Visitor{}, law_);
}

std::vector<double> ServiceDist::order_stat_gap_means(std::int64_t n) const {
  if (n < 1) throw InvalidArgument("order_stat_gap_means: n must be >= 1");
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> gaps(count, 0.0);
  if (const auto* e = std::get_if<Exponential>(&law_)) {
    // S_(j) - S_(j-1) ~ Exp((n-j+1) mu)
    for (std::size_t j = 1; j <= count; ++j) {
      gaps[j - 1] = 1.0 / (static_cast<double>(count - j + 1) * e->mu);
    }
  } else if (const auto* d = std::get_if<Deterministic>(&law_)) {
    gaps[0] = d->d;
  } else if (const auto* u = std::get_if<Uniform>(&law_)) {
    std::fill(gaps.begin(), gaps.end(), u->b / static_cast<double>(n + 1));
  } else {
    // Resampling from the empirical law: with distinct values v_1 < ... < v_m
    // and empirical cdf F, E[S_(j) - S_(j-1)] = sum_i (v_{i+1} - v_i) P{Bin(n, F(v_i)) = j-1}
    // (v_0 = 0, F(v_0) = 0).
    auto sorted = std::get<Empirical>(law_).samples;
    std::sort(sorted.begin(), sorted.end());
    const auto total = static_cast<double>(sorted.size());
    double prev_value = 0.0;
    double prev_cdf = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
      const double v = sorted[i];
      const double width = v - prev_value;
      if (prev_cdf == 0.0) {
        gaps[0] += width;
      } else {
        boost::math::binomial_distribution<double> bin(static_cast<double>(n), prev_cdf);
        for (std::size_t j = 1; j <= count; ++j) {
          gaps[j - 1] += width * boost::math::pdf(bin, static_cast<double>(j - 1));
        }
      }
      while (i < sorted.size() && sorted[i] == v) ++i;
      prev_value = v;
      prev_cdf = static_cast<double>(i) / total;
    }
  }
  return gaps;
}

std::vector<double> ServiceDist::order_stat_means(std::int64_t n) const {
  auto out = order_stat_gap_means(n);
  std::partial_sum(out.begin(), out.end(), out.begin());
  return out;
}

double ServiceDist::sample(Rng& rng) const {
  if (const auto* e = std::get_if<Exponential>(&law_)) return rng.exponential(e->mu);
  if (const auto* d = std::get_if<Deterministic>(&law_)) return d->d;
  if (const auto* u = std::get_if<Uniform>(&law_)) return rng.uniform() * u->b;
  const auto& s = std::get<Empirical>(law_).samples;
  return s[rng.below(s.size())];
}

// ---------------------------------------------------------------------------

void validate(const QueueSpec& spec) {
  if (spec.q0 < 0) throw InvalidArgument("QueueSpec: q0 must be >= 0");
}

std::string describe(const BatchDist& batch) {
  if (const auto* f = std::get_if<BatchDist::Fixed>(&batch.law())) return fmt::format("Fixed({})", f->n);
  std::string body;
  for (const auto& [size, prob] : batch.pmf()) {
    body += fmt::format("{}{}:{}", body.empty() ? "" : ",", size, prob);
  }
  return std::holds_alternative<BatchDist::Empirical>(batch.law()) ? "Empirical{" + body + "}"
                                                                    : "DivisibleSum{" + body + "}";
}

std::string describe(const ServiceDist& service) {
  struct Visitor {
    std::string operator()(const ServiceDist::Exponential& e) const { return fmt::format("Exponential({})", e.mu); }
    std::string operator()(const ServiceDist::Deterministic& d) const { return fmt::format("Deterministic({})", d.d); }
    std::string operator()(const ServiceDist::Uniform& u) const { return fmt::format("Uniform(0,{})", u.b); }
    std::string operator()(const ServiceDist::Empirical& e) const {
      return fmt::format("Empirical[{} samples]", e.samples.size());
    }
  };
  return std::visit(Visitor{}, service.law());
}

} // namespace batchq
