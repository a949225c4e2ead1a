#include "batchq/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "batchq/csv.hpp"
#include "batchq/errors.hpp"
#include "batchq/random.hpp"
#include "batchq/special_fn.hpp"

namespace batchq::steady {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

void require_count(std::int64_t count) {
  if (count < 1) throw InvalidArgument("sample count must be >= 1");
}

// Accumulates (weight, rate) pairs, merging equal weights.
class TermCollector {
public:
  void add(std::int64_t weight, double rate) { rates_[weight] += rate; }
  std::vector<PoissonTerm> take() const {
    std::vector<PoissonTerm> out;
    out.reserve(rates_.size());
    for (const auto& [w, r] : rates_) out.push_back({w, r});
    return out;
  }

private:
  std::map<std::int64_t, double> rates_;
};

} // namespace

PoissonSumRep::PoissonSumRep(std::vector<PoissonTerm> terms, double tail_mass) : tail_mass_(tail_mass) {
  if (terms.empty()) throw InvalidArgument("PoissonSumRep needs at least one term");
  if (!(tail_mass >= 0.0 && tail_mass < 1.0)) throw InvalidArgument("tail mass must lie in [0, 1)");
  TermCollector merged;
  for (const auto& [w, r] : terms) {
    if (w < 1) throw InvalidArgument("Poisson-sum weights must be >= 1");
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("Poisson-sum rates must be finite and >= 0");
    merged.add(w, r);
  }
  terms_ = merged.take();
}

double PoissonSumRep::mean() const { return cumulant(1); }

double PoissonSumRep::variance() const { return cumulant(2); }

double PoissonSumRep::cumulant(int k) const {
  if (k < 1) throw InvalidArgument("cumulant order must be >= 1");
  double sum = 0.0;
  for (const auto& [w, r] : terms_) sum += std::pow(static_cast<double>(w), k) * r;
  return sum;
}

double PoissonSumRep::log_mgf(double theta) const {
  double sum = 0.0;
  for (const auto& [w, r] : terms_) sum += r * std::expm1(static_cast<double>(w) * theta);
  return sum;
}

double PoissonSumRep::mgf(double theta) const { return std::exp(log_mgf(theta)); }

PoissonSumRep rep_fixed_exponential(std::int64_t n, double lambda, double mu) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  std::vector<PoissonTerm> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 1; j <= n; ++j) terms.push_back({j, lambda / (static_cast<double>(j) * mu)});
  return PoissonSumRep(std::move(terms));
}

PoissonSumRep rep_fixed_general(std::int64_t n, double lambda, const ServiceDist& service) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  require_positive(lambda, "lambda");
  const auto gaps = service.order_stat_gap_means(n);
  std::vector<PoissonTerm> terms;
  terms.reserve(gaps.size());
  for (std::int64_t j = 1; j <= n; ++j) terms.push_back({n - j + 1, lambda * gaps[static_cast<std::size_t>(j - 1)]});
  return PoissonSumRep(std::move(terms));
}

PoissonSumRep rep_random_general(const BatchDist& batch, double lambda, const ServiceDist& service,
                                 double tail_eps) {
  require_positive(lambda, "lambda");
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw InvalidArgument("tail_eps must lie in (0, 1)");
  TermCollector terms;
  for (const auto& [m, p] : batch.pmf()) {
    if (m < 1 || p == 0.0) continue;
    const auto gaps = service.order_stat_gap_means(m);
    for (std::int64_t j = 1; j <= m; ++j) terms.add(m - j + 1, lambda * p * gaps[static_cast<std::size_t>(j - 1)]);
  }
  return PoissonSumRep(terms.take(), 0.0);
}

PoissonSumRep rep_random_markov(const BatchDist& batch, double lambda, double mu) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  std::vector<PoissonTerm> terms;
  for (std::int64_t j = 1; j <= batch.max_size(); ++j) {
    terms.push_back({j, lambda * batch.ccdf(j) / (static_cast<double>(j) * mu)});
  }
  return PoissonSumRep(std::move(terms));
}

std::vector<std::int64_t> rep_sample(const PoissonSumRep& rep, std::uint64_t seed, std::int64_t count) {
  require_count(count);
  std::vector<std::pair<std::int64_t, PoissonSampler>> samplers;
  for (const auto& [w, r] : rep.terms()) {
    if (r > 0.0) samplers.emplace_back(w, PoissonSampler(r));
  }
  Rng rng(seed);
  std::vector<std::int64_t> out(static_cast<std::size_t>(count));
  for (auto& x : out) {
    std::int64_t total = 0;
    for (const auto& [w, sampler] : samplers) total += w * sampler(rng);
    x = total;
  }
  return out;
}

std::vector<double> scaled_limit_sample(std::int64_t n, double lambda, double mu, std::uint64_t seed,
                                        std::int64_t count) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_count(count);
  // cumulative[j-1] = H_j
  std::vector<double> cumulative(static_cast<std::size_t>(n));
  double h = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    h += 1.0 / static_cast<double>(j);
    cumulative[static_cast<std::size_t>(j - 1)] = h;
  }
  const PoissonSampler points(lambda / mu * h);
  const auto nd = static_cast<double>(n);
  Rng rng(seed);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& x : out) {
    const std::int64_t m = points(rng);
    std::int64_t weight = 0;
    for (std::int64_t i = 0; i < m; ++i) {
      const double u = rng.uniform() * h;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const auto idx = std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(n) - 1);
      weight += idx + 1;
    }
    x = static_cast<double>(weight) / nd;
  }
  return out;
}

void write_csv(const PoissonSumRep& rep, std::ostream& out) {
  csv::Writer writer(out, {"weight", "rate"});
  for (const auto& [w, r] : rep.terms()) writer.row({w, r});
}

} // namespace batchq::steady
