#include "batchq/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "batchq/errors.hpp"
#include "batchq/special_fn.hpp"

namespace batchq::analytic {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be finite and >= 0");
}

void require_stationary(const RatePattern& rate, const char* op) {
  if (!rate.stationary()) {
    throw DomainError(std::string(op) + ": steady state requires a stationary arrival rate");
  }
}

double exponential_mu(const QueueSpec& spec) {
  if (!spec.service.is_exponential()) throw DomainError("closed form requires exponential service");
  return spec.service.exponential_rate();
}

} // namespace

double rate_decay_integral(const RatePattern& rate, double c, double t) {
  require_positive(c, "decay rate");
  require_time(t);
  const double decay = std::exp(-c * t);
  double out = rate.base() / c * (-std::expm1(-c * t));
  const auto a = rate.cos_coeffs();
  const auto b = rate.sin_coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double denom = k * k + c * c;
    out += ((a[i] * c - b[i] * k) * (std::cos(k * t) - decay) + (a[i] * k + b[i] * c) * std::sin(k * t)) / denom;
  }
  return out;
}

double rate_decay_integral(const RatePattern& rate, double c, SteadyStateTag) {
  require_positive(c, "decay rate");
  require_stationary(rate, "rate_decay_integral");
  return rate.base() / c;
}

double rate_decay_integral_quadrature(const std::function<double(double)>& rate, double c, double t) {
  require_positive(c, "decay rate");
  require_time(t);
  if (t == 0.0) return 0.0;
  // Contributions from s < t - 60/c are below e^{-60} relative and skipped.
  const double lo = std::max(0.0, t - 60.0 / c);
  auto integrand = [&](double s) { return rate(s) * std::exp(c * (s - t)); };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, t, 30, 1e-13, &err);
  if (err > kQuadratureAbsTol) throw NumericalError("rate_decay_integral_quadrature: tolerance not met");
  return value;
}

double transient_log_mgf_fixed(const QueueSpec& spec, double theta, double t) {
  const double mu = exponential_mu(spec);
  const std::int64_t n = spec.batch.fixed_size();
  require_time(t);
  if (theta == 0.0) return 0.0;
  const double x = std::expm1(theta);
  double out = 0.0;
  if (spec.q0 > 0) out += static_cast<double>(spec.q0) * std::log1p(std::exp(-mu * t) * x);
  double coeff = 1.0; // C(n, j) x^j
  for (std::int64_t j = 1; j <= n; ++j) {
    coeff *= x * static_cast<double>(n - j + 1) / static_cast<double>(j);
    out += coeff * rate_decay_integral(spec.rate, static_cast<double>(j) * mu, t);
  }
  return out;
}

double transient_mgf_fixed(const QueueSpec& spec, double theta, double t) {
  return std::exp(transient_log_mgf_fixed(spec, theta, t));
}

double transient_mgf_fixed(const QueueSpec& spec, double theta, SteadyStateTag) {
  const double mu = exponential_mu(spec);
  require_stationary(spec.rate, "transient_mgf_fixed");
  return std::exp(steady_log_mgf_binomial(spec.batch.fixed_size(), spec.rate.base(), mu, theta));
}

MomentPair mean_var_fixed(const QueueSpec& spec, double t) {
  const double mu = exponential_mu(spec);
  const auto n = static_cast<double>(spec.batch.fixed_size());
  require_time(t);
  const double q0 = static_cast<double>(spec.q0);
  const double lambda = spec.rate.base();
  const double e1 = std::exp(-mu * t);
  const double e2 = std::exp(-2.0 * mu * t);

  double mean = q0 * e1 + n * lambda / mu * (-std::expm1(-mu * t));
  double var = q0 * (e1 - e2) + n * lambda / mu * (-std::expm1(-mu * t)) +
               n * (n - 1.0) * lambda / (2.0 * mu) * (-std::expm1(-2.0 * mu * t));
  const auto a = spec.rate.cos_coeffs();
  const auto b = spec.rate.sin_coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double c = std::cos(k * t), s = std::sin(k * t);
    const double d1 = k * k + mu * mu;
    const double d2 = k * k + 4.0 * mu * mu;
    const double first = n * (a[i] * mu - b[i] * k) / d1 * (c - e1) + n * (a[i] * k + b[i] * mu) / d1 * s;
    mean += first;
    var += first + n * (n - 1.0) * (2.0 * a[i] * mu - b[i] * k) / d2 * (c - e2) +
           n * (n - 1.0) * (a[i] * k + 2.0 * b[i] * mu) / d2 * s;
  }
  return {mean, var};
}

MomentPair mean_var_fixed(const QueueSpec& spec, SteadyStateTag) {
  const double mu = exponential_mu(spec);
  require_stationary(spec.rate, "mean_var_fixed");
  const auto n = static_cast<double>(spec.batch.fixed_size());
  const double lambda = spec.rate.base();
  return {n * lambda / mu, n * (n + 1.0) * lambda / (2.0 * mu)};
}

double steady_log_mgf_binomial(std::int64_t n, double lambda, double mu, double theta) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  const double x = std::expm1(theta);
  double coeff = 1.0;
  double sum = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    coeff *= x * static_cast<double>(n - k + 1) / static_cast<double>(k);
    sum += coeff / static_cast<double>(k);
  }
  return lambda / mu * sum;
}

double steady_log_mgf_poisson(std::int64_t n, double lambda, double mu, double theta) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  double sum = 0.0;
  for (std::int64_t k = 1; k <= n; ++k) {
    const auto kd = static_cast<double>(k);
    sum += std::expm1(kd * theta) / kd;
  }
  return lambda / mu * sum;
}

double steady_log_mgf_polylog(std::int64_t n, double lambda, double mu, double theta) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  return lambda / mu * (special::trunc_polylog(std::exp(theta), n, 1.0) - special::harmonic(n));
}

PmfResult steady_pmf_fixed_markov(std::int64_t n, double lambda, double mu, std::int64_t j_max) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (j_max < 0) throw InvalidArgument("j_max must be >= 0");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  const double ratio = lambda / mu;
  std::vector<double> raw(static_cast<std::size_t>(j_max) + 1, 0.0);
  raw[0] = std::exp(-ratio * special::harmonic(n));
  // Running window sum_{i=1}^{min(n,j)} p_{j-i}.
  double window = 0.0;
  for (std::int64_t j = 1; j <= j_max; ++j) {
    window += raw[static_cast<std::size_t>(j - 1)];
    if (j - 1 - n >= 0) window -= raw[static_cast<std::size_t>(j - 1 - n)];
    raw[static_cast<std::size_t>(j)] = ratio / static_cast<double>(j) * window;
  }
  PmfResult out{std::move(raw), false};
  for (double& p : out.probs) {
    if (p < kPmfUnderflow) {
      out.underflow = true;
      p = 0.0;
    }
  }
  return out;
}

double hermite2_pmf(double lambda, double mu, std::int64_t i) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  if (i < 0) return 0.0;
  const double r = lambda / mu;
  double sum = 0.0;
  for (std::int64_t j = 0; j <= i / 2; ++j) {
    const auto jd = static_cast<double>(j);
    sum += std::pow(r, static_cast<double>(i - j)) * std::pow(2.0, -jd) /
           (std::tgamma(static_cast<double>(i - 2 * j) + 1.0) * std::tgamma(jd + 1.0));
  }
  return std::exp(-1.5 * r) * sum;
}

double cumulant_scaled_direct(int k, std::int64_t n, double lambda, double mu) {
  if (k < 1 || n < 1) throw InvalidArgument("k and n must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  const auto nd = static_cast<double>(n);
  double sum = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) sum += std::pow(static_cast<double>(j) / nd, k - 1);
  return lambda / mu * sum / nd;
}

namespace {

struct FaulhaberEval {
  double value;
  double abs_sum; // sum of |terms|, for conditioning
};

// sum_{j=1}^n j^{k-1} / n^k from Faulhaber's formula, term by term.
FaulhaberEval faulhaber_scaled_power_sum(int k, std::int64_t n) {
  if (k > special::tolerance::kMaxBernoulliIndex + 1) {
    throw InvalidArgument("Faulhaber form needs Bernoulli numbers beyond the supported index");
  }
  const auto nd = static_cast<double>(n);
  if (k == 1) return {1.0, 1.0};
  double value = 1.0 / k + 0.5 / nd;
  double abs_sum = value;
  double inv_fact = 1.0;
  for (int j = 2; j <= k - 1; ++j) {
    inv_fact /= j;
    const double term = special::bernoulli(j) * inv_fact * special::falling_factorial(k - 1, j - 1) *
                        std::pow(nd, -j);
    value += term;
    abs_sum += std::abs(term);
  }
  return {value, abs_sum};
}

} // namespace

double cumulant_scaled_faulhaber(int k, std::int64_t n, double lambda, double mu) {
  if (k < 1 || n < 1) throw InvalidArgument("k and n must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  return lambda / mu * faulhaber_scaled_power_sum(k, n).value;
}

double cumulant_scaled(int k, std::int64_t n, double lambda, double mu) {
  const double direct = cumulant_scaled_direct(k, n, lambda, mu);
  if (k <= special::tolerance::kMaxBernoulliIndex + 1) {
    const auto f = faulhaber_scaled_power_sum(k, n);
    const double condition = f.abs_sum / std::abs(f.value);
    if (condition * std::numeric_limits<double>::epsilon() <= 1e-11) {
      const double faulhaber = lambda / mu * f.value;
      if (std::abs(direct - faulhaber) > 1e-9 * std::abs(direct)) {
        throw NumericalError("cumulant_scaled: direct and Faulhaber forms disagree");
      }
    }
  }
  return direct;
}

double cumulant_scaled_limit(int k, double lambda, double mu) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  return lambda / (static_cast<double>(k) * mu);
}

namespace {

// (lambda/mu)-free exponent of the batch-scaling limit. x_now = x0 e^{-mu t}.
// Ei(x0) - Ei(x_now) - mu t = (Ei(x0) - ln x0) - (Ei(x_now) - ln x_now), and
// likewise for E1, so the logarithms cancel analytically.
double scaled_limit_exponent(double x0, double decay) {
  if (x0 > 0.0) return special::ei_minus_log(x0) - special::ei_minus_log(x0 * decay);
  if (x0 < 0.0) return special::e1_plus_log(-x0 * decay) - special::e1_plus_log(-x0);
  return 0.0;
}

void require_limit_params(double lambda, double mu, double mean_b) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_positive(mean_b, "mean_b");
}

} // namespace

double scaled_limit_log_mgf(double theta, double t, double lambda, double mu, double mean_b) {
  require_limit_params(lambda, mu, mean_b);
  require_time(t);
  return lambda / mu * scaled_limit_exponent(theta * mean_b, std::exp(-mu * t));
}

double scaled_limit_mgf(double theta, double t, double lambda, double mu, double mean_b) {
  return std::exp(scaled_limit_log_mgf(theta, t, lambda, mu, mean_b));
}

double scaled_limit_mgf(double theta, SteadyStateTag, double lambda, double mu, double mean_b) {
  require_limit_params(lambda, mu, mean_b);
  return std::exp(lambda / mu * scaled_limit_exponent(theta * mean_b, 0.0));
}

double scaled_limit_mgf_harmonic(double theta, double lambda, double mu, int terms) {
  if (!(theta < 0.0)) throw DomainError("harmonic generating-function form requires theta < 0");
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  const double y = -theta;
  double h = 0.0, power = 1.0, sum = 0.0;
  for (int m = 1; m <= terms; ++m) {
    h += 1.0 / m;
    power *= y / m;
    sum += h * power;
  }
  return std::exp(-lambda / mu * std::exp(theta) * sum);
}

double scaled_steady_mgf(std::int64_t n, double theta, double lambda, double mu) {
  return std::exp(steady_log_mgf_poisson(n, lambda, mu, theta / static_cast<double>(n)));
}

double subqueue_covariance(const RatePattern& rate, double mu, double t) {
  require_positive(mu, "mu");
  require_time(t);
  const double decay = std::exp(-2.0 * mu * t);
  double out = rate.base() / (2.0 * mu) * (-std::expm1(-2.0 * mu * t));
  const auto a = rate.cos_coeffs();
  const auto b = rate.sin_coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double d = k * k + 4.0 * mu * mu;
    const double c = std::cos(k * t), s = std::sin(k * t);
    out += a[i] / d * (2.0 * mu * c + k * s - 2.0 * mu * decay) + b[i] / d * (2.0 * mu * s - k * c + k * decay);
  }
  return out;
}

double subqueue_covariance(const RatePattern& rate, double mu, SteadyStateTag) {
  require_positive(mu, "mu");
  require_stationary(rate, "subqueue_covariance");
  return rate.base() / (2.0 * mu);
}

double subqueue_covariance_quadrature(const RatePattern& rate, double mu, double t) {
  require_positive(mu, "mu");
  return rate_decay_integral_quadrature([&rate](double s) { return rate.at(s); }, 2.0 * mu, t);
}

double subqueue_correlation(std::int64_t q0_i, std::int64_t q0_j, double lambda, double mu, double t) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_time(t);
  if (q0_i < 0 || q0_j < 0) throw InvalidArgument("initial sub-queue counts must be >= 0");
  const double e1 = std::exp(-mu * t);
  const double e2 = std::exp(-2.0 * mu * t);
  const double arrivals = lambda / mu * (-std::expm1(-mu * t));
  const double vi = static_cast<double>(q0_i) * (e1 - e2) + arrivals;
  const double vj = static_cast<double>(q0_j) * (e1 - e2) + arrivals;
  if (!(vi > 0.0) || !(vj > 0.0)) {
    throw DegenerateDenominatorError("subqueue_correlation: a sub-queue variance is zero");
  }
  return lambda / (2.0 * mu) * (-std::expm1(-2.0 * mu * t)) / std::sqrt(vi * vj);
}

double subqueue_correlation(SteadyStateTag) { return 0.5; }

MomentPair mean_var_random(const QueueSpec& spec, double t) {
  const double mu = exponential_mu(spec);
  require_time(t);
  const auto [m1, m2] = spec.batch.moments();
  const double q0 = static_cast<double>(spec.q0);
  const double j1 = rate_decay_integral(spec.rate, mu, t);
  const double j2 = rate_decay_integral(spec.rate, 2.0 * mu, t);
  const double e1 = std::exp(-mu * t);
  return {q0 * e1 + m1 * j1, q0 * (e1 - e1 * e1) + (m2 - m1) * j2 + m1 * j1};
}

MomentPair mean_var_random(const QueueSpec& spec, SteadyStateTag) {
  const double mu = exponential_mu(spec);
  require_stationary(spec.rate, "mean_var_random");
  const auto [m1, m2] = spec.batch.moments();
  const double lambda = spec.rate.base();
  return {lambda * m1 / mu, lambda * m1 / mu + lambda / (2.0 * mu) * (m2 - m1)};
}

MomentPair mean_var_random(const std::function<double(double)>& rate, const BatchMoments& batch, double mu,
                           double q0, double t) {
  require_positive(mu, "mu");
  const double j1 = rate_decay_integral_quadrature(rate, mu, t);
  const double j2 = rate_decay_integral_quadrature(rate, 2.0 * mu, t);
  const double e1 = std::exp(-mu * t);
  return {q0 * e1 + batch.mean * j1,
          q0 * (e1 - e1 * e1) + (batch.second_moment - batch.mean) * j2 + batch.mean * j1};
}

double fluid_mgf(double theta, double t, double lambda, double mu, double mean_n, double q0) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_time(t);
  const double decay = std::exp(-mu * t);
  return std::exp(lambda * mean_n * theta / mu * (1.0 - decay) + q0 * theta * decay);
}

double fluid_mgf(double theta, SteadyStateTag, double lambda, double mu, double mean_n) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  return std::exp(lambda * mean_n * theta / mu);
}

GaussianParams diffusion_params(double lambda, double mu, const BatchMoments& batch) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  return {lambda * batch.mean / mu, lambda / (2.0 * mu) * (batch.mean + batch.second_moment)};
}

double diffusion_mgf(double theta, double t, double lambda, double mu, const BatchMoments& batch, double q0) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_time(t);
  const double decay = std::exp(-mu * t);
  return std::exp(lambda * theta * theta / (4.0 * mu) * (batch.mean + batch.second_moment) * (1.0 - decay) +
                  theta * q0 * decay);
}

double diffusion_mgf(double theta, SteadyStateTag, double lambda, double mu, const BatchMoments& batch) {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  return std::exp(lambda * theta * theta / (4.0 * mu) * (batch.mean + batch.second_moment));
}

} // namespace batchq::analytic
