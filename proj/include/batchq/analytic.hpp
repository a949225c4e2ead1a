#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "batchq/model.hpp"

namespace batchq::analytic {

struct MomentPair {
  double mean = 0.0;
  double variance = 0.0;
};

// Tag selecting the t -> infinity entry point of an operation. Steady-state
// entry points require a stationary rate and throw DomainError otherwise.
struct SteadyStateTag {};
inline constexpr SteadyStateTag steady_state{};

// Absolute tolerance of the adaptive quadrature used for non-Fourier rates.
inline constexpr double kQuadratureAbsTol = 1e-10;

// J_c(t) = e^{-ct} int_0^t lambda(s) e^{cs} ds for a Fourier rate, in closed
// form. c > 0.
double rate_decay_integral(const RatePattern& rate, double c, double t);
// lambda / c; stationary rates only.
double rate_decay_integral(const RatePattern& rate, double c, SteadyStateTag);
// Same integral for an arbitrary intensity by Gauss-Kronrod quadrature.
double rate_decay_integral_quadrature(const std::function<double(double)>& rate, double c, double t);

// --- Fixed batch, exponential service --------------------------------------

// log M(theta, t) from the periodic-rate closed form, including the Q0 factor.
double transient_log_mgf_fixed(const QueueSpec& spec, double theta, double t);
double transient_mgf_fixed(const QueueSpec& spec, double theta, double t);
double transient_mgf_fixed(const QueueSpec& spec, double theta, SteadyStateTag);

MomentPair mean_var_fixed(const QueueSpec& spec, double t);
MomentPair mean_var_fixed(const QueueSpec& spec, SteadyStateTag);

// Three forms of the steady-state log MGF of the fixed-batch queue:
//   binomial:  (lambda/mu) sum_k C(n,k) (e^theta - 1)^k / k
//   poisson:   (lambda/mu) sum_k (e^{k theta} - 1) / k
//   polylog:   (lambda/mu) (Li(e^theta, n, 1) - H_n)
double steady_log_mgf_binomial(std::int64_t n, double lambda, double mu, double theta);
double steady_log_mgf_poisson(std::int64_t n, double lambda, double mu, double theta);
double steady_log_mgf_polylog(std::int64_t n, double lambda, double mu, double theta);

struct PmfResult {
  std::vector<double> probs; // p_0 .. p_{j_max}
  bool underflow = false;    // some entry fell below kPmfUnderflow and was zeroed
};
inline constexpr double kPmfUnderflow = 1e-300;

// p_j = (lambda / (j mu)) sum_{i=1}^{min(n,j)} p_{j-i}, p_0 = exp(-(lambda/mu) H_n).
PmfResult steady_pmf_fixed_markov(std::int64_t n, double lambda, double mu, std::int64_t j_max);

// P(Q = i) for n = 2 from the explicit Hermite double sum.
double hermite2_pmf(double lambda, double mu, std::int64_t i);

// k-th cumulant of Q_inf(n)/n.
double cumulant_scaled_direct(int k, std::int64_t n, double lambda, double mu);
double cumulant_scaled_faulhaber(int k, std::int64_t n, double lambda, double mu);
// Direct sum, cross-checked against the Faulhaber form to 1e-9 relative
// whenever the Faulhaber evaluation is well conditioned. Throws
// NumericalError on disagreement.
double cumulant_scaled(int k, std::int64_t n, double lambda, double mu);
double cumulant_scaled_limit(int k, double lambda, double mu);

// --- Batch scaling limit -----------------------------------------------------

// lim_n E[exp(theta Q_t(n) / n)] for batches with mean_b per unit of scale.
double scaled_limit_log_mgf(double theta, double t, double lambda, double mu, double mean_b = 1.0);
double scaled_limit_mgf(double theta, double t, double lambda, double mu, double mean_b = 1.0);
double scaled_limit_mgf(double theta, SteadyStateTag, double lambda, double mu, double mean_b = 1.0);
// Steady limit for theta < 0 through the harmonic-number generating function
// exp(-(lambda/mu) e^theta sum_{m>=1} H_m (-theta)^m / m!), truncated at `terms`.
double scaled_limit_mgf_harmonic(double theta, double lambda, double mu, int terms = 200);
// E[exp(theta Q_inf(n) / n)] at finite n.
double scaled_steady_mgf(std::int64_t n, double theta, double lambda, double mu);

// --- Sub-queues under identical routing -------------------------------------

double subqueue_covariance(const RatePattern& rate, double mu, double t);
double subqueue_covariance(const RatePattern& rate, double mu, SteadyStateTag);
double subqueue_covariance_quadrature(const RatePattern& rate, double mu, double t);

// Stationary-rate correlation between two sub-queues with initial counts
// q0_i, q0_j. Throws DegenerateDenominatorError when a variance factor is 0.
double subqueue_correlation(std::int64_t q0_i, std::int64_t q0_j, double lambda, double mu, double t);
double subqueue_correlation(SteadyStateTag);

// --- Random batch, exponential service --------------------------------------

MomentPair mean_var_random(const QueueSpec& spec, double t);
MomentPair mean_var_random(const QueueSpec& spec, SteadyStateTag);
// Arbitrary intensity via quadrature.
MomentPair mean_var_random(const std::function<double(double)>& rate, const BatchMoments& batch, double mu,
                           double q0, double t);

double fluid_mgf(double theta, double t, double lambda, double mu, double mean_n, double q0);
double fluid_mgf(double theta, SteadyStateTag, double lambda, double mu, double mean_n);

struct GaussianParams {
  double mean = 0.0;
  double variance = 0.0;
};
GaussianParams diffusion_params(double lambda, double mu, const BatchMoments& batch);
double diffusion_mgf(double theta, double t, double lambda, double mu, const BatchMoments& batch, double q0);
double diffusion_mgf(double theta, SteadyStateTag, double lambda, double mu, const BatchMoments& batch);

} // namespace batchq::analytic
