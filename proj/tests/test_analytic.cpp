#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "batchq/analytic.hpp"
#include "batchq/errors.hpp"
#include "batchq/special_fn.hpp"

using namespace batchq;
using namespace batchq::analytic;

namespace {

QueueSpec fixed_spec(double lambda, double mu, std::int64_t n, std::int64_t q0,
                     std::vector<double> a = {}, std::vector<double> b = {}) {
  return {RatePattern(lambda, std::move(a), std::move(b)), BatchDist::fixed(n), ServiceDist::exponential(mu), q0};
}

// Test-side oracle for e^{-ct} int_0^t f(s) e^{cs} ds.
double decay_integral_oracle(const RatePattern& rate, double c, double t) {
  auto f = [&](double s) { return rate.at(s) * std::exp(c * (s - t)); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 20, 1e-14);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("rate decay integral closed form agrees with quadrature") {
  const RatePattern rate(2.0, {0.5, -0.3}, {0.2, 0.4});
  for (double c : {0.5, 1.0, 3.0}) {
    for (double t : {0.0, 0.3, 1.0, 4.0, 12.0}) {
      const double closed = rate_decay_integral(rate, c, t);
      CHECK(std::abs(closed - decay_integral_oracle(rate, c, t)) < 1e-10);
      CHECK(std::abs(closed - rate_decay_integral_quadrature([&](double s) { return rate.at(s); }, c, t)) < 1e-10);
    }
  }
  CHECK(rate_decay_integral(RatePattern(3.0), 2.0, steady_state) == 1.5);
  CHECK_THROWS_AS(rate_decay_integral(rate, 1.0, steady_state), DomainError);
}

TEST_CASE("transient MGF basics") {
  const auto spec = fixed_spec(1.0, 1.0, 2, 3, {0.3}, {0.2});
  for (double t : {0.0, 0.5, 7.0}) CHECK(transient_mgf_fixed(spec, 0.0, t) == 1.0);
  // At t = 0 only the initial population is present.
  CHECK(transient_mgf_fixed(spec, 0.4, 0.0) == doctest::Approx(std::exp(3 * 0.4)));
}

TEST_CASE("M/M/inf steady state is Poisson") {
  const auto spec = fixed_spec(1.0, 1.0, 1, 0);
  CHECK(transient_mgf_fixed(spec, 0.5, steady_state) == doctest::Approx(std::exp(std::exp(0.5) - 1.0)).epsilon(1e-14));
  CHECK(transient_mgf_fixed(spec, 0.5, 60.0) == doctest::Approx(1.913093).epsilon(1e-6));
  // Transient M/M/inf from empty: Poisson with mean (lambda/mu)(1 - e^{-mu t}).
  const double m = 1.0 - std::exp(-0.7);
  CHECK(transient_mgf_fixed(spec, -0.8, 0.7) == doctest::Approx(std::exp(m * std::expm1(-0.8))).epsilon(1e-14));
}

TEST_CASE("log MGF derivatives reproduce the mean and variance") {
  const double h = 1e-4;
  for (double lambda : {0.5, 2.0}) {
    for (double mu : {0.7, 1.5}) {
      for (std::int64_t n : {1, 3, 6}) {
        for (std::int64_t q0 : {0, 4}) {
          for (double t : {0.2, 1.0, 5.0}) {
            for (bool periodic : {false, true}) {
              CAPTURE(lambda);
              CAPTURE(mu);
              CAPTURE(n);
              CAPTURE(t);
              CAPTURE(periodic);
              const auto spec = periodic ? fixed_spec(lambda, mu, n, q0, {0.2 * lambda, 0.1 * lambda}, {-0.1 * lambda, 0.05 * lambda})
                                         : fixed_spec(lambda, mu, n, q0);
              const double gp = transient_log_mgf_fixed(spec, h, t);
              const double gm = transient_log_mgf_fixed(spec, -h, t);
              const auto mv = mean_var_fixed(spec, t);
              CHECK(rel_err((gp - gm) / (2 * h), mv.mean) < 1e-4);
              CHECK(rel_err((gp + gm) / (h * h), mv.variance) < 1e-4);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("fixed-batch moments: closed form versus the random-batch integral form") {
  for (std::int64_t n : {1, 2, 5}) {
    const auto spec = fixed_spec(2.0, 0.8, n, 3, {0.4, -0.2}, {0.3, 0.1});
    for (double t : {0.0, 0.4, 2.0, 9.0}) {
      const auto a = mean_var_fixed(spec, t);
      const auto b = mean_var_random(spec, t);
      CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
      CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-12));
    }
  }
}

TEST_CASE("fixed-batch moments, worked values") {
  const auto spec = fixed_spec(1.0, 1.0, 2, 0);
  const auto steady = mean_var_fixed(spec, steady_state);
  CHECK(steady.mean == 2.0);
  CHECK(steady.variance == 3.0);
  const auto late = mean_var_fixed(spec, 50.0);
  CHECK(late.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(late.variance == doctest::Approx(3.0).epsilon(1e-15));
  const auto start = mean_var_fixed(fixed_spec(1.0, 1.0, 2, 7, {0.5}, {0.0}), 0.0);
  CHECK(start.mean == doctest::Approx(7.0));
  CHECK(std::abs(start.variance) < 1e-14);
  CHECK_THROWS_AS(mean_var_fixed(fixed_spec(1.0, 1.0, 2, 0, {0.5}, {0.0}), steady_state), DomainError);
}

TEST_CASE("random-batch moments") {
  const QueueSpec spec{RatePattern(1.0), BatchDist::empirical({{1, 0.5}, {2, 0.5}}), ServiceDist::exponential(1.0), 0};
  const auto steady = mean_var_random(spec, steady_state);
  CHECK(steady.mean == 1.5);
  CHECK(steady.variance == 2.0);
  const auto start = mean_var_random(spec, 0.0);
  CHECK(start.mean == 0.0);
  CHECK(start.variance == 0.0);
  const auto late = mean_var_random(spec, 60.0);
  CHECK(late.mean == doctest::Approx(1.5));
  CHECK(late.variance == doctest::Approx(2.0));
}

TEST_CASE("random-batch moments for a general intensity by quadrature") {
  const RatePattern rate(2.0, {0.6}, {-0.4});
  const QueueSpec spec{rate, BatchDist::empirical({{1, 0.3}, {4, 0.7}}), ServiceDist::exponential(1.3), 2};
  for (double t : {0.5, 3.0, 11.0}) {
    const auto closed = mean_var_random(spec, t);
    const auto quad = mean_var_random([&](double s) { return rate.at(s); }, spec.batch.moments(), 1.3, 2.0, t);
    CHECK(std::abs(closed.mean - quad.mean) < 1e-9);
    CHECK(std::abs(closed.variance - quad.variance) < 1e-9);
  }
  // A non-Fourier intensity against a hand-integrable case: lambda(s) = 1 + s.
  const auto lin = mean_var_random([](double s) { return 1.0 + s; }, BatchMoments{1.0, 1.0}, 1.0, 0.0, 2.0);
  // e^{-t} int_0^t (1 + s) e^{s} ds = t
  CHECK(lin.mean == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("steady MGF: binomial, Poisson-sum and polylog forms coincide") {
  for (std::int64_t n = 1; n <= 6; ++n) {
    for (double theta = -2.0; theta <= 1.0 + 1e-12; theta += 0.05) {
      const double b = steady_log_mgf_binomial(n, 1.3, 0.9, theta);
      const double p = steady_log_mgf_poisson(n, 1.3, 0.9, theta);
      const double l = steady_log_mgf_polylog(n, 1.3, 0.9, theta);
      CHECK(std::abs(std::exp(b) - std::exp(p)) < 1e-10 * std::max(1.0, std::exp(p)));
      CHECK(std::abs(std::exp(l) - std::exp(p)) < 1e-10 * std::max(1.0, std::exp(p)));
    }
  }
}

TEST_CASE("steady PMF recursion") {
  const auto pmf = steady_pmf_fixed_markov(2, 1.0, 1.0, 60);
  CHECK(pmf.probs[0] == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
  CHECK(pmf.probs[1] == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
  CHECK(pmf.probs[2] == doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
  CHECK_FALSE(pmf.underflow);
  for (std::int64_t i = 0; i <= 30; ++i) CHECK(std::abs(pmf.probs[i] - hermite2_pmf(1.0, 1.0, i)) < 1e-12);
  const auto other = steady_pmf_fixed_markov(2, 2.7, 1.3, 30);
  for (std::int64_t i = 0; i <= 30; ++i) CHECK(std::abs(other.probs[i] - hermite2_pmf(2.7, 1.3, i)) < 1e-12);
}

TEST_CASE("steady PMF sums to one and reproduces the MGF") {
  for (std::int64_t n : {1, 3, 5}) {
    double previous_gap = 1.0;
    for (std::int64_t j_max : {5, 20, 80}) {
      const auto pmf = steady_pmf_fixed_markov(n, 1.5, 1.0, j_max);
      double total = 0.0, mgf = 0.0;
      for (std::size_t j = 0; j < pmf.probs.size(); ++j) {
        total += pmf.probs[j];
        mgf += pmf.probs[j] * std::exp(-0.7 * static_cast<double>(j));
      }
      CHECK(total <= 1.0 + 1e-12);
      const double gap = std::abs(mgf - std::exp(steady_log_mgf_poisson(n, 1.5, 1.0, -0.7)));
      CHECK(gap <= previous_gap);
      previous_gap = gap;
      if (j_max == 80) {
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(gap < 1e-12);
      }
    }
  }
}

TEST_CASE("steady PMF reports underflow") {
  const auto pmf = steady_pmf_fixed_markov(3, 500.0, 1.0, 10);
  CHECK(pmf.underflow);
  CHECK(pmf.probs[0] == 0.0);
  CHECK_FALSE(steady_pmf_fixed_markov(3, 1.0, 1.0, 10).underflow);
}

TEST_CASE("scaled cumulants") {
  for (std::int64_t n : {1, 5, 100}) CHECK(cumulant_scaled(1, n, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cumulant_scaled(2, 2, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(cumulant_scaled(2, 1000000, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(cumulant_scaled_limit(2, 1.0, 1.0) == 0.5);
  CHECK(cumulant_scaled_limit(4, 3.0, 2.0) == 3.0 / 8.0);
  for (int k = 1; k <= 10; ++k) {
    for (std::int64_t n : {1, 2, 3, 10, 57, 1000, 10000}) {
      CAPTURE(k);
      CAPTURE(n);
      const double d = cumulant_scaled_direct(k, n, 1.7, 0.6);
      CHECK(std::abs(cumulant_scaled_faulhaber(k, n, 1.7, 0.6) - d) <= 1e-9 * d);
      CHECK(cumulant_scaled(k, n, 1.7, 0.6) == d);
    }
  }
  // Direct sum for n = 3, k = 4: (1 + 8 + 27) / 81.
  CHECK(cumulant_scaled(4, 3, 1.0, 1.0) == doctest::Approx(36.0 / 81.0).epsilon(1e-15));
}

TEST_CASE("batch scaling limit MGF, literal exponential-integral form") {
  using boost::math::expint;
  const double lambda = 2.0, mu = 0.8, b = 1.5;
  for (double t : {0.1, 1.3, 6.0}) {
    for (double theta : {0.05, 0.7, 2.0}) {
      const double x = theta * b;
      const double oracle = std::exp(lambda / mu * (expint(x) - expint(x * std::exp(-mu * t)) - mu * t));
      CHECK(rel_err(scaled_limit_mgf(theta, t, lambda, mu, b), oracle) < 1e-11);
    }
    for (double theta : {-0.05, -0.9, -3.0}) {
      const double y = -theta * b;
      const double oracle = std::exp(lambda / mu * (expint(1, y * std::exp(-mu * t)) - expint(1, y) - mu * t));
      CHECK(rel_err(scaled_limit_mgf(theta, t, lambda, mu, b), oracle) < 1e-11);
    }
  }
  CHECK(scaled_limit_mgf(0.7, 1.3, 2.0, 0.8, 1.5) == doctest::Approx(12.0754627252078992).epsilon(1e-12));
  CHECK(scaled_limit_mgf(-0.9, 1.3, 2.0, 0.8, 1.5) == doctest::Approx(0.2363596747282142).epsilon(1e-12));
  CHECK(scaled_limit_mgf(0.0, 3.0, 1.0, 1.0) == 1.0);
  CHECK(scaled_limit_mgf(0.4, 0.0, 1.0, 1.0) == 1.0);
}

TEST_CASE("batch scaling limit MGF, steady state") {
  CHECK(scaled_limit_mgf(-0.5, steady_state, 1.0, 1.0) == doctest::Approx(0.6415667296116866).epsilon(1e-13));
  const double oracle = std::exp(boost::math::expint(0.2) - special::kEulerGamma) / 0.2;
  CHECK(scaled_limit_mgf(0.2, steady_state, 1.0, 1.0) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(scaled_limit_mgf(0.2, steady_state, 1.0, 1.0) == doctest::Approx(1.2342477308005460).epsilon(1e-13));
  CHECK(scaled_limit_mgf(-0.5, 80.0, 1.0, 1.0) == doctest::Approx(0.6415667296116866).epsilon(1e-13));
  CHECK(scaled_limit_mgf(0.0, steady_state, 1.0, 1.0) == 1.0);
}

TEST_CASE("random-batch limit equals the fixed-batch limit at a rescaled argument") {
  for (double c : {0.3, 1.0, 2.5}) {
    for (double theta : {-1.5, -0.2, 0.3, 1.1}) {
      for (double t : {0.5, 4.0}) {
        CHECK(scaled_limit_mgf(theta, t, 1.4, 0.9, c) ==
              doctest::Approx(scaled_limit_mgf(theta * c, t, 1.4, 0.9, 1.0)).epsilon(1e-14));
      }
      CHECK(scaled_limit_mgf(theta, steady_state, 1.4, 0.9, c) ==
            doctest::Approx(scaled_limit_mgf(theta * c, steady_state, 1.4, 0.9, 1.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("harmonic generating-function form of the steady limit") {
  for (double theta = -3.0; theta < -1e-9; theta += 0.05) {
    for (double ratio : {0.5, 1.0, 2.0}) {
      CHECK(std::abs(scaled_limit_mgf_harmonic(theta, ratio, 1.0) - scaled_limit_mgf(theta, steady_state, ratio, 1.0)) <
            1e-8);
    }
  }
  CHECK_THROWS_AS(scaled_limit_mgf_harmonic(0.5, 1.0, 1.0), DomainError);
}

TEST_CASE("finite-n scaled MGF converges to the limit") {
  double previous = 1.0;
  for (std::int64_t n : {1, 4, 16, 64, 256, 1024}) {
    double worst = 0.0;
    for (double theta = -1.0; theta <= 0.5; theta += 0.05) {
      worst = std::max(worst, std::abs(scaled_steady_mgf(n, theta, 1.0, 1.0) -
                                       scaled_limit_mgf(theta, steady_state, 1.0, 1.0)));
    }
    CHECK(worst < previous);
    previous = worst;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("sub-queue covariance") {
  CHECK(subqueue_covariance(RatePattern(1.0), 1.0, steady_state) == 0.5);
  CHECK(subqueue_covariance(RatePattern(1.0, {0.3}, {0.2}), 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(subqueue_covariance(RatePattern(2.0), 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-15));
  CHECK(subqueue_covariance(RatePattern(2.0), 1.0, 1.0) == doctest::Approx(0.864665).epsilon(1e-6));
  const RatePattern periodic(3.0, {0.8, -0.5, 0.2}, {0.4, 0.3, -0.6});
  for (double mu : {0.4, 1.0, 2.5}) {
    for (double t : {0.1, 1.0, 3.3, 20.0}) {
      CHECK(std::abs(subqueue_covariance(periodic, mu, t) - subqueue_covariance_quadrature(periodic, mu, t)) < 1e-8);
      CHECK(std::abs(subqueue_covariance(periodic, mu, t) - decay_integral_oracle(periodic, 2 * mu, t)) < 1e-8);
    }
  }
  CHECK_THROWS_AS(subqueue_covariance(periodic, 1.0, steady_state), DomainError);
}

TEST_CASE("sub-queue correlation") {
  CHECK(subqueue_correlation(steady_state) == 0.5);
  CHECK(subqueue_correlation(0, 0, 1.0, 1.0, 1.0) == doctest::Approx(0.6839397205857212).epsilon(1e-14));
  CHECK(subqueue_correlation(0, 0, 1.0, 1.0, 40.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(subqueue_correlation(3, 1, 2.0, 1.0, 60.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(subqueue_correlation(2, 0, 1.0, 1.0, 1.0) < subqueue_correlation(0, 0, 1.0, 1.0, 1.0));
  CHECK_THROWS_AS(subqueue_correlation(0, 0, 1.0, 1.0, 0.0), DegenerateDenominatorError);
  CHECK_THROWS_AS(subqueue_correlation(5, 5, 1.0, 1.0, 0.0), DegenerateDenominatorError);
}

TEST_CASE("fluid limit") {
  CHECK(fluid_mgf(0.0, 3.0, 1.0, 1.0, 1.5, 2.0) == 1.0);
  CHECK(fluid_mgf(1.0, steady_state, 1.0, 1.0, 1.5) == doctest::Approx(std::exp(1.5)).epsilon(1e-15));
  CHECK(fluid_mgf(1.0, 60.0, 1.0, 1.0, 1.5, 0.0) == doctest::Approx(4.481689).epsilon(1e-6));
  for (double t : {0.0, 0.3, 2.0, 10.0}) {
    for (double theta : {-1.0, 0.25, 0.8}) {
      CHECK(std::log(fluid_mgf(2 * theta, t, 1.2, 0.7, 1.5, 3.0)) ==
            doctest::Approx(2 * std::log(fluid_mgf(theta, t, 1.2, 0.7, 1.5, 3.0))).epsilon(1e-13));
    }
    // The fluid MGF is exp(theta E[Q_t]).
    const QueueSpec spec{RatePattern(1.2), BatchDist::empirical({{1, 0.5}, {2, 0.5}}), ServiceDist::exponential(0.7), 3};
    CHECK(std::log(fluid_mgf(1.0, t, 1.2, 0.7, 1.5, 3.0)) == doctest::Approx(mean_var_random(spec, t).mean).epsilon(1e-13));
  }
}

TEST_CASE("diffusion limit") {
  auto p = diffusion_params(1.0, 1.0, BatchDist::fixed(1).moments());
  CHECK(p.mean == 1.0);
  CHECK(p.variance == 1.0);
  p = diffusion_params(1.0, 1.0, BatchDist::empirical({{1, 0.5}, {2, 0.5}}).moments());
  CHECK(p.mean == 1.5);
  CHECK(p.variance == 2.0);
  p = diffusion_params(2.0, 1.0, BatchDist::fixed(3).moments());
  CHECK(p.mean == 6.0);
  CHECK(p.variance == 12.0);

  const QueueSpec spec{RatePattern(1.7), BatchDist::empirical({{1, 0.2}, {3, 0.5}, {6, 0.3}}),
                       ServiceDist::exponential(0.6), 0};
  const auto steady = mean_var_random(spec, steady_state);
  p = diffusion_params(1.7, 0.6, spec.batch.moments());
  CHECK(p.mean == doctest::Approx(steady.mean).epsilon(1e-15));
  CHECK(p.variance == doctest::Approx(steady.variance).epsilon(1e-15));

  const double theta = 0.6;
  CHECK(diffusion_mgf(theta, steady_state, 1.7, 0.6, spec.batch.moments()) ==
        doctest::Approx(std::exp(theta * theta * p.variance / 2)).epsilon(1e-14));
  CHECK(diffusion_mgf(theta, 0.0, 1.7, 0.6, spec.batch.moments(), 2.0) == doctest::Approx(std::exp(theta * 2.0)));
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(mean_var_fixed(fixed_spec(1.0, 1.0, 2, 0), -1.0), InvalidArgument);
  CHECK_THROWS_AS(steady_pmf_fixed_markov(0, 1.0, 1.0, 3), InvalidArgument);
  CHECK_THROWS_AS(scaled_limit_mgf(0.1, 1.0, 1.0, 0.0), InvalidArgument);
  const QueueSpec general{RatePattern(1.0), BatchDist::fixed(2), ServiceDist::uniform(1.0), 0};
  CHECK_THROWS_AS(transient_mgf_fixed(general, 0.1, 1.0), DomainError);
  const QueueSpec random{RatePattern(1.0), BatchDist::empirical({{1, 0.5}, {2, 0.5}}), ServiceDist::exponential(1.0), 0};
  CHECK_THROWS_AS(mean_var_fixed(random, 1.0), DomainError);
}
