#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "batchq/analytic.hpp"
#include "batchq/errors.hpp"
#include "batchq/simulator.hpp"
#include "batchq/stats.hpp"

using namespace batchq;
using namespace batchq::sim;

namespace {

QueueSpec markov_spec(double lambda, double mu, std::int64_t n, std::int64_t q0 = 0) {
  return {RatePattern(lambda), BatchDist::fixed(n), ServiceDist::exponential(mu), q0};
}

SimConfig config_for(QueueSpec spec, std::vector<double> times, std::int64_t reps, std::uint64_t seed,
                     SubqueueMode mode = {}) {
  const double horizon = times.back();
  return {std::move(spec), horizon, std::move(times), reps, seed, mode, 0};
}

} // namespace

TEST_CASE("initial population is present at time zero") {
  const QueueSpec spec{RatePattern(1e-9), BatchDist::fixed(1), ServiceDist::exponential(1.0), 5};
  const std::vector<double> times{0.0};
  const auto path = simulate_one(spec, 0.0, times, 7);
  REQUIRE(path.size() == 1);
  CHECK(path[0].count == 5);
}

TEST_CASE("M/M/inf and fixed-batch steady moments") {
  auto summary = replicate(config_for(markov_spec(1.0, 1.0, 1), {20.0}, 20000, 100));
  auto s = summary.snapshots[0];
  CHECK(std::abs(s.mean - 1.0) < 4 * s.se);
  CHECK(s.count == 20000);
  CHECK(s.se == doctest::Approx(std::sqrt(s.variance / s.count)));

  summary = replicate(config_for(markov_spec(1.0, 1.0, 2), {20.0}, 20000, 200));
  s = summary.snapshots[0];
  CHECK(std::abs(s.mean - 2.0) < 4 * s.se);
  const auto totals = run_replications(config_for(markov_spec(1.0, 1.0, 2), {20.0}, 20000, 200)).totals_at(0);
  const auto v = stats::variance_estimate(totals);
  CHECK(std::abs(v.variance - 3.0) < 4 * v.se);
}

TEST_CASE("periodic arrivals track the transient mean") {
  const QueueSpec spec{RatePattern(2.0, {1.0}, {0.0}), BatchDist::fixed(1), ServiceDist::exponential(1.0), 0};
  const std::vector<double> times{1.0, 2.5, 4.0, 30.0};
  const auto summary = replicate(config_for(spec, times, 20000, 300));
  for (const auto& s : summary.snapshots) {
    CAPTURE(s.t);
    CHECK(std::abs(s.mean - analytic::mean_var_fixed(spec, s.t).mean) < 4 * s.se);
  }
}

TEST_CASE("identical routing: sub-queues partition the total") {
  const auto config = config_for(markov_spec(1.5, 1.0, 3), {0.5, 2.0, 8.0}, 500, 9, SubqueueMode::identical());
  const auto data = run_replications(config);
  REQUIRE(data.subqueues == 3);
  for (std::int64_t r = 0; r < data.replications; ++r) {
    for (std::size_t s = 0; s < data.times.size(); ++s) {
      std::int64_t sum = 0;
      for (std::int64_t q = 0; q < 3; ++q) sum += data.sub_counts[(r * data.times.size() + s) * 3 + q];
      CHECK(sum == data.totals[r * data.times.size() + s]);
    }
  }
}

TEST_CASE("identical routing correlation") {
  const auto summary = replicate(config_for(markov_spec(1.0, 1.0, 2), {1.0, 20.0}, 20000, 17, SubqueueMode::identical()));
  REQUIRE(summary.pairs.size() == 2);
  CHECK(std::abs(summary.pairs[0].correlation - analytic::subqueue_correlation(0, 0, 1.0, 1.0, 1.0)) <
        4 * summary.pairs[0].correlation_se);
  CHECK(std::abs(summary.pairs[1].correlation - 0.5) < 4 * summary.pairs[1].correlation_se);
  CHECK(std::abs(summary.pairs[1].covariance - 0.5) < 0.05);
}

TEST_CASE("order-statistic routing gives Poisson sub-queues with order-statistic means") {
  const std::int64_t n = 3;
  const auto summary =
      replicate(config_for(markov_spec(1.0, 2.0, n), {25.0}, 20000, 5, SubqueueMode::order_stat(n)));
  const auto means = ServiceDist::exponential(2.0).order_stat_means(n);
  REQUIRE(summary.subqueues.size() == 3);
  for (std::int64_t j = 0; j < n; ++j) {
    const auto& q = summary.subqueues[j];
    CHECK(std::abs(q.mean - means[j]) < 4 * q.se);
  }
}

TEST_CASE("modulo-cap routing wraps positions") {
  const QueueSpec spec{RatePattern(1.0), BatchDist::fixed(5), ServiceDist::deterministic(10.0), 0};
  const std::vector<double> times{1.0};
  // Any arrival before t = 1 is still present; positions 0,2,4 -> queue 0 and 1,3 -> queue 1.
  const auto path = simulate_one(spec, 1.0, times, 3, SubqueueMode::modulo_cap(2));
  REQUIRE(path[0].subqueue_counts.size() == 2);
  const auto batches = path[0].count / 5;
  CHECK(path[0].count % 5 == 0);
  CHECK(path[0].subqueue_counts[0] == 3 * batches);
  CHECK(path[0].subqueue_counts[1] == 2 * batches);
}

TEST_CASE("configuration errors") {
  const QueueSpec random{RatePattern(1.0), BatchDist::empirical({{1, 0.5}, {4, 0.5}}), ServiceDist::exponential(1.0), 0};
  CHECK_THROWS_AS(replicate(config_for(random, {5.0}, 10, 1, SubqueueMode::order_stat(3))), ConfigError);
  CHECK_NOTHROW(replicate(config_for(random, {5.0}, 10, 1, SubqueueMode::order_stat(4))));
  CHECK_NOTHROW(replicate(config_for(random, {5.0}, 10, 1, SubqueueMode::modulo_cap(3))));
  auto bad = config_for(markov_spec(1, 1, 1), {5.0}, 0, 1);
  CHECK_THROWS_AS(replicate(bad), InvalidArgument);
  bad = config_for(markov_spec(1, 1, 1), {5.0, 2.0}, 10, 1);
  CHECK_THROWS_AS(replicate(bad), InvalidArgument);
  bad = config_for(markov_spec(1, 1, 1), {5.0}, 10, 1);
  bad.horizon = 4.0;
  CHECK_THROWS_AS(replicate(bad), InvalidArgument);
}

TEST_CASE("single replication leaves standard errors undefined") {
  const auto summary = replicate(config_for(markov_spec(1, 1, 2), {3.0}, 1, 4));
  CHECK_FALSE(summary.se_defined);
  CHECK(std::isnan(summary.snapshots[0].se));
}

TEST_CASE("replications are reproducible and independent of the worker count") {
  auto config = config_for(markov_spec(1.2, 0.8, 3, 2), {0.5, 3.0, 9.0}, 3000, 77, SubqueueMode::identical());
  config.jobs = 1;
  const auto serial = run_replications(config);
  config.jobs = 4;
  const auto parallel = run_replications(config);
  CHECK(serial.totals == parallel.totals);
  CHECK(serial.sub_counts == parallel.sub_counts);
  config.base_seed = 78;
  CHECK(run_replications(config).totals != serial.totals);
  // Replication r uses seed base + r.
  const auto one = simulate_one(config.spec, config.horizon, config.snapshot_times, 77 + 5, config.subqueues);
  for (std::size_t s = 0; s < 3; ++s) CHECK(one[s].count == serial.totals[5 * 3 + s]);
}

TEST_CASE("doubling replications shrinks the standard error by about sqrt 2") {
  const auto small = replicate(config_for(markov_spec(1, 1, 2), {10.0}, 20000, 1000));
  const auto large = replicate(config_for(markov_spec(1, 1, 2), {10.0}, 40000, 1000));
  const double ratio = small.snapshots[0].se / large.snapshots[0].se;
  CHECK(ratio > 1.3);
  CHECK(ratio < 1.53);
}

TEST_CASE("transient MGF estimate") {
  const auto config = config_for(markov_spec(1, 1, 2), {10.0}, 20000, 31);
  const auto zero = transient_mgf_estimate(config, 0.0);
  CHECK(zero[0].estimate == 1.0);
  CHECK(zero[0].se == 0.0);
  const auto est = transient_mgf_estimate(config, 0.3);
  CHECK(std::abs(est[0].estimate - analytic::transient_mgf_fixed(config.spec, 0.3, 10.0)) < 4 * est[0].se);
  CHECK_THROWS_AS(transient_mgf_estimate(config, 1.5), DomainError);
}

TEST_CASE("summary CSV layout") {
  const auto summary = replicate(config_for(markov_spec(1, 1, 2), {1.0, 2.0}, 50, 3, SubqueueMode::identical()));
  std::ostringstream main, pairs, subs;
  write_summary_csv(summary, main);
  write_pairs_csv(summary, pairs);
  write_subqueue_csv(summary, subs);
  CHECK(main.str().rfind("t,mean,variance,se,count\n", 0) == 0);
  CHECK(pairs.str().rfind("t,i,j,cov,corr\n", 0) == 0);
  CHECK(subs.str().rfind("t,i,mean,variance,se\n", 0) == 0);
  const auto text = main.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
