#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "batchq/errors.hpp"
#include "batchq/model.hpp"
#include "batchq/model_json.hpp"
#include "batchq/random.hpp"

using namespace batchq;

TEST_CASE("rate pattern evaluation and bound") {
  CHECK(RatePattern(1.0).at(3.7) == 1.0);
  CHECK(RatePattern(2.0, {1.0}, {0.0}).at(0.0) == 3.0);
  CHECK(RatePattern(2.0, {0.0}, {0.5}).at(std::numbers::pi / 2) == doctest::Approx(2.5));
  CHECK(RatePattern(1.0).bound() == 1.0);
  CHECK(RatePattern(2.0, {1.0}, {0.5}).bound() == 3.5);
  CHECK(RatePattern(2.0, {-1.0}, {0.0}).bound() == 3.0);
  CHECK(RatePattern(1.0).stationary());
  CHECK_FALSE(RatePattern(2.0, {1.0}, {0.0}).stationary());
}

TEST_CASE("rate bound dominates the rate") {
  const RatePattern rate(3.0, {0.7, -0.4, 0.2}, {-0.5, 0.3, 0.1});
  Rng rng(17);
  for (int i = 0; i < 10000; ++i) {
    const double t = rng.uniform() * 2 * std::numbers::pi;
    CHECK(rate.at(t) <= rate.bound());
    CHECK(rate.at(t) > 0.0);
  }
}

TEST_CASE("rate pattern rejects nonpositive envelopes") {
  CHECK_THROWS_AS(RatePattern(0.0), InvalidArgument);
  CHECK_THROWS_AS(RatePattern(1.0, {0.6}, {0.4}), InvalidArgument);
  CHECK_THROWS_AS(RatePattern(1.0, {0.1, 0.2}, {0.1}), InvalidArgument);
}

TEST_CASE("batch moments") {
  auto m = BatchDist::fixed(3).moments();
  CHECK(m.mean == 3.0);
  CHECK(m.second_moment == 9.0);
  m = BatchDist::empirical({{1, 0.5}, {2, 0.5}}).moments();
  CHECK(m.mean == 1.5);
  CHECK(m.second_moment == 2.5);
  m = BatchDist::divisible_sum({{0, 0.5}, {1, 0.5}}, 4).moments();
  CHECK(m.mean == doctest::Approx(2.0));
  CHECK(m.second_moment == doctest::Approx(5.0));
}

TEST_CASE("divisible sum pmf is the exact convolution") {
  const auto batch = BatchDist::divisible_sum({{0, 0.5}, {1, 0.5}}, 4);
  const double expected[] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  REQUIRE(batch.pmf().size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(batch.pmf()[i].size == static_cast<std::int64_t>(i));
    CHECK(batch.pmf()[i].prob == doctest::Approx(expected[i]));
  }
  CHECK(batch.base_mean() == 0.5);
  CHECK(batch.ccdf(1) == doctest::Approx(15.0 / 16));
}

TEST_CASE("batch ccdf") {
  CHECK(BatchDist::fixed(3).ccdf(3) == 1.0);
  CHECK(BatchDist::fixed(3).ccdf(4) == 0.0);
  const auto e = BatchDist::empirical({{1, 0.2}, {3, 0.5}, {4, 0.3}});
  CHECK(e.ccdf(2) == doctest::Approx(0.8));
  CHECK(BatchDist::empirical({{1, 0.5}, {2, 0.5}}).ccdf(2) == 0.5);
  double prev = 1.0;
  for (std::int64_t j = 1; j <= 6; ++j) {
    CHECK(e.ccdf(j) <= prev);
    prev = e.ccdf(j);
  }
  CHECK(e.ccdf(1) == 1.0);
}

TEST_CASE("batch validation") {
  CHECK_THROWS_AS(BatchDist::fixed(0), InvalidArgument);
  CHECK_THROWS_AS(BatchDist::empirical({{1, 0.5}, {2, 0.4}}), InvalidArgument);
  CHECK_THROWS_AS(BatchDist::empirical({{2, 0.5}, {1, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(BatchDist::empirical({{0, 0.5}, {1, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(BatchDist::divisible_sum({{0, 1.0}}, 3), InvalidArgument);
  CHECK_THROWS_AS(BatchDist::empirical({{1, 1.0}}).fixed_size(), DomainError);
}

TEST_CASE("batch sampling frequencies") {
  const auto batch = BatchDist::empirical({{1, 0.2}, {3, 0.5}, {4, 0.3}});
  Rng rng(5);
  int counts[5] = {};
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++counts[batch.sample(rng)];
  CHECK(std::abs(counts[1] / double(draws) - 0.2) < 0.005);
  CHECK(std::abs(counts[3] / double(draws) - 0.5) < 0.005);
  CHECK(std::abs(counts[4] / double(draws) - 0.3) < 0.005);
}

TEST_CASE("order statistic gap means, closed forms") {
  auto gaps = ServiceDist::exponential(1.0).order_stat_gap_means(3);
  CHECK(gaps[0] == doctest::Approx(1.0 / 3));
  CHECK(gaps[1] == doctest::Approx(0.5));
  CHECK(gaps[2] == doctest::Approx(1.0));
  gaps = ServiceDist::deterministic(2.0).order_stat_gap_means(4);
  CHECK(gaps == std::vector<double>{2.0, 0.0, 0.0, 0.0});
  gaps = ServiceDist::uniform(1.0).order_stat_gap_means(3);
  for (double g : gaps) CHECK(g == doctest::Approx(0.25));
}

TEST_CASE("largest exponential order statistic is H_n / mu") {
  for (std::int64_t n : {1, 2, 5, 17}) {
    const auto means = ServiceDist::exponential(2.5).order_stat_means(n);
    double h = 0.0;
    for (std::int64_t k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
    CHECK(means.back() == doctest::Approx(h / 2.5).epsilon(1e-14));
  }
}

TEST_CASE("empirical order statistics match a resampling oracle") {
  const auto service = ServiceDist::empirical({0.3, 1.2, 0.7, 2.5, 0.7, 1.9});
  const std::int64_t n = 4;
  const auto gaps = service.order_stat_gap_means(n);
  for (double g : gaps) CHECK(g >= 0.0);
  double weighted = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) weighted += static_cast<double>(n - j + 1) * gaps[j - 1];
  CHECK(weighted == doctest::Approx(n * service.mean()).epsilon(1e-12));

  const auto means = service.order_stat_means(n);
  Rng rng(99);
  const int draws = 200000;
  std::vector<double> sums(n, 0.0), buf(n);
  for (int r = 0; r < draws; ++r) {
    for (auto& x : buf) x = service.sample(rng);
    std::sort(buf.begin(), buf.end());
    for (std::int64_t j = 0; j < n; ++j) sums[j] += buf[j];
  }
  for (std::int64_t j = 0; j < n; ++j) CHECK(std::abs(sums[j] / draws - means[j]) < 0.01);
}

TEST_CASE("service validation and moments") {
  CHECK_THROWS_AS(ServiceDist::exponential(0.0), InvalidArgument);
  CHECK_THROWS_AS(ServiceDist::uniform(-1.0), InvalidArgument);
  CHECK_THROWS_AS(ServiceDist::empirical({}), InvalidArgument);
  CHECK_THROWS_AS(ServiceDist::empirical({1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(ServiceDist::deterministic(1.0).exponential_rate(), DomainError);
  CHECK(ServiceDist::uniform(3.0).mean() == 1.5);
  CHECK(std::isinf(ServiceDist::exponential(1.0).upper_bound()));
  CHECK(ServiceDist::empirical({0.5, 2.0}).upper_bound() == 2.0);
}

TEST_CASE("queue spec JSON round trip") {
  const std::vector<QueueSpec> specs{
      {RatePattern(2.0, {0.5, 0.1}, {0.25, -0.125}), BatchDist::fixed(3), ServiceDist::exponential(1.5), 4},
      {RatePattern(1.0), BatchDist::empirical({{1, 0.5}, {2, 0.5}}), ServiceDist::uniform(1.0 / 3.0), 0},
      {RatePattern(0.1), BatchDist::divisible_sum({{0, 0.25}, {2, 0.75}}, 5), ServiceDist::deterministic(0.7), 1},
      {RatePattern(1.0), BatchDist::fixed(1), ServiceDist::empirical({0.1, 0.2, 0.30000000000000004}), 0},
  };
  for (const auto& spec : specs) {
    const auto text = to_json(spec).dump();
    CHECK(queue_spec_from_json(nlohmann::json::parse(text)) == spec);
  }
}

TEST_CASE("malformed queue specs are rejected") {
  using nlohmann::json;
  auto parse = [](const char* text) { return queue_spec_from_json(json::parse(text)); };
  CHECK_THROWS_AS(parse(R"({"batch":{"kind":"fixed","n":2},"service":{"kind":"exponential","mu":1}})"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse(R"({"rate":{"base":1},"batch":{"kind":"poisson"},"service":{"kind":"exponential","mu":1}})"),
                  InvalidArgument);
  CHECK_THROWS_AS(
      parse(R"({"rate":{"base":1},"batch":{"kind":"fixed","n":2},"service":{"kind":"exponential","mu":1},"q0":-1})"),
      InvalidArgument);
  CHECK_THROWS_AS(parse(R"({"rate":{"base":1},"batch":{"kind":"empirical","pmf":3},"service":{"kind":"uniform","b":1}})"),
                  InvalidArgument);
  CHECK_NOTHROW(parse(R"({"rate":{"base":1},"batch":{"kind":"fixed","n":2},"service":{"kind":"exponential","mu":1}})"));
}
