#include <doctest.h>

#include <cmath>
#include <sstream>

#include "batchq/errors.hpp"
#include "batchq/routing.hpp"

using namespace batchq;
using namespace batchq::routing;

TEST_CASE("routing matrix") {
  auto m = build_matrix({2, ServiceDist::exponential(1.0), 1.0});
  REQUIRE(m.rows() == 1);
  CHECK(m(0, 0) == doctest::Approx(1.0));
  m = build_matrix({3, ServiceDist::exponential(1.0), 1.0});
  REQUIRE(m.rows() == 2);
  CHECK(m(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(m(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(m(1, 0) == 0.0);
  CHECK(m(1, 1) == doctest::Approx(1.5));
  CHECK_THROWS_AS(build_matrix({3, ServiceDist::deterministic(1.0), 1.0}), DegenerateServiceError);
  CHECK_THROWS_AS(build_matrix({1, ServiceDist::exponential(1.0), 1.0}), InvalidArgument);
}

TEST_CASE("routing solution, worked cases") {
  auto sol = solve_phi({2, ServiceDist::exponential(3.0), 1.0});
  CHECK(sol.phi[0] == doctest::Approx(0.5));
  CHECK(sol.phi_k == doctest::Approx(0.5));
  CHECK(sol.feasible);

  sol = solve_phi({3, ServiceDist::exponential(1.0), 1.0});
  CHECK(sol.phi[0] == doctest::Approx(7.0 / 17.0).epsilon(1e-14));
  CHECK(sol.phi[1] == doctest::Approx(4.0 / 17.0).epsilon(1e-14));
  CHECK(sol.phi_k == doctest::Approx(6.0 / 17.0).epsilon(1e-14));
  CHECK(sol.residual < 1e-10);
  CHECK(sol.feasible);
  // 1 + v^T M^{-1} v with M^{-1} = [[3/2, -1/3], [0, 2/3]]
  CHECK(sol.sherman_morrison == doctest::Approx(1.0 + 1.5 - 1.0 / 3.0 + 2.0 / 3.0));

  sol = solve_phi({2, ServiceDist::uniform(1.0), 1.0});
  CHECK(sol.phi[0] == doctest::Approx(0.4));
}

TEST_CASE("k = 2 solution matches the scalar formula") {
  for (const auto& service : {ServiceDist::exponential(0.7), ServiceDist::uniform(3.0),
                              ServiceDist::empirical({0.5, 1.0, 4.0, 4.5})}) {
    const auto es = service.order_stat_means(2);
    const double expected = (es[1] - es[0]) / (service.mean() + es[1] - es[0]);
    CHECK(solve_phi({2, service, 1.0}).phi[0] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("feasible solutions equalise sub-queue means") {
  for (std::int64_t k = 2; k <= 8; ++k) {
    for (const auto& service : {ServiceDist::exponential(1.3), ServiceDist::uniform(2.0)}) {
      const RoutingProblem problem{k, service, 2.2};
      const auto sol = solve_phi(problem);
      CHECK(sol.residual < 1e-10);
      if (!sol.feasible) continue;
      double total = sol.phi_k;
      for (double p : sol.phi) total += p;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
      const auto means = subqueue_means(problem, sol);
      for (double m : means) CHECK(std::abs(m - means.back()) < 1e-10);
    }
  }
}

TEST_CASE("infeasible solutions skip verification") {
  RoutingSolution sol;
  sol.phi = {1.2};
  sol.phi_k = -0.2;
  sol.feasible = false;
  const auto report = verify_equalization({2, ServiceDist::exponential(1.0), 1.0}, sol, {100, 1, 1});
  CHECK_FALSE(report.verified);
  CHECK(report.subqueues.empty());
}

TEST_CASE("equalisation holds in simulation") {
  const RoutingProblem problem{2, ServiceDist::exponential(1.0), 1.0};
  const auto sol = solve_phi(problem);
  const auto means = subqueue_means(problem, sol);
  CHECK(means[0] == doctest::Approx(0.75));
  CHECK(means[1] == doctest::Approx(0.75));
  const auto report = verify_equalization(problem, sol, {20000, 3, 0});
  CHECK(report.verified);
  CHECK(report.analytic_spread < 1e-12);
  CHECK(report.max_pairwise_z < 4.0);
  for (const auto& q : report.subqueues) {
    CHECK(std::abs(q.sample_mean - 0.75) < 4 * q.mean_se);
    CHECK(std::abs(q.dispersion_z) < 4.0);
  }
}

TEST_CASE("steady horizon") {
  CHECK(steady_horizon(ServiceDist::uniform(2.0), 3) == 2.0);
  CHECK(steady_horizon(ServiceDist::exponential(2.0), 1) == doctest::Approx(18.0));
}

TEST_CASE("solution CSV") {
  std::ostringstream out;
  write_solution_csv(solve_phi({2, ServiceDist::exponential(1.0), 1.0}), out);
  CHECK(out.str() == "i,phi_i\n1,0.5\n2,0.5\nfeasible,true\n");
  std::ostringstream matrix;
  write_matrix_csv(solve_phi({3, ServiceDist::exponential(1.0), 1.0}), matrix);
  CHECK(matrix.str().rfind("i,m_1,m_2\n1,", 0) == 0);
}
