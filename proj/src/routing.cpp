#include "batchq/routing.hpp"

#include <algorithm>
#include <cmath>

#include "batchq/csv.hpp"
#include "batchq/errors.hpp"
#include "batchq/simulator.hpp"
#include "batchq/stats.hpp"

namespace batchq::routing {

namespace {

void validate_problem(const RoutingProblem& problem) {
  if (problem.k < 2) throw InvalidArgument("routing needs k >= 2");
  if (!(problem.lambda > 0.0) || !std::isfinite(problem.lambda)) throw InvalidArgument("lambda must be positive");
}

} // namespace

std::vector<double> RoutingSolution::batch_pmf() const {
  std::vector<double> out(phi);
  out.push_back(phi_k);
  return out;
}

std::vector<std::vector<double>> order_stat_table(const ServiceDist& service, std::int64_t k) {
  std::vector<std::vector<double>> table;
  table.reserve(static_cast<std::size_t>(k));
  for (std::int64_t j = 1; j <= k; ++j) table.push_back(service.order_stat_means(j));
  return table;
}

Eigen::MatrixXd build_matrix(const RoutingProblem& problem) {
  validate_problem(problem);
  const std::int64_t k = problem.k;
  const auto table = order_stat_table(problem.service, k);
  const auto es = [&](std::int64_t i, std::int64_t j) {
    return table[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)];
  };
  const auto dim = static_cast<Eigen::Index>(k - 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t i = 1; i < k; ++i) {
    const double denom = es(k, k) - es(i, k);
    if (!(denom > kDegenerateDenominator)) {
      throw DegenerateServiceError("routing: E[S_(k,k)] - E[S_(i,k)] vanishes; order statistics coincide");
    }
    for (std::int64_t j = i; j < k; ++j) m(i - 1, j - 1) = es(i, j) / denom;
  }
  return m;
}

RoutingSolution solve_phi(const RoutingProblem& problem) {
  RoutingSolution out;
  out.matrix_m = build_matrix(problem);
  const Eigen::Index dim = out.matrix_m.rows();
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(dim);
  const Eigen::MatrixXd a = out.matrix_m + v * v.transpose();

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double scale = 1.0;
  for (Eigen::Index r = 0; r < dim; ++r) scale *= a.row(r).norm();
  if (!(std::abs(lu.determinant()) > kSingularRelDet * scale)) {
    throw SingularSystemError("routing: M + v v^T is singular");
  }
  const Eigen::VectorXd phi = lu.solve(v);
  out.residual = (a * phi - v).lpNorm<Eigen::Infinity>();
  out.sherman_morrison =
      1.0 + v.dot(out.matrix_m.triangularView<Eigen::Upper>().solve(v));

  out.phi.assign(phi.data(), phi.data() + dim);
  out.phi_k = 1.0 - phi.sum();
  out.feasible = out.phi_k >= -kFeasibilityTol && out.phi_k <= 1.0 + kFeasibilityTol;
  for (double p : out.phi) out.feasible = out.feasible && p >= -kFeasibilityTol && p <= 1.0 + kFeasibilityTol;
  return out;
}

std::vector<double> subqueue_means(const RoutingProblem& problem, const RoutingSolution& solution) {
  validate_problem(problem);
  const std::int64_t k = problem.k;
  const auto table = order_stat_table(problem.service, k);
  std::vector<double> out;
  for (std::int64_t i = 1; i <= k; ++i) {
    double mean = 0.0;
    for (std::int64_t j = i; j < k; ++j) {
      mean += problem.lambda * solution.phi[static_cast<std::size_t>(j - 1)] *
              table[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)];
    }
    mean += problem.lambda * solution.phi_k * table[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)];
    out.push_back(mean);
  }
  return out;
}

double steady_horizon(const ServiceDist& service, std::int64_t k) {
  if (service.is_exponential()) {
    // P{S_(k,k) > t} <= k e^{-mu t}; the residual transient is below e^{-36}.
    return (36.0 + std::log(static_cast<double>(k))) / service.exponential_rate();
  }
  // Every entity alive at t >= sup S arrived after time 0: exact steady state.
  return service.upper_bound();
}

EqualizationReport verify_equalization(const RoutingProblem& problem, const RoutingSolution& solution,
                                       const SimBudget& budget) {
  EqualizationReport report;
  const auto analytic = subqueue_means(problem, solution);
  const auto [lo, hi] = std::minmax_element(analytic.begin(), analytic.end());
  report.analytic_spread = *hi - *lo;
  if (!solution.feasible) return report;

  std::vector<SizeProb> pmf;
  const auto probs = solution.batch_pmf();
  for (std::size_t j = 0; j < probs.size(); ++j) {
    pmf.push_back({static_cast<std::int64_t>(j + 1), std::clamp(probs[j], 0.0, 1.0)});
  }
  double total = 0.0;
  for (const auto& e : pmf) total += e.prob;
  for (auto& e : pmf) e.prob /= total;

  report.horizon = steady_horizon(problem.service, problem.k);
  sim::SimConfig config{QueueSpec{RatePattern(problem.lambda), BatchDist::empirical(pmf), problem.service, 0},
                        report.horizon,
                        {report.horizon},
                        budget.replications,
                        budget.seed,
                        sim::SubqueueMode::modulo_cap(problem.k),
                        budget.jobs};
  const auto data = sim::run_replications(config);

  std::vector<std::vector<double>> columns;
  for (std::int64_t q = 0; q < problem.k; ++q) {
    columns.push_back(data.subqueue_at(0, q));
    const auto& xs = columns.back();
    const auto m = stats::mean_estimate(xs);
    const auto v = stats::variance_estimate(xs);
    // Influence function of s^2 - xbar.
    std::vector<double> psi(xs.size());
    for (std::size_t r = 0; r < xs.size(); ++r) {
      const double d = xs[r] - m.mean;
      psi[r] = d * d - v.variance - d;
    }
    const auto psi_est = stats::mean_estimate(psi);
    report.subqueues.push_back({q + 1, analytic[static_cast<std::size_t>(q)], m.mean, v.variance, m.se, v.se,
                                (v.variance - m.mean) / std::sqrt(psi_est.variance / static_cast<double>(xs.size()))});
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      std::vector<double> diff(columns[i].size());
      for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = columns[i][r] - columns[j][r];
      const auto d = stats::mean_estimate(diff);
      if (d.se > 0.0) report.max_pairwise_z = std::max(report.max_pairwise_z, std::abs(d.mean) / d.se);
    }
  }
  report.verified = true;
  return report;
}

void write_solution_csv(const RoutingSolution& solution, std::ostream& out) {
  csv::Writer writer(out, {"i", "phi_i"});
  const auto probs = solution.batch_pmf();
  for (std::size_t j = 0; j < probs.size(); ++j) writer.row({static_cast<std::int64_t>(j + 1), probs[j]});
  writer.row({"feasible", solution.feasible});
}

void write_matrix_csv(const RoutingSolution& solution, std::ostream& out) {
  std::vector<std::string> header{"i"};
  for (Eigen::Index c = 0; c < solution.matrix_m.cols(); ++c) header.push_back("m_" + std::to_string(c + 1));
  csv::Writer writer(out, header);
  for (Eigen::Index r = 0; r < solution.matrix_m.rows(); ++r) {
    std::vector<csv::Cell> row{static_cast<std::int64_t>(r + 1)};
    for (Eigen::Index c = 0; c < solution.matrix_m.cols(); ++c) row.emplace_back(solution.matrix_m(r, c));
    writer.row(row);
  }
}

} // namespace batchq::routing
