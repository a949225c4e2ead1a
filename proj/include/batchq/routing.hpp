#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "batchq/model.hpp"

namespace batchq::routing {

// Choose P{B = j}, j = 1..k, so that order-statistic sub-queues 1..k of an
// M^B/G/inf queue all have the same steady-state law.
struct RoutingProblem {
  std::int64_t k;
  ServiceDist service;
  double lambda;
};

inline constexpr double kDegenerateDenominator = 1e-12;
inline constexpr double kSingularRelDet = 1e-12;
inline constexpr double kFeasibilityTol = 1e-12;

struct RoutingSolution {
  std::vector<double> phi; // P{B = j}, j = 1..k-1
  double phi_k = 0.0;      // 1 - sum(phi)
  Eigen::MatrixXd matrix_m;
  bool feasible = false;
  double sherman_morrison = 0.0; // 1 + v^T M^{-1} v
  double residual = 0.0;         // ||(M + v v^T) phi - v||_inf

  // (phi_1, ..., phi_{k-1}, phi_k)
  std::vector<double> batch_pmf() const;
};

// E[S_(i,j)] for 1 <= i <= j <= k, stored as table[j-1][i-1].
std::vector<std::vector<double>> order_stat_table(const ServiceDist& service, std::int64_t k);

// M_{i,j} = E[S_(i,j)] / (E[S_(k,k)] - E[S_(i,k)]) for i <= j, 0 below the
// diagonal. Throws DegenerateServiceError when a denominator is <= 1e-12.
Eigen::MatrixXd build_matrix(const RoutingProblem& problem);

// Solves (M + v v^T) phi = v, v = ones, by LU with partial pivoting. Throws
// SingularSystemError when |det| is below 1e-12 relative to the product of
// row norms.
RoutingSolution solve_phi(const RoutingProblem& problem);

// E[Q_i] = sum_{j=i}^{k-1} lambda phi_j E[S_(i,j)] + lambda phi_k E[S_(i,k)].
std::vector<double> subqueue_means(const RoutingProblem& problem, const RoutingSolution& solution);

struct SimBudget {
  std::int64_t replications = 100000;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
};

struct SubqueueCheck {
  std::int64_t queue; // 1-based
  double analytic_mean;
  double sample_mean;
  double sample_variance;
  double mean_se;
  double variance_se;
  // (variance - mean) / se of that difference: Poisson dispersion check.
  double dispersion_z;
};

struct EqualizationReport {
  bool verified = false; // false when the solution is infeasible
  double horizon = 0.0;
  double analytic_spread = 0.0; // max_i E[Q_i] - min_i E[Q_i]
  std::vector<SubqueueCheck> subqueues;
  // Largest |mean_i - mean_j| / se(Q_i - Q_j) over sub-queue pairs, using
  // the paired per-replication differences.
  double max_pairwise_z = 0.0;
};

// Simulates M^B/G/inf with the solved batch law and modulo-cap routing, at a
// horizon where the system has reached steady state.
EqualizationReport verify_equalization(const RoutingProblem& problem, const RoutingSolution& solution,
                                       const SimBudget& budget);

// Snapshot time used by verify_equalization.
double steady_horizon(const ServiceDist& service, std::int64_t k);

// `i,phi_i` rows followed by `feasible,<bool>`.
void write_solution_csv(const RoutingSolution& solution, std::ostream& out);
// Matrix rows with header `i,m_1,...,m_{k-1}`.
void write_matrix_csv(const RoutingSolution& solution, std::ostream& out);

} // namespace batchq::routing
