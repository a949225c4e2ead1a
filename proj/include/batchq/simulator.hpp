#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "batchq/model.hpp"

namespace batchq::sim {

// How the entities of each batch are split across sub-queues.
//   none        no sub-queues
//   identical   draw position i of a batch goes to sub-queue i; there are
//               max batch size sub-queues
//   order_stat  the i-th smallest service time goes to sub-queue i; batches
//               larger than k are a configuration error
//   modulo_cap  the i-th smallest service time goes to sub-queue i mod k
// Initial Q0 entities never belong to a sub-queue.
struct SubqueueMode {
  enum class Kind { none, identical, order_stat, modulo_cap };
  Kind kind = Kind::none;
  std::int64_t k = 0;

  static SubqueueMode none() { return {}; }
  static SubqueueMode identical() { return {Kind::identical, 0}; }
  static SubqueueMode order_stat(std::int64_t k) { return {Kind::order_stat, k}; }
  static SubqueueMode modulo_cap(std::int64_t k) { return {Kind::modulo_cap, k}; }

  bool operator==(const SubqueueMode&) const = default;
};

// Number of sub-queues produced by `mode` for `batch`; 0 for none.
std::int64_t subqueue_count(const SubqueueMode& mode, const BatchDist& batch);

struct SimConfig {
  QueueSpec spec;
  double horizon = 0.0;
  std::vector<double> snapshot_times; // sorted, within [0, horizon]
  std::int64_t replications = 1;
  std::uint64_t base_seed = 0;
  SubqueueMode subqueues;
  unsigned jobs = 0; // 0 = hardware concurrency
};

// Throws InvalidArgument for malformed fields and ConfigError when the
// routing mode cannot serve the batch law.
void validate_config(const SimConfig& config);

struct Snapshot {
  double time = 0.0;
  std::int64_t count = 0;
  std::vector<std::int64_t> subqueue_counts;
};

// One sample path. Arrival epochs by thinning against rate_bound(); an
// entity admitted at s with service S is counted at t iff s <= t < s + S.
std::vector<Snapshot> simulate_one(const QueueSpec& spec, double horizon, std::span<const double> snapshot_times,
                                   std::uint64_t seed, const SubqueueMode& subqueues = {});

// Raw per-replication counts; replication r used seed base_seed + r.
struct ReplicationData {
  std::vector<double> times;
  std::int64_t replications = 0;
  std::int64_t subqueues = 0;
  std::vector<std::int64_t> totals;    // [r * T + s]
  std::vector<std::int64_t> sub_counts; // [(r * T + s) * K + i]

  std::vector<double> totals_at(std::size_t snapshot) const;
  std::vector<double> subqueue_at(std::size_t snapshot, std::int64_t queue) const;
};

// Replications run on a worker pool; the result does not depend on the
// number of workers.
ReplicationData run_replications(const SimConfig& config);

struct SnapshotStats {
  double t;
  double mean;
  double variance;
  double se;
  std::int64_t count;
};

struct SubqueueStats {
  double t;
  std::int64_t queue; // 1-based
  double mean;
  double variance;
  double se;
};

struct PairStats {
  double t;
  std::int64_t i; // 1-based
  std::int64_t j;
  double covariance;
  double correlation;
  double correlation_se;
};

struct RepSummary {
  std::vector<SnapshotStats> snapshots;
  std::vector<SubqueueStats> subqueues;
  std::vector<PairStats> pairs;
  std::int64_t replications = 0;
  std::uint64_t base_seed = 0;
  // False with a single replication: variances and standard errors are NaN.
  bool se_defined = false;
};

RepSummary summarize(const ReplicationData& data, std::uint64_t base_seed);
RepSummary replicate(const SimConfig& config);

struct MgfEstimate {
  double t;
  double estimate;
  double se; // delete-one jackknife
};

inline constexpr double kMaxMgfTheta = 1.0;

// Sample mean of exp(theta Q_t) per snapshot. Throws DomainError for
// theta > kMaxMgfTheta.
std::vector<MgfEstimate> transient_mgf_estimate(const ReplicationData& data, double theta);
std::vector<MgfEstimate> transient_mgf_estimate(const SimConfig& config, double theta);

// `t,mean,variance,se,count`
void write_summary_csv(const RepSummary& summary, std::ostream& out);
// `t,i,j,cov,corr`
void write_pairs_csv(const RepSummary& summary, std::ostream& out);
// `t,i,mean,variance,se`
void write_subqueue_csv(const RepSummary& summary, std::ostream& out);

} // namespace batchq::sim
