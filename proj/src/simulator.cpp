#include "batchq/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "batchq/csv.hpp"
#include "batchq/errors.hpp"
#include "batchq/random.hpp"
#include "batchq/stats.hpp"

namespace batchq::sim {

using Kind = SubqueueMode::Kind;

std::int64_t subqueue_count(const SubqueueMode& mode, const BatchDist& batch) {
  switch (mode.kind) {
  case Kind::none: return 0;
  case Kind::identical: return batch.max_size();
  case Kind::order_stat:
  case Kind::modulo_cap: return mode.k;
  }
  return 0;
}

void validate_config(const SimConfig& config) {
  validate(config.spec);
  if (!(config.horizon >= 0.0) || !std::isfinite(config.horizon)) {
    throw InvalidArgument("horizon must be finite and >= 0");
  }
  if (config.snapshot_times.empty()) throw InvalidArgument("at least one snapshot time is required");
  if (!std::is_sorted(config.snapshot_times.begin(), config.snapshot_times.end())) {
    throw InvalidArgument("snapshot times must be sorted");
  }
  if (!(config.snapshot_times.front() >= 0.0) || !(config.snapshot_times.back() <= config.horizon)) {
    throw InvalidArgument("snapshot times must lie in [0, horizon]");
  }
  if (config.replications < 1) throw InvalidArgument("replications must be >= 1");
  const auto& mode = config.subqueues;
  if (mode.kind == Kind::order_stat || mode.kind == Kind::modulo_cap) {
    if (mode.k < 1) throw InvalidArgument("sub-queue routing needs k >= 1");
  }
  if (mode.kind == Kind::order_stat && config.spec.batch.max_size() > mode.k) {
    throw ConfigError("order-statistic routing with k = " + std::to_string(mode.k) +
                      " cannot place batches of size up to " + std::to_string(config.spec.batch.max_size()));
  }
}

namespace {

// Reusable scratch state for sample paths of one configuration.
class PathSimulator {
public:
  PathSimulator(const QueueSpec& spec, double horizon, std::span<const double> times, const SubqueueMode& mode)
      : spec_(spec), times_(times), mode_(mode), queues_(subqueue_count(mode, spec.batch)),
        end_time_(std::min(horizon, times.empty() ? 0.0 : times.back())), bound_(spec.rate.bound()),
        stationary_(spec.rate.stationary()), total_diff_(times.size() + 1),
        sub_diff_(static_cast<std::size_t>(queues_) * (times.size() + 1)) {}

  std::int64_t queues() const { return queues_; }

  // Writes T totals and T*K sub-queue counts.
  void run(std::uint64_t seed, std::int64_t* totals, std::int64_t* subs) {
    std::fill(total_diff_.begin(), total_diff_.end(), 0);
    std::fill(sub_diff_.begin(), sub_diff_.end(), 0);
    Rng rng(seed);

    for (std::int64_t i = 0; i < spec_.q0; ++i) add(0.0, spec_.service.sample(rng), -1);

    double t = 0.0;
    while (true) {
      t += rng.exponential(bound_);
      if (t > end_time_) break;
      if (!stationary_ && rng.uniform() * bound_ >= spec_.rate.at(t)) continue;
      admit_batch(t, rng);
    }

    const std::size_t count = times_.size();
    std::int64_t running = 0;
    for (std::size_t s = 0; s < count; ++s) {
      running += total_diff_[s];
      totals[s] = running;
    }
    const std::size_t k = static_cast<std::size_t>(queues_);
    for (std::size_t q = 0; q < k; ++q) {
      running = 0;
      for (std::size_t s = 0; s < count; ++s) {
        running += sub_diff_[q * (count + 1) + s];
        subs[s * k + q] = running;
      }
    }
  }

private:
  void admit_batch(double t, Rng& rng) {
    const std::int64_t size = spec_.batch.sample(rng);
    draws_.resize(static_cast<std::size_t>(size));
    for (std::int64_t i = 0; i < size; ++i) draws_[static_cast<std::size_t>(i)] = {spec_.service.sample(rng), i};

    switch (mode_.kind) {
    case Kind::none:
      for (const auto& d : draws_) add(t, t + d.service, -1);
      break;
    case Kind::identical:
      for (const auto& d : draws_) add(t, t + d.service, d.position);
      break;
    case Kind::order_stat:
    case Kind::modulo_cap:
      // Ties (deterministic service) keep draw order.
      std::sort(draws_.begin(), draws_.end(), [](const Draw& a, const Draw& b) {
        return a.service < b.service || (a.service == b.service && a.position < b.position);
      });
      for (std::size_t i = 0; i < draws_.size(); ++i) {
        const auto rank = static_cast<std::int64_t>(i);
        add(t, t + draws_[i].service, mode_.kind == Kind::order_stat ? rank : rank % mode_.k);
      }
      break;
    }
  }

  // Snapshots in [lo, hi) satisfy start <= t < end.
  void add(double start, double end, std::int64_t queue) {
    const auto lo = static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), start) - times_.begin());
    const auto hi = static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), end) - times_.begin());
    if (lo >= hi) return;
    ++total_diff_[lo];
    --total_diff_[hi];
    if (queue >= 0) {
      const std::size_t row = static_cast<std::size_t>(queue) * (times_.size() + 1);
      ++sub_diff_[row + lo];
      --sub_diff_[row + hi];
    }
  }

  struct Draw {
    double service;
    std::int64_t position;
  };

  const QueueSpec& spec_;
  std::span<const double> times_;
  SubqueueMode mode_;
  std::int64_t queues_;
  double end_time_;
  double bound_;
  bool stationary_;
  std::vector<std::int64_t> total_diff_;
  std::vector<std::int64_t> sub_diff_;
  std::vector<Draw> draws_;
};

} // namespace

std::vector<Snapshot> simulate_one(const QueueSpec& spec, double horizon, std::span<const double> snapshot_times,
                                   std::uint64_t seed, const SubqueueMode& subqueues) {
  SimConfig config{spec, horizon, {snapshot_times.begin(), snapshot_times.end()}, 1, seed, subqueues, 1};
  validate_config(config);
  PathSimulator path(spec, horizon, config.snapshot_times, subqueues);
  const std::size_t count = snapshot_times.size();
  const auto k = static_cast<std::size_t>(path.queues());
  std::vector<std::int64_t> totals(count), subs(count * k);
  path.run(seed, totals.data(), subs.data());
  std::vector<Snapshot> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    out[s].time = snapshot_times[s];
    out[s].count = totals[s];
    out[s].subqueue_counts.assign(subs.begin() + static_cast<std::ptrdiff_t>(s * k),
                                  subs.begin() + static_cast<std::ptrdiff_t>((s + 1) * k));
  }
  return out;
}

std::vector<double> ReplicationData::totals_at(std::size_t snapshot) const {
  const std::size_t count = times.size();
  std::vector<double> out(static_cast<std::size_t>(replications));
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = static_cast<double>(totals[r * count + snapshot]);
  return out;
}

std::vector<double> ReplicationData::subqueue_at(std::size_t snapshot, std::int64_t queue) const {
  const std::size_t count = times.size();
  const auto k = static_cast<std::size_t>(subqueues);
  std::vector<double> out(static_cast<std::size_t>(replications));
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = static_cast<double>(sub_counts[(r * count + snapshot) * k + static_cast<std::size_t>(queue)]);
  }
  return out;
}

ReplicationData run_replications(const SimConfig& config) {
  validate_config(config);
  ReplicationData data;
  data.times = config.snapshot_times;
  data.replications = config.replications;
  data.subqueues = subqueue_count(config.subqueues, config.spec.batch);
  const std::size_t count = data.times.size();
  const auto k = static_cast<std::size_t>(data.subqueues);
  const auto reps = static_cast<std::size_t>(config.replications);
  data.totals.resize(reps * count);
  data.sub_counts.resize(reps * count * k);

  unsigned workers = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));
  constexpr std::size_t kChunk = 256;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      PathSimulator path(config.spec, config.horizon, data.times, config.subqueues);
      while (true) {
        const std::size_t begin = next.fetch_add(kChunk);
        if (begin >= reps) break;
        const std::size_t end = std::min(reps, begin + kChunk);
        for (std::size_t r = begin; r < end; ++r) {
          path.run(config.base_seed + r, data.totals.data() + r * count, data.sub_counts.data() + r * count * k);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(reps);
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return data;
}

RepSummary summarize(const ReplicationData& data, std::uint64_t base_seed) {
  RepSummary out;
  out.replications = data.replications;
  out.base_seed = base_seed;
  out.se_defined = data.replications >= 2;
  for (std::size_t s = 0; s < data.times.size(); ++s) {
    const double t = data.times[s];
    const auto totals = data.totals_at(s);
    const auto est = stats::mean_estimate(totals);
    out.snapshots.push_back({t, est.mean, est.variance, est.se, est.count});

    std::vector<std::vector<double>> columns;
    for (std::int64_t q = 0; q < data.subqueues; ++q) {
      columns.push_back(data.subqueue_at(s, q));
      const auto sq = stats::mean_estimate(columns.back());
      out.subqueues.push_back({t, q + 1, sq.mean, sq.variance, sq.se});
    }
    for (std::int64_t i = 0; i < data.subqueues; ++i) {
      for (std::int64_t j = i + 1; j < data.subqueues; ++j) {
        const auto c = stats::correlation_estimate(columns[static_cast<std::size_t>(i)],
                                                   columns[static_cast<std::size_t>(j)]);
        out.pairs.push_back({t, i + 1, j + 1, c.covariance, c.correlation, c.correlation_se});
      }
    }
  }
  return out;
}

RepSummary replicate(const SimConfig& config) { return summarize(run_replications(config), config.base_seed); }

std::vector<MgfEstimate> transient_mgf_estimate(const ReplicationData& data, double theta) {
  if (theta > kMaxMgfTheta) throw DomainError("transient_mgf_estimate: theta must be <= 1");
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  std::vector<MgfEstimate> out;
  for (std::size_t s = 0; s < data.times.size(); ++s) {
    auto values = data.totals_at(s);
    for (double& v : values) v = std::exp(theta * v);
    const auto est = stats::jackknife_mean(values);
    out.push_back({data.times[s], est.mean, est.se});
  }
  return out;
}

std::vector<MgfEstimate> transient_mgf_estimate(const SimConfig& config, double theta) {
  if (theta > kMaxMgfTheta) throw DomainError("transient_mgf_estimate: theta must be <= 1");
  return transient_mgf_estimate(run_replications(config), theta);
}

void write_summary_csv(const RepSummary& summary, std::ostream& out) {
  csv::Writer writer(out, {"t", "mean", "variance", "se", "count"});
  for (const auto& s : summary.snapshots) writer.row({s.t, s.mean, s.variance, s.se, s.count});
}

void write_pairs_csv(const RepSummary& summary, std::ostream& out) {
  csv::Writer writer(out, {"t", "i", "j", "cov", "corr"});
  for (const auto& p : summary.pairs) writer.row({p.t, p.i, p.j, p.covariance, p.correlation});
}

void write_subqueue_csv(const RepSummary& summary, std::ostream& out) {
  csv::Writer writer(out, {"t", "i", "mean", "variance", "se"});
  for (const auto& q : summary.subqueues) writer.row({q.t, q.queue, q.mean, q.variance, q.se});
}

} // namespace batchq::sim
