#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "batchq/csv.hpp"
#include "batchq/errors.hpp"
#include "batchq/model_json.hpp"
#include "batchq/routing.hpp"
#include "batchq/stats.hpp"
#include "commands.hpp"

namespace batchq::cli {

using nlohmann::json;

void to_json(json& doc, const CompareOptions& o) {
  doc = {{"spec", batchq::to_json(o.spec)},
         {"t", number_to_json(o.t)},
         {"reps", o.reps},
         {"seed", o.seed},
         {"threshold", o.threshold},
         {"thetas", o.thetas},
         {"jobs", o.jobs},
         {"out", o.out}};
  doc["reference"] = o.reference ? batchq::to_json(*o.reference) : json(nullptr);
}

CompareOptions compare_options_from_json(const json& doc) {
  CompareOptions o{.spec = queue_spec_from_json(doc.at("spec"))};
  o.t = number_from_json(doc.at("t"));
  o.reps = doc.at("reps").get<std::int64_t>();
  o.seed = doc.at("seed").get<std::uint64_t>();
  o.threshold = doc.at("threshold").get<double>();
  o.thetas = doc.at("thetas").get<std::vector<double>>();
  o.jobs = doc.at("jobs").get<unsigned>();
  o.out = doc.at("out").get<std::string>();
  o.reference = doc.at("reference").is_null() ? std::nullopt : std::optional(queue_spec_from_json(doc.at("reference")));
  return o;
}

namespace {

// Transient closed forms exist only for exponential service; a general-service
// queue can be compared at stationarity, or at t >= sup S from an empty start.
void check_supported(const QueueSpec& spec, double t) {
  if (spec.service.is_exponential() || std::isinf(t)) return;
  if (spec.q0 > 0) {
    throw InvalidArgument("compare: general service with q0 > 0 has no transient closed form; use --t inf");
  }
  if (t < spec.service.upper_bound()) {
    throw InvalidArgument(fmt::format("compare: general service needs --t inf or --t >= {}", spec.service.upper_bound()));
  }
}

double z_score(double simulated, double analytic, double se) {
  const double diff = simulated - analytic;
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

} // namespace

RunResult run_compare(const CompareOptions& o, Streams io) {
  if (o.reps < 2) throw InvalidArgument("--reps must be at least 2");
  if (!(o.threshold > 0.0)) throw InvalidArgument("--z-threshold must be positive");
  if (std::isnan(o.t) || o.t < 0.0) throw InvalidArgument("--t must be non-negative or inf");
  const QueueSpec& reference = o.reference ? *o.reference : o.spec;
  check_supported(o.spec, o.t);
  check_supported(reference, o.t);
  check_theta_cap(o.thetas);
  for (double theta : o.thetas) {
    if (theta > sim::kMaxMgfTheta) throw DomainError(fmt::format("compare: theta must be <= {}", sim::kMaxMgfTheta));
  }

  double horizon = o.t;
  if (std::isinf(o.t)) {
    if (!o.spec.rate.stationary()) throw DomainError("steady state requires a stationary arrival rate");
    horizon = routing::steady_horizon(o.spec.service, std::max<std::int64_t>(o.spec.q0, 1));
  }
  const auto expected = analytic_moments(reference, o.t);

  sim::SimConfig config{o.spec, horizon, {horizon}, o.reps, o.seed, sim::SubqueueMode::none(), o.jobs};
  const auto data = sim::run_replications(config);
  const auto totals = data.totals_at(0);
  const auto m = stats::mean_estimate(totals);
  const auto v = stats::variance_estimate(totals);

  std::ostringstream sink;
  csv::Writer w(sink, {"quantity", "theta", "t", "analytic", "simulated", "se", "z"});
  double max_abs_z = 0.0;
  auto emit = [&](const char* quantity, csv::Cell theta, double a, double s, double se) {
    const double z = z_score(s, a, se);
    max_abs_z = std::max(max_abs_z, std::abs(z));
    w.row({quantity, std::move(theta), o.t, a, s, se, z});
  };
  emit("mean", "", expected.mean, m.mean, m.se);
  emit("variance", "", expected.variance, v.variance, v.se);
  for (double theta : o.thetas) {
    double a = 0.0;
    try {
      a = analytic_mgf(reference, theta, o.t);
    } catch (const DomainError& e) {
      io.err << "note: skipping mgf at theta=" << theta << ": " << e.what() << '\n';
      continue;
    }
    const auto est = sim::transient_mgf_estimate(data, theta).front();
    emit("mgf", theta, a, est.estimate, est.se);
  }

  RunResult result;
  result.seed = o.seed;
  if (emit_output(o.out, sink.str(), io.out)) result.outputs.push_back(o.out);
  const bool pass = max_abs_z < o.threshold;
  io.err << fmt::format("compare: max |z| = {:.3f}, threshold {} -> {}\n", max_abs_z, o.threshold,
                        pass ? "pass" : "FAIL");
  result.exit_code = pass ? 0 : 1;
  return result;
}

} // namespace batchq::cli
