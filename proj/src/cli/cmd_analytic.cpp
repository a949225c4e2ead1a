#include <cmath>
#include <sstream>

#include "batchq/analytic.hpp"
#include "batchq/csv.hpp"
#include "batchq/errors.hpp"
#include "batchq/model_json.hpp"
#include "commands.hpp"

namespace batchq::cli {

using nlohmann::json;

void to_json(json& doc, const AnalyticOptions& o) {
  doc = {{"spec", batchq::to_json(o.spec)},
         {"what", o.what},
         {"theta_grid", grid_to_json(o.theta_grid)},
         {"t_grid", grid_to_json(o.t_grid)},
         {"jmax", o.jmax},
         {"kmax", o.kmax},
         {"out", o.out}};
  doc["n"] = o.n ? json(*o.n) : json(nullptr);
}

AnalyticOptions analytic_options_from_json(const json& doc) {
  AnalyticOptions o{queue_spec_from_json(doc.at("spec")), doc.at("what").get<std::string>()};
  o.theta_grid = grid_from_json(doc.at("theta_grid"));
  o.t_grid = grid_from_json(doc.at("t_grid"));
  o.jmax = doc.at("jmax").get<std::int64_t>();
  o.kmax = doc.at("kmax").get<int>();
  o.out = doc.at("out").get<std::string>();
  o.n = doc.at("n").is_null() ? std::nullopt : std::optional(doc.at("n").get<std::int64_t>());
  return o;
}

namespace {

void require(const std::vector<double>& grid, const char* flag) {
  if (grid.empty()) throw InvalidArgument(std::string(flag) + " is required for this --what");
}

// Single-class fixed batch under a stationary rate and exponential service.
struct MarkovParams {
  std::int64_t n;
  double lambda;
  double mu;
};

MarkovParams markov_params(const AnalyticOptions& o) {
  if (!o.spec.rate.stationary()) throw DomainError("this quantity needs a stationary arrival rate");
  return {o.spec.batch.fixed_size(), o.spec.rate.base(), o.spec.service.exponential_rate()};
}

void write_moments(const AnalyticOptions& o, std::ostream& out) {
  require(o.t_grid, "--t-grid");
  csv::Writer w(out, {"t", "mean", "variance"});
  for (double t : o.t_grid) {
    const auto m = analytic_moments(o.spec, t);
    w.row({t, m.mean, m.variance});
  }
}

void write_mgf(const AnalyticOptions& o, std::ostream& out) {
  require(o.t_grid, "--t-grid");
  require(o.theta_grid, "--theta-grid");
  check_theta_cap(o.theta_grid);
  csv::Writer w(out, {"t", "theta", "mgf"});
  for (double t : o.t_grid) {
    for (double theta : o.theta_grid) w.row({t, theta, analytic_mgf(o.spec, theta, t)});
  }
}

void write_pmf(const AnalyticOptions& o, Streams io, std::ostream& out) {
  if (o.jmax < 0) throw InvalidArgument("--jmax must be non-negative");
  const auto p = markov_params(o);
  const auto pmf = analytic::steady_pmf_fixed_markov(p.n, p.lambda, p.mu, o.jmax);
  if (pmf.underflow) io.err << "warning: pmf entries below " << analytic::kPmfUnderflow << " were set to 0\n";
  csv::Writer w(out, {"j", "p"});
  for (std::size_t j = 0; j < pmf.probs.size(); ++j) w.row({static_cast<std::int64_t>(j), pmf.probs[j]});
}

void write_cumulants(const AnalyticOptions& o, std::ostream& out) {
  if (o.kmax < 1) throw InvalidArgument("--kmax must be positive");
  const auto p = markov_params(o);
  csv::Writer w(out, {"k", "cumulant", "limit"});
  for (int k = 1; k <= o.kmax; ++k) {
    w.row({k, analytic::cumulant_scaled(k, p.n, p.lambda, p.mu), analytic::cumulant_scaled_limit(k, p.lambda, p.mu)});
  }
}

// Identical routing: sub-queues share arrival epochs, initial occupants are
// not split, so the correlation ratio is evaluated with empty starts.
void write_covariance(const AnalyticOptions& o, std::ostream& out) {
  require(o.t_grid, "--t-grid");
  const double mu = o.spec.service.exponential_rate();
  csv::Writer w(out, {"t", "covariance", "correlation"});
  for (double t : o.t_grid) {
    const bool steady = std::isinf(t);
    const double cov = steady ? analytic::subqueue_covariance(o.spec.rate, mu, analytic::steady_state)
                              : analytic::subqueue_covariance(o.spec.rate, mu, t);
    double corr = std::nan("");
    if (o.spec.rate.stationary()) {
      try {
        corr = steady ? analytic::subqueue_correlation(analytic::steady_state)
                      : analytic::subqueue_correlation(0, 0, o.spec.rate.base(), mu, t);
      } catch (const DegenerateDenominatorError&) {
      }
    }
    w.row({t, cov, corr});
  }
}

} // namespace

RunResult run_analytic(const AnalyticOptions& options, Streams io) {
  AnalyticOptions o = options;
  if (o.n) {
    if (*o.n < 1) throw InvalidArgument("--n must be positive");
    o.spec.batch = BatchDist::fixed(*o.n);
  }
  std::ostringstream sink;
  if (o.what == "moments") {
    write_moments(o, sink);
  } else if (o.what == "mgf") {
    write_mgf(o, sink);
  } else if (o.what == "pmf") {
    write_pmf(o, io, sink);
  } else if (o.what == "cumulants") {
    write_cumulants(o, sink);
  } else if (o.what == "covariance") {
    write_covariance(o, sink);
  } else {
    throw InvalidArgument("unknown --what '" + o.what + "'");
  }
  RunResult result;
  if (emit_output(o.out, sink.str(), io.out)) result.outputs.push_back(o.out);
  return result;
}

} // namespace batchq::cli
