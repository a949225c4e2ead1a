#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "batchq/analytic.hpp"
#include "batchq/csv.hpp"
#include "batchq/errors.hpp"
#include "batchq/steady_state.hpp"
#include "commands.hpp"

namespace batchq::cli {

using nlohmann::json;

void to_json(json& doc, const LimitOptions& o) {
  json batch = json::array();
  for (const auto& [size, prob] : o.batch) batch.push_back({{"size", size}, {"prob", prob}});
  doc = {{"mode", o.mode},
         {"lambda", o.lambda},
         {"mu", o.mu},
         {"mean_b", o.mean_b},
         {"t", number_to_json(o.t)},
         {"q0", o.q0},
         {"theta_grid", grid_to_json(o.theta_grid)},
         {"t_grid", grid_to_json(o.t_grid)},
         {"n_list", o.n_list},
         {"batch", batch},
         {"samples", o.samples},
         {"sample_n", o.sample_n},
         {"bins", o.bins},
         {"seed", o.seed},
         {"out", o.out}};
}

LimitOptions limit_options_from_json(const json& doc) {
  LimitOptions o;
  o.mode = doc.at("mode").get<std::string>();
  o.lambda = doc.at("lambda").get<double>();
  o.mu = doc.at("mu").get<double>();
  o.mean_b = doc.at("mean_b").get<double>();
  o.t = number_from_json(doc.at("t"));
  o.q0 = doc.at("q0").get<double>();
  o.theta_grid = grid_from_json(doc.at("theta_grid"));
  o.t_grid = grid_from_json(doc.at("t_grid"));
  o.n_list = doc.at("n_list").get<std::vector<std::int64_t>>();
  o.batch.clear();
  for (const auto& e : doc.at("batch")) o.batch.push_back({e.at("size").get<std::int64_t>(), e.at("prob").get<double>()});
  o.samples = doc.at("samples").get<std::int64_t>();
  o.sample_n = doc.at("sample_n").get<std::int64_t>();
  o.bins = doc.at("bins").get<int>();
  o.seed = doc.at("seed").get<std::uint64_t>();
  o.out = doc.at("out").get<std::string>();
  return o;
}

namespace {

double finite_n_mgf(const LimitOptions& o, std::int64_t n, double theta) {
  if (std::isinf(o.t)) return analytic::scaled_steady_mgf(n, theta, o.lambda, o.mu);
  const QueueSpec spec{RatePattern(o.lambda), BatchDist::fixed(n), ServiceDist::exponential(o.mu), 0};
  return analytic::transient_mgf_fixed(spec, theta / static_cast<double>(n), o.t);
}

double limit_mgf(const LimitOptions& o, double theta) {
  return std::isinf(o.t) ? analytic::scaled_limit_mgf(theta, analytic::steady_state, o.lambda, o.mu, o.mean_b)
                         : analytic::scaled_limit_mgf(theta, o.t, o.lambda, o.mu, o.mean_b);
}

void write_batch_scaling(const LimitOptions& o, std::ostream& out) {
  if (o.theta_grid.empty()) throw InvalidArgument("--theta-grid is required");
  if (o.n_list.empty()) throw InvalidArgument("--n-list is required");
  check_theta_cap(o.theta_grid);
  std::vector<std::string> header{"theta"};
  for (auto n : o.n_list) header.push_back(fmt::format("M_{}", n));
  header.push_back("M_inf");
  csv::Writer w(out, header);
  for (double theta : o.theta_grid) {
    std::vector<csv::Cell> row{theta};
    for (auto n : o.n_list) row.emplace_back(finite_n_mgf(o, n, theta));
    row.emplace_back(limit_mgf(o, theta));
    w.row(row);
  }
}

// Histogram density of the scaled steady queue Q(n)/n.
std::string sample_density(const LimitOptions& o) {
  if (o.bins < 1) throw InvalidArgument("--bins must be positive");
  const auto draws = steady::scaled_limit_sample(o.sample_n, o.lambda, o.mu, o.seed, o.samples);
  const double hi = std::max(*std::max_element(draws.begin(), draws.end()), 1e-12);
  const double width = hi / o.bins;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(o.bins), 0);
  for (double x : draws) {
    const auto b = std::min<std::int64_t>(static_cast<std::int64_t>(x / width), o.bins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  std::ostringstream out;
  csv::Writer w(out, {"x", "density"});
  const double scale = 1.0 / (static_cast<double>(draws.size()) * width);
  for (int b = 0; b < o.bins; ++b) {
    w.row({(b + 0.5) * width, static_cast<double>(counts[static_cast<std::size_t>(b)]) * scale});
  }
  return out.str();
}

BatchMoments batch_moments(const LimitOptions& o) {
  return BatchDist::empirical(o.batch).moments();
}

void write_fluid(const LimitOptions& o, std::ostream& out) {
  if (o.theta_grid.empty()) throw InvalidArgument("--theta-grid is required");
  if (o.t_grid.empty()) throw InvalidArgument("--t-grid is required");
  check_theta_cap(o.theta_grid);
  const double mean_n = batch_moments(o).mean;
  csv::Writer w(out, {"t", "theta", "mgf"});
  for (double t : o.t_grid) {
    for (double theta : o.theta_grid) {
      const double m = std::isinf(t) ? analytic::fluid_mgf(theta, analytic::steady_state, o.lambda, o.mu, mean_n)
                                     : analytic::fluid_mgf(theta, t, o.lambda, o.mu, mean_n, o.q0);
      w.row({t, theta, m});
    }
  }
}

void write_diffusion(const LimitOptions& o, std::ostream& out) {
  const auto g = analytic::diffusion_params(o.lambda, o.mu, batch_moments(o));
  csv::Writer w(out, {"mean", "variance"});
  w.row({g.mean, g.variance});
}

} // namespace

RunResult run_limit(const LimitOptions& o, Streams io) {
  std::ostringstream sink;
  std::string density;
  if (o.mode == "batch-scaling") {
    write_batch_scaling(o, sink);
    if (o.samples < 0) throw InvalidArgument("--samples must be non-negative");
    if (o.samples > 0) {
      if (o.out == "-") throw InvalidArgument("--samples needs --out to name the density file");
      density = sample_density(o);
    }
  } else if (o.mode == "fluid") {
    write_fluid(o, sink);
  } else if (o.mode == "diffusion") {
    write_diffusion(o, sink);
  } else {
    throw InvalidArgument("unknown --mode '" + o.mode + "'");
  }
  RunResult result;
  if (emit_output(o.out, sink.str(), io.out)) result.outputs.push_back(o.out);
  if (!density.empty()) {
    const auto path = sibling_path(o.out, "density");
    emit_output(path, density, io.out);
    result.outputs.push_back(path);
    result.seed = o.seed;
  }
  return result;
}

} // namespace batchq::cli
