#include <algorithm>
#include <cmath>
#include <sstream>

#include "batchq/errors.hpp"
#include "batchq/model_json.hpp"
#include "commands.hpp"

namespace batchq::cli {

using nlohmann::json;

void to_json(json& doc, const SimulateOptions& o) {
  doc = {{"spec", batchq::to_json(o.spec)},
         {"t_grid", grid_to_json(o.t_grid)},
         {"reps", o.reps},
         {"seed", o.seed},
         {"subqueues", format_subqueue_mode(o.subqueues)},
         {"jobs", o.jobs},
         {"out", o.out}};
}

SimulateOptions simulate_options_from_json(const json& doc) {
  SimulateOptions o{.spec = queue_spec_from_json(doc.at("spec"))};
  o.t_grid = grid_from_json(doc.at("t_grid"));
  o.reps = doc.at("reps").get<std::int64_t>();
  o.seed = doc.at("seed").get<std::uint64_t>();
  o.subqueues = parse_subqueue_mode(doc.at("subqueues").get<std::string>());
  o.jobs = doc.at("jobs").get<unsigned>();
  o.out = doc.at("out").get<std::string>();
  return o;
}

RunResult run_simulate(const SimulateOptions& o, Streams io) {
  if (o.reps < 1) throw InvalidArgument("--reps must be positive");
  if (o.t_grid.empty()) throw InvalidArgument("--t-grid is required");
  auto times = o.t_grid;
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("simulation times must be finite and non-negative");
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  sim::SimConfig config{o.spec, times.back(), times, o.reps, o.seed, o.subqueues, o.jobs};
  const auto summary = sim::replicate(config);
  if (!summary.se_defined) io.err << "warning: standard errors need at least two replications\n";

  std::ostringstream main_csv;
  sim::write_summary_csv(summary, main_csv);
  RunResult result;
  result.seed = o.seed;
  if (emit_output(o.out, main_csv.str(), io.out)) result.outputs.push_back(o.out);

  if (o.subqueues.kind != sim::SubqueueMode::Kind::none) {
    if (o.out == "-") {
      io.err << "note: sub-queue tables are written only with --out\n";
    } else {
      std::ostringstream pairs, subs;
      sim::write_pairs_csv(summary, pairs);
      sim::write_subqueue_csv(summary, subs);
      for (const auto& [tag, text] : {std::pair{"pairs", pairs.str()}, std::pair{"subqueues", subs.str()}}) {
        const auto path = sibling_path(o.out, tag);
        emit_output(path, text, io.out);
        result.outputs.push_back(path);
      }
    }
  }
  return result;
}

} // namespace batchq::cli
