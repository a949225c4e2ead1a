#include "batchq/cli.hpp"

#include <cstdlib>
#include <limits>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "batchq/errors.hpp"
#include "batchq/model_json.hpp"
#include "commands.hpp"
#include "grid.hpp"
#include "manifest.hpp"

namespace batchq::cli {

using nlohmann::json;

namespace {

constexpr const char* kSeedEnv = "BATCHQ_SEED";

std::uint64_t resolve_seed(std::uint64_t flag_value) {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return flag_value;
  const std::string text(env);
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.front() == '-') {
    throw InvalidArgument(fmt::format("{} must be a non-negative integer, got '{}'", kSeedEnv, text));
  }
  return value;
}

std::optional<std::vector<double>> optional_grid(const std::string& text, bool given) {
  if (!given) return std::nullopt;
  return parse_grid(text);
}

RunResult dispatch(const std::string& command, const json& params, Streams io) {
  if (command == "analytic") return run_analytic(analytic_options_from_json(params), io);
  if (command == "limit") return run_limit(limit_options_from_json(params), io);
  if (command == "simulate") return run_simulate(simulate_options_from_json(params), io);
  if (command == "compare") return run_compare(compare_options_from_json(params), io);
  if (command == "route") return run_route(route_options_from_json(params), io);
  throw InvalidArgument("unknown command '" + command + "'");
}

// Every run goes through its JSON parameter set, so a manifest replay takes
// exactly the same path as the original invocation.
int execute(const std::string& command, const json& params, Streams io) {
  const auto result = dispatch(command, params, io);
  if (!result.outputs.empty()) {
    RunManifest manifest{command, params, result.seed, BATCHQ_VERSION, result.outputs};
    write_manifest(manifest, manifest_path(result.outputs.front()));
  }
  return result.exit_code;
}

int replay(const std::string& manifest_file, const std::string& out_override, Streams io) {
  const auto manifest = read_manifest(manifest_file);
  if (manifest.version != BATCHQ_VERSION) {
    io.err << fmt::format("warning: manifest written by version {}, running {}\n", manifest.version, BATCHQ_VERSION);
  }
  json params = manifest.parameters;
  if (!out_override.empty()) {
    params["out"] = out_override;
    if (params.contains("matrix_out") && !params["matrix_out"].get<std::string>().empty()) {
      params["matrix_out"] = sibling_path(out_override, "matrix");
    }
  }
  return execute(manifest.command, params, io);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytics and simulation for infinite-server queues with batch arrivals", "batchq"};
  app.set_version_flag("--version", BATCHQ_VERSION);
  app.require_subcommand(1);

  std::string spec_file, reference_file, out_path = "-", theta_text, t_text, what, mode, n_list_text;
  std::string batch_text = "1:1", subqueue_text = "none", service_text, matrix_out, manifest_file, t_single = "inf";
  std::string thetas_text = "-0.5,0.3";
  std::int64_t n = 0, jmax = 50, reps = 0, k = 0, samples = 0, sample_n = 2000;
  int kmax = 10, bins = 100;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  double lambda = 1.0, mu = 1.0, mean_b = 1.0, q0 = 0.0, threshold = 4.0;

  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_path, "Output CSV path, '-' for stdout"); };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, fmt::format("Base seed ({} overrides)", kSeedEnv));
    sub->add_option("--jobs", jobs, "Worker threads, 0 for machine parallelism");
  };

  auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form quantities on a grid");
  analytic_cmd->add_option("spec", spec_file, "Queue spec JSON")->required();
  analytic_cmd->add_option("--what", what, "mgf | moments | pmf | cumulants | covariance")->required();
  auto* a_theta = analytic_cmd->add_option("--theta-grid", theta_text, "Grid such as -1:0.1:1 or 0.5,1");
  auto* a_t = analytic_cmd->add_option("--t-grid", t_text, "Time grid; 'inf' selects the steady state");
  auto* a_n = analytic_cmd->add_option("--n", n, "Fixed batch size overriding the spec");
  analytic_cmd->add_option("--jmax", jmax, "Largest state for --what pmf");
  analytic_cmd->add_option("--kmax", kmax, "Highest order for --what cumulants");
  add_out(analytic_cmd);

  auto* limit_cmd = app.add_subcommand("limit", "Batch-scaling, fluid and diffusion limits");
  limit_cmd->add_option("--mode", mode, "batch-scaling | fluid | diffusion")->required();
  limit_cmd->add_option("--lambda", lambda, "Arrival rate");
  limit_cmd->add_option("--mu", mu, "Service rate");
  limit_cmd->add_option("--mean-b", mean_b, "Mean of the scaled batch fraction");
  limit_cmd->add_option("--t", t_single, "Time for batch-scaling curves; 'inf' for steady state");
  limit_cmd->add_option("--q0", q0, "Scaled initial level (fluid)");
  auto* l_theta = limit_cmd->add_option("--theta-grid", theta_text, "Theta grid");
  auto* l_t = limit_cmd->add_option("--t-grid", t_text, "Time grid (fluid)");
  auto* l_n = limit_cmd->add_option("--n-list", n_list_text, "Batch sizes, e.g. 1,2,3,4");
  limit_cmd->add_option("--batch", batch_text, "Batch pmf size:prob,... (fluid, diffusion)");
  limit_cmd->add_option("--samples", samples, "Draws of the scaled steady queue for a density table");
  limit_cmd->add_option("--sample-n", sample_n, "Batch size used for --samples");
  limit_cmd->add_option("--bins", bins, "Histogram bins for --samples");
  limit_cmd->add_option("--seed", seed, fmt::format("Seed for --samples ({} overrides)", kSeedEnv));
  add_out(limit_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "Replicated discrete-event simulation");
  simulate_cmd->add_option("spec", spec_file, "Queue spec JSON")->required();
  auto* s_t = simulate_cmd->add_option("--t-grid", t_text, "Snapshot times")->required();
  simulate_cmd->add_option("--reps", reps, "Replications")->required();
  simulate_cmd->add_option("--subqueues", subqueue_text, "none | identical | order_stat:K | modulo_cap:K");
  add_seed(simulate_cmd);
  add_out(simulate_cmd);

  auto* compare_cmd = app.add_subcommand("compare", "Closed form versus simulation with z-scores");
  compare_cmd->add_option("spec", spec_file, "Queue spec JSON")->required();
  compare_cmd->add_option("--t", t_single, "Time, or 'inf' for the steady state")->required();
  compare_cmd->add_option("--reps", reps, "Replications")->required();
  compare_cmd->add_option("--thetas", thetas_text, "MGF arguments to compare");
  compare_cmd->add_option("--z-threshold", threshold, "Fail when any |z| reaches this value");
  compare_cmd->add_option("--reference", reference_file, "Spec used for the closed-form side");
  add_seed(compare_cmd);
  add_out(compare_cmd);

  auto* route_cmd = app.add_subcommand("route", "Batch-size distribution equalizing k sub-queues");
  route_cmd->add_option("--k", k, "Number of sub-queues")->required();
  route_cmd->add_option("--service", service_text, "exponential:MU | deterministic:D | uniform:B | empirical:S,...")
      ->required();
  route_cmd->add_option("--lambda", lambda, "Arrival rate");
  route_cmd->add_option("--reps", reps, "Replications for the simulation check, 0 to skip");
  route_cmd->add_option("--matrix-out", matrix_out, "Also write the order-statistic matrix");
  add_seed(route_cmd);
  add_out(route_cmd);

  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_file, "Manifest JSON")->required();
  replay_cmd->add_option("--out", out_path, "Write to this path instead of the recorded one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Streams io{out, err};
  try {
    if (replay_cmd->parsed()) {
      return replay(manifest_file, replay_cmd->count("--out") ? out_path : std::string(), io);
    }
    json params;
    std::string command;
    if (analytic_cmd->parsed()) {
      command = "analytic";
      AnalyticOptions o{load_queue_spec(spec_file), what, {}, {}, std::nullopt, jmax, kmax, out_path};
      o.theta_grid = optional_grid(theta_text, a_theta->count() > 0).value_or(std::vector<double>{});
      o.t_grid = optional_grid(t_text, a_t->count() > 0).value_or(std::vector<double>{});
      if (a_n->count() > 0) o.n = n;
      params = o;
    } else if (limit_cmd->parsed()) {
      command = "limit";
      LimitOptions o;
      o.mode = mode;
      o.lambda = lambda;
      o.mu = mu;
      o.mean_b = mean_b;
      const auto t_vals = parse_grid(t_single);
      if (t_vals.size() != 1) throw InvalidArgument("--t takes a single value");
      o.t = t_vals.front();
      o.q0 = q0;
      o.theta_grid = optional_grid(theta_text, l_theta->count() > 0).value_or(std::vector<double>{});
      o.t_grid = optional_grid(t_text, l_t->count() > 0).value_or(std::vector<double>{});
      if (l_n->count() > 0) o.n_list = parse_int_list(n_list_text);
      o.batch = parse_pmf(batch_text);
      o.samples = samples;
      o.sample_n = sample_n;
      o.bins = bins;
      o.seed = resolve_seed(seed);
      o.out = out_path;
      params = o;
    } else if (simulate_cmd->parsed()) {
      command = "simulate";
      SimulateOptions o{load_queue_spec(spec_file), parse_grid(t_text), reps, resolve_seed(seed),
                        parse_subqueue_mode(subqueue_text), jobs, out_path};
      (void)s_t;
      params = o;
    } else if (compare_cmd->parsed()) {
      command = "compare";
      CompareOptions o{load_queue_spec(spec_file), std::nullopt, 0.0, reps, resolve_seed(seed), threshold,
                       parse_grid(thetas_text), jobs, out_path};
      const auto t_vals = parse_grid(t_single);
      if (t_vals.size() != 1) throw InvalidArgument("--t takes a single value");
      o.t = t_vals.front();
      if (!reference_file.empty()) o.reference = load_queue_spec(reference_file);
      params = o;
    } else {
      command = "route";
      params = RouteOptions{k, service_text, lambda, reps, resolve_seed(seed), jobs, out_path, matrix_out};
    }
    return execute(command, params, io);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const json::exception& e) {
    err << "error: malformed parameters: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

} // namespace batchq::cli
