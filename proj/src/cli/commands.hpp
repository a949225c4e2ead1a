#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "batchq/analytic.hpp"
#include "batchq/model.hpp"
#include "batchq/simulator.hpp"

namespace batchq::cli {

// Library leaves θ unconstrained; the CLI caps it so e^{nθ} stays finite.
inline constexpr double kMaxAbsTheta = 5.0;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> outputs{}; // files written, primary output first
  std::optional<std::uint64_t> seed{}; // set when the run consumed randomness
};

struct AnalyticOptions {
  QueueSpec spec;
  std::string what{};
  std::vector<double> theta_grid{};
  std::vector<double> t_grid{};
  std::optional<std::int64_t> n{};
  std::int64_t jmax = 50;
  int kmax = 10;
  std::string out = "-";
};

struct LimitOptions {
  std::string mode{};
  double lambda = 1.0;
  double mu = 1.0;
  double mean_b = 1.0;
  double t = 0.0; // +inf selects the steady state
  double q0 = 0.0;
  std::vector<double> theta_grid{};
  std::vector<double> t_grid{};
  std::vector<std::int64_t> n_list{};
  std::vector<SizeProb> batch{};
  std::int64_t samples = 0;
  std::int64_t sample_n = 2000;
  int bins = 100;
  std::uint64_t seed = 1;
  std::string out = "-";
};

struct SimulateOptions {
  QueueSpec spec;
  std::vector<double> t_grid{};
  std::int64_t reps = 0;
  std::uint64_t seed = 1;
  sim::SubqueueMode subqueues{};
  unsigned jobs = 0;
  std::string out = "-";
};

struct CompareOptions {
  QueueSpec spec;
  std::optional<QueueSpec> reference{};
  double t = 0.0;
  std::int64_t reps = 0;
  std::uint64_t seed = 1;
  double threshold = 4.0;
  std::vector<double> thetas{};
  unsigned jobs = 0;
  std::string out = "-";
};

struct RouteOptions {
  std::int64_t k = 0;
  std::string service{};
  double lambda = 1.0;
  std::int64_t reps = 0;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  std::string out = "-";
  std::string matrix_out{};
};

void to_json(nlohmann::json& doc, const AnalyticOptions& o);
AnalyticOptions analytic_options_from_json(const nlohmann::json& doc);
void to_json(nlohmann::json& doc, const LimitOptions& o);
LimitOptions limit_options_from_json(const nlohmann::json& doc);
void to_json(nlohmann::json& doc, const SimulateOptions& o);
SimulateOptions simulate_options_from_json(const nlohmann::json& doc);
void to_json(nlohmann::json& doc, const CompareOptions& o);
CompareOptions compare_options_from_json(const nlohmann::json& doc);
void to_json(nlohmann::json& doc, const RouteOptions& o);
RouteOptions route_options_from_json(const nlohmann::json& doc);

RunResult run_analytic(const AnalyticOptions& o, Streams io);
RunResult run_limit(const LimitOptions& o, Streams io);
RunResult run_simulate(const SimulateOptions& o, Streams io);
RunResult run_compare(const CompareOptions& o, Streams io);
RunResult run_route(const RouteOptions& o, Streams io);

// Helpers shared by the commands.

// `1:0.5,2:0.5` style size:probability list.
std::vector<SizeProb> parse_pmf(const std::string& text);
// `none`, `identical`, `order_stat:K`, `modulo_cap:K`.
sim::SubqueueMode parse_subqueue_mode(const std::string& text);
std::string format_subqueue_mode(const sim::SubqueueMode& mode);
// `exponential:MU`, `deterministic:D`, `uniform:B`, `empirical:S1,S2,...`.
ServiceDist parse_service(const std::string& text);

// JSON has no infinity; non-finite values are stored as the string "inf".
nlohmann::json number_to_json(double value);
double number_from_json(const nlohmann::json& doc);
nlohmann::json grid_to_json(const std::vector<double>& grid);
std::vector<double> grid_from_json(const nlohmann::json& doc);

void check_theta_cap(const std::vector<double>& thetas);

// Writes `content` to the named file, or to `fallback` for "-". Returns true
// when a file was written. Commands render into memory first so a failure
// never leaves a partial file behind.
bool emit_output(const std::string& path, const std::string& content, std::ostream& fallback);

// results.csv + "pairs" -> results.pairs.csv
std::string sibling_path(const std::string& out, const std::string& tag);

// Closed-form moments and MGF for whichever representation the spec admits.
analytic::MomentPair analytic_moments(const QueueSpec& spec, double t);
double analytic_mgf(const QueueSpec& spec, double theta, double t);

} // namespace batchq::cli
