#include <sstream>

#include "batchq/csv.hpp"
#include "batchq/errors.hpp"
#include "batchq/routing.hpp"
#include "commands.hpp"

namespace batchq::cli {

using nlohmann::json;

void to_json(json& doc, const RouteOptions& o) {
  doc = {{"k", o.k},     {"service", o.service}, {"lambda", o.lambda}, {"reps", o.reps},
         {"seed", o.seed}, {"jobs", o.jobs},     {"out", o.out},       {"matrix_out", o.matrix_out}};
}

RouteOptions route_options_from_json(const json& doc) {
  RouteOptions o;
  o.k = doc.at("k").get<std::int64_t>();
  o.service = doc.at("service").get<std::string>();
  o.lambda = doc.at("lambda").get<double>();
  o.reps = doc.at("reps").get<std::int64_t>();
  o.seed = doc.at("seed").get<std::uint64_t>();
  o.jobs = doc.at("jobs").get<unsigned>();
  o.out = doc.at("out").get<std::string>();
  o.matrix_out = doc.at("matrix_out").get<std::string>();
  return o;
}

RunResult run_route(const RouteOptions& o, Streams io) {
  if (o.reps < 0) throw InvalidArgument("--reps must be non-negative");
  const routing::RoutingProblem problem{o.k, parse_service(o.service), o.lambda};
  const auto solution = routing::solve_phi(problem);

  std::ostringstream solution_csv;
  routing::write_solution_csv(solution, solution_csv);

  std::ostringstream diagnostics;
  csv::Writer diag(diagnostics, {"name", "value"});
  diag.row({"residual", solution.residual});
  diag.row({"sherman_morrison", solution.sherman_morrison});

  std::string verify_text;
  if (o.reps > 0) {
    if (o.out == "-") throw InvalidArgument("--reps needs --out to name the verification table");
    const auto report = routing::verify_equalization(problem, solution, {o.reps, o.seed, o.jobs});
    diag.row({"analytic_spread", report.analytic_spread});
    if (report.verified) {
      diag.row({"horizon", report.horizon});
      diag.row({"max_pairwise_z", report.max_pairwise_z});
      std::ostringstream verify;
      csv::Writer w(verify, {"i", "analytic_mean", "sample_mean", "sample_variance", "mean_se", "variance_se",
                             "dispersion_z"});
      for (const auto& q : report.subqueues) {
        w.row({q.queue, q.analytic_mean, q.sample_mean, q.sample_variance, q.mean_se, q.variance_se, q.dispersion_z});
      }
      verify_text = verify.str();
    } else {
      io.err << "note: solution is infeasible, simulation verification skipped\n";
    }
  }

  RunResult result;
  if (o.reps > 0) result.seed = o.seed;
  if (emit_output(o.out, solution_csv.str(), io.out)) {
    result.outputs.push_back(o.out);
    const auto diag_path = sibling_path(o.out, "diagnostics");
    emit_output(diag_path, diagnostics.str(), io.out);
    result.outputs.push_back(diag_path);
  } else {
    io.err << diagnostics.str();
  }
  if (!verify_text.empty()) {
    const auto path = sibling_path(o.out, "verify");
    emit_output(path, verify_text, io.out);
    result.outputs.push_back(path);
  }
  if (!o.matrix_out.empty()) {
    std::ostringstream matrix;
    routing::write_matrix_csv(solution, matrix);
    if (emit_output(o.matrix_out, matrix.str(), io.out)) result.outputs.push_back(o.matrix_out);
  }
  return result;
}

} // namespace batchq::cli
