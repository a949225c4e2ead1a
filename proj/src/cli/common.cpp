#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "batchq/errors.hpp"
#include "batchq/steady_state.hpp"
#include "commands.hpp"
#include "grid.hpp"

namespace batchq::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("cannot parse " + what + " '" + s + "'");
}

std::int64_t to_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  try {
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("cannot parse " + what + " '" + s + "'");
}

steady::PoissonSumRep general_rep(const QueueSpec& spec) {
  if (!spec.rate.stationary()) throw DomainError("steady state requires a stationary arrival rate");
  if (spec.batch.is_fixed()) return steady::rep_fixed_general(spec.batch.fixed_size(), spec.rate.base(), spec.service);
  return steady::rep_random_general(spec.batch, spec.rate.base(), spec.service);
}

// General service has a closed form only at stationarity. A run started
// empty under a stationary rate is already stationary once t >= sup S.
void require_general_steady(const QueueSpec& spec, double t) {
  if (std::isinf(t)) return;
  if (spec.q0 > 0 || !spec.rate.stationary() || t < spec.service.upper_bound()) {
    throw DomainError("general service: closed form only for the steady state");
  }
}

} // namespace

std::vector<SizeProb> parse_pmf(const std::string& text) {
  std::vector<SizeProb> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw InvalidArgument("pmf entries must be size:prob, got '" + item + "'");
    out.push_back({to_int(parts[0], "batch size"), to_double(parts[1], "probability")});
  }
  if (out.empty()) throw InvalidArgument("pmf is empty");
  return out;
}

sim::SubqueueMode parse_subqueue_mode(const std::string& text) {
  if (text == "none") return sim::SubqueueMode::none();
  if (text == "identical") return sim::SubqueueMode::identical();
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto kind = text.substr(0, colon);
    const auto k = to_int(text.substr(colon + 1), "sub-queue count");
    if (kind == "order_stat") return sim::SubqueueMode::order_stat(k);
    if (kind == "modulo_cap") return sim::SubqueueMode::modulo_cap(k);
  }
  throw InvalidArgument("unknown sub-queue mode '" + text + "'");
}

std::string format_subqueue_mode(const sim::SubqueueMode& mode) {
  switch (mode.kind) {
  case sim::SubqueueMode::Kind::none: return "none";
  case sim::SubqueueMode::Kind::identical: return "identical";
  case sim::SubqueueMode::Kind::order_stat: return fmt::format("order_stat:{}", mode.k);
  case sim::SubqueueMode::Kind::modulo_cap: return fmt::format("modulo_cap:{}", mode.k);
  }
  return "none";
}

ServiceDist parse_service(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("service must be kind:params, got '" + text + "'");
  const auto kind = text.substr(0, colon);
  const auto args = text.substr(colon + 1);
  if (kind == "exponential") return ServiceDist::exponential(to_double(args, "rate"));
  if (kind == "deterministic") return ServiceDist::deterministic(to_double(args, "duration"));
  if (kind == "uniform") return ServiceDist::uniform(to_double(args, "upper bound"));
  if (kind == "empirical") {
    std::vector<double> samples;
    for (const auto& s : split(args, ',')) samples.push_back(to_double(s, "sample"));
    return ServiceDist::empirical(std::move(samples));
  }
  throw InvalidArgument("unknown service kind '" + kind + "'");
}

nlohmann::json number_to_json(double value) {
  if (std::isfinite(value)) return value;
  if (value > 0) return "inf";
  throw InvalidArgument("cannot store a non-finite parameter");
}

double number_from_json(const nlohmann::json& doc) {
  if (doc.is_string() && doc.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return doc.get<double>();
}

nlohmann::json grid_to_json(const std::vector<double>& grid) {
  auto out = nlohmann::json::array();
  for (double v : grid) out.push_back(number_to_json(v));
  return out;
}

std::vector<double> grid_from_json(const nlohmann::json& doc) {
  std::vector<double> out;
  for (const auto& v : doc) out.push_back(number_from_json(v));
  return out;
}

void check_theta_cap(const std::vector<double>& thetas) {
  for (double theta : thetas) {
    if (!(std::abs(theta) <= kMaxAbsTheta)) {
      throw DomainError(fmt::format("|theta| must not exceed {}, got {}", kMaxAbsTheta, theta));
    }
  }
}

bool emit_output(const std::string& path, const std::string& content, std::ostream& fallback) {
  if (path == "-") {
    fallback << content;
    return false;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InvalidArgument("cannot write output file " + path);
  file << content;
  if (!file) throw InvalidArgument("failed writing output file " + path);
  return true;
}

std::string sibling_path(const std::string& out, const std::string& tag) {
  const std::filesystem::path p(out);
  auto name = p.stem().string() + "." + tag + (p.has_extension() ? p.extension().string() : ".csv");
  return (p.parent_path() / name).string();
}

analytic::MomentPair analytic_moments(const QueueSpec& spec, double t) {
  if (spec.service.is_exponential()) {
    if (std::isinf(t)) {
      return spec.batch.is_fixed() ? analytic::mean_var_fixed(spec, analytic::steady_state)
                                   : analytic::mean_var_random(spec, analytic::steady_state);
    }
    return spec.batch.is_fixed() ? analytic::mean_var_fixed(spec, t) : analytic::mean_var_random(spec, t);
  }
  require_general_steady(spec, t);
  const auto rep = general_rep(spec);
  return {rep.mean(), rep.variance()};
}

double analytic_mgf(const QueueSpec& spec, double theta, double t) {
  if (spec.service.is_exponential()) {
    if (spec.batch.is_fixed()) {
      return std::isinf(t) ? analytic::transient_mgf_fixed(spec, theta, analytic::steady_state)
                           : analytic::transient_mgf_fixed(spec, theta, t);
    }
    if (!std::isinf(t)) throw DomainError("transient MGF is available for fixed batches only");
    if (!spec.rate.stationary()) throw DomainError("steady state requires a stationary arrival rate");
    return steady::rep_random_markov(spec.batch, spec.rate.base(), spec.service.exponential_rate()).mgf(theta);
  }
  require_general_steady(spec, t);
  return general_rep(spec).mgf(theta);
}

} // namespace batchq::cli
