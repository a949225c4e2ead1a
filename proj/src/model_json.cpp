#include "batchq/model_json.hpp"

#include <fstream>

#include "batchq/errors.hpp"

namespace batchq {

using nlohmann::json;

namespace {

json pmf_to_json(std::span<const SizeProb> pmf) {
  json out = json::array();
  for (const auto& [size, prob] : pmf) out.push_back({{"size", size}, {"prob", prob}});
  return out;
}

std::vector<SizeProb> pmf_from_json(const json& doc) {
  std::vector<SizeProb> out;
  if (!doc.is_array()) throw InvalidArgument("pmf must be an array of {size, prob} objects");
  for (const auto& entry : doc) {
    out.push_back({entry.at("size").get<std::int64_t>(), entry.at("prob").get<double>()});
  }
  return out;
}

RatePattern rate_from_json(const json& doc) {
  return RatePattern(doc.at("base").get<double>(), doc.value("cos", std::vector<double>{}),
                     doc.value("sin", std::vector<double>{}));
}

BatchDist batch_from_json(const json& doc) {
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "fixed") return BatchDist::fixed(doc.at("n").get<std::int64_t>());
  if (kind == "empirical") return BatchDist::empirical(pmf_from_json(doc.at("pmf")));
  if (kind == "divisible_sum") {
    return BatchDist::divisible_sum(pmf_from_json(doc.at("base")), doc.at("n").get<std::int64_t>());
  }
  throw InvalidArgument("unknown batch kind '" + kind + "'");
}

ServiceDist service_from_json(const json& doc) {
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "exponential") return ServiceDist::exponential(doc.at("mu").get<double>());
  if (kind == "deterministic") return ServiceDist::deterministic(doc.at("d").get<double>());
  if (kind == "uniform") return ServiceDist::uniform(doc.at("b").get<double>());
  if (kind == "empirical") return ServiceDist::empirical(doc.at("samples").get<std::vector<double>>());
  throw InvalidArgument("unknown service kind '" + kind + "'");
}

} // namespace

json to_json(const QueueSpec& spec) {
  json rate = {{"base", spec.rate.base()},
               {"cos", std::vector<double>(spec.rate.cos_coeffs().begin(), spec.rate.cos_coeffs().end())},
               {"sin", std::vector<double>(spec.rate.sin_coeffs().begin(), spec.rate.sin_coeffs().end())}};

  json batch;
  if (const auto* f = std::get_if<BatchDist::Fixed>(&spec.batch.law())) {
    batch = {{"kind", "fixed"}, {"n", f->n}};
  } else if (const auto* e = std::get_if<BatchDist::Empirical>(&spec.batch.law())) {
    batch = {{"kind", "empirical"}, {"pmf", pmf_to_json(e->pmf)}};
  } else {
    const auto& d = std::get<BatchDist::DivisibleSum>(spec.batch.law());
    batch = {{"kind", "divisible_sum"}, {"n", d.n}, {"base", pmf_to_json(d.base)}};
  }

  json service;
  if (const auto* e = std::get_if<ServiceDist::Exponential>(&spec.service.law())) {
    service = {{"kind", "exponential"}, {"mu", e->mu}};
  } else if (const auto* d = std::get_if<ServiceDist::Deterministic>(&spec.service.law())) {
    service = {{"kind", "deterministic"}, {"d", d->d}};
  } else if (const auto* u = std::get_if<ServiceDist::Uniform>(&spec.service.law())) {
    service = {{"kind", "uniform"}, {"b", u->b}};
  } else {
    service = {{"kind", "empirical"}, {"samples", std::get<ServiceDist::Empirical>(spec.service.law()).samples}};
  }

  return {{"rate", rate}, {"batch", batch}, {"service", service}, {"q0", spec.q0}};
}

QueueSpec queue_spec_from_json(const json& doc) {
  try {
    QueueSpec spec{rate_from_json(doc.at("rate")), batch_from_json(doc.at("batch")),
                   service_from_json(doc.at("service")), doc.value("q0", std::int64_t{0})};
    validate(spec);
    return spec;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed queue spec: ") + e.what());
  }
}

QueueSpec load_queue_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open spec file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("spec file " + path.string() + " is not valid JSON: " + e.what());
  }
  return queue_spec_from_json(doc);
}

void save_queue_spec(const QueueSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write spec file " + path.string());
  out << to_json(spec).dump(2) << '\n';
}

} // namespace batchq
