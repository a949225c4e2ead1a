#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "batchq/model.hpp"

namespace batchq {

// Structured config format:
//
//   {
//     "rate":    {"base": 1.0, "cos": [a_1, ...], "sin": [b_1, ...]},
//     "batch":   {"kind": "fixed", "n": 2}
//              | {"kind": "empirical", "pmf": [{"size": 1, "prob": 0.5}, ...]}
//              | {"kind": "divisible_sum", "n": 4, "base": [{"size": 0, "prob": 0.5}, ...]},
//     "service": {"kind": "exponential", "mu": 1.0}
//              | {"kind": "deterministic", "d": 2.0}
//              | {"kind": "uniform", "b": 1.0}
//              | {"kind": "empirical", "samples": [0.3, 1.2, ...]},
//     "q0": 0
//   }
//
// "cos", "sin" and "q0" may be omitted (empty / 0). Any structural problem is
// reported as InvalidArgument.
nlohmann::json to_json(const QueueSpec& spec);
QueueSpec queue_spec_from_json(const nlohmann::json& doc);

QueueSpec load_queue_spec(const std::filesystem::path& path);
void save_queue_spec(const QueueSpec& spec, const std::filesystem::path& path);

} // namespace batchq
