#pragma once

// JSON documents for generator and matcher configuration.
//
// Generator:
//   {"n_entities": 2000,
//    "base_model": {"kind": "erdos-renyi", "p": 0.01}
//                | {"kind": "preferential-attachment", "m_edges": 3},
//    "edge_retain_x": 0.8, "edge_retain_y": 0.8,
//    "node_drop_x": 0.1, "node_drop_y": 0.1,
//    "attr_noise": 0.0, "rng_seed": 1}
//
// Matcher (keys exactly kind, attr_key, seeds, threshold, max_iters):
//   {"kind": "percolation" | "attribute-exact",
//    "attr_key": "uid",
//    "seeds": "none" | "verified-sample" | {"rule": "top-degree", "k": 10}
//           | {"rule": "explicit", "pairs": [["x1", "y7"], ...]},
//    "threshold": 2, "max_iters": 100}
//
// Missing keys take the struct defaults; unknown keys are rejected.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "matchcert/matchers.hpp"
#include "matchcert/synth.hpp"

namespace matchcert {

GeneratorConfig generator_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorConfig& cfg);

MatcherConfig matcher_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MatcherConfig& cfg);

/// Parses a JSON file; throws "io-error" or "invalid-config".
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace matchcert
