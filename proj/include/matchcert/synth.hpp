#pragma once

#include <cstdint>
#include <vector>

#include "matchcert/graph.hpp"

namespace matchcert {

enum class BaseModel { erdos_renyi, preferential_attachment };

struct GeneratorConfig {
  std::size_t n_entities = 100;
  BaseModel base_model = BaseModel::erdos_renyi;
  double er_p = 0.05;         // erdos-renyi edge probability
  std::size_t pa_edges = 3;   // preferential-attachment edges per new node
  double edge_retain_x = 1.0;
  double edge_retain_y = 1.0;
  double node_drop_x = 0.0;
  double node_drop_y = 0.0;
  double attr_noise = 0.0;    // probability the y copy's uid attribute is corrupted
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Attribute key carrying the entity index in generated networks.
inline constexpr const char* kEntityAttr = "uid";

struct GeneratedPair {
  NetworkPair pair;
  MatchSet truth;                   // identity correspondence, k_y = 1
  std::vector<std::size_t> x_entity;  // entity index of every x node
  std::vector<std::size_t> y_entity;
};

/// One base graph on n_entities nodes; X and Y copies each drop nodes and
/// keep edges independently. Node ids are shuffled labels ("x17", "y402") so
/// that ids carry no information about the correspondence.
GeneratedPair generate_pair(const GeneratorConfig& cfg);

}  // namespace matchcert
