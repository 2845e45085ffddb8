#include "matchcert/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "matchcert/error.hpp"

namespace matchcert {

namespace {

void check_keys(const nlohmann::json& j, std::string_view what,
                std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw Error("invalid-config", std::string(what) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) throw Error("invalid-config", std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error("invalid-config", std::string("bad value for '") + key + "'");
  }
}

}  // namespace

GeneratorConfig generator_config_from_json(const nlohmann::json& j) {
  check_keys(j, "generator",
             {"n_entities", "base_model", "edge_retain_x", "edge_retain_y", "node_drop_x",
              "node_drop_y", "attr_noise", "rng_seed"});
  GeneratorConfig cfg;
  read(j, "n_entities", cfg.n_entities);
  if (auto it = j.find("base_model"); it != j.end()) {
    check_keys(*it, "base_model", {"kind", "p", "m_edges"});
    std::string kind = "erdos-renyi";
    read(*it, "kind", kind);
    if (kind == "erdos-renyi") {
      cfg.base_model = BaseModel::erdos_renyi;
      read(*it, "p", cfg.er_p);
    } else if (kind == "preferential-attachment") {
      cfg.base_model = BaseModel::preferential_attachment;
      read(*it, "m_edges", cfg.pa_edges);
    } else {
      throw Error("invalid-config", "unknown base model '" + kind + "'");
    }
  }
  read(j, "edge_retain_x", cfg.edge_retain_x);
  read(j, "edge_retain_y", cfg.edge_retain_y);
  read(j, "node_drop_x", cfg.node_drop_x);
  read(j, "node_drop_y", cfg.node_drop_y);
  read(j, "attr_noise", cfg.attr_noise);
  read(j, "rng_seed", cfg.rng_seed);
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const GeneratorConfig& cfg) {
  nlohmann::json j;
  j["n_entities"] = cfg.n_entities;
  if (cfg.base_model == BaseModel::erdos_renyi) {
    j["base_model"] = {{"kind", "erdos-renyi"}, {"p", cfg.er_p}};
  } else {
    j["base_model"] = {{"kind", "preferential-attachment"}, {"m_edges", cfg.pa_edges}};
  }
  j["edge_retain_x"] = cfg.edge_retain_x;
  j["edge_retain_y"] = cfg.edge_retain_y;
  j["node_drop_x"] = cfg.node_drop_x;
  j["node_drop_y"] = cfg.node_drop_y;
  j["attr_noise"] = cfg.attr_noise;
  j["rng_seed"] = cfg.rng_seed;
  return j;
}

MatcherConfig matcher_config_from_json(const nlohmann::json& j) {
  check_keys(j, "matcher", {"kind", "attr_key", "seeds", "threshold", "max_iters"});
  MatcherConfig cfg;
  std::string kind = "percolation";
  read(j, "kind", kind);
  if (kind == "percolation") {
    cfg.kind = MatcherKind::percolation;
  } else if (kind == "attribute-exact") {
    cfg.kind = MatcherKind::attribute_exact;
  } else {
    throw Error("invalid-config", "unknown matcher kind '" + kind + "'");
  }
  read(j, "attr_key", cfg.attr_key);
  if (auto it = j.find("seeds"); it != j.end()) {
    std::string rule;
    if (it->is_string()) {
      rule = it->get<std::string>();
    } else {
      check_keys(*it, "seeds", {"rule", "k", "pairs"});
      read(*it, "rule", rule);
    }
    if (rule == "none") {
      cfg.seeds.kind = SeedRule::Kind::none;
    } else if (rule == "verified-sample") {
      cfg.seeds.kind = SeedRule::Kind::verified_sample;
    } else if (rule == "top-degree") {
      cfg.seeds.kind = SeedRule::Kind::top_degree;
      read(*it, "k", cfg.seeds.top_k);
    } else if (rule == "explicit") {
      cfg.seeds.kind = SeedRule::Kind::explicit_pairs;
      read(*it, "pairs", cfg.seeds.pairs);
    } else {
      throw Error("invalid-config", "unknown seed rule '" + rule + "'");
    }
  }
  read(j, "threshold", cfg.threshold);
  read(j, "max_iters", cfg.max_iters);
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const MatcherConfig& cfg) {
  nlohmann::json j;
  j["kind"] = cfg.kind == MatcherKind::percolation ? "percolation" : "attribute-exact";
  j["attr_key"] = cfg.attr_key;
  switch (cfg.seeds.kind) {
    case SeedRule::Kind::none:
      j["seeds"] = "none";
      break;
    case SeedRule::Kind::verified_sample:
      j["seeds"] = "verified-sample";
      break;
    case SeedRule::Kind::top_degree:
      j["seeds"] = {{"rule", "top-degree"}, {"k", cfg.seeds.top_k}};
      break;
    case SeedRule::Kind::explicit_pairs:
      j["seeds"] = {{"rule", "explicit"}, {"pairs", cfg.seeds.pairs}};
      break;
  }
  j["threshold"] = cfg.threshold;
  j["max_iters"] = cfg.max_iters;
  return j;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("invalid-config", path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("io-error", "write failed for " + path.string());
}

}  // namespace matchcert
