#include "matchcert/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "matchcert/error.hpp"
#include "matchcert/rng.hpp"
#include "matchcert/sampling.hpp"

namespace matchcert {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error("invalid-config", std::string(name) + " must lie in [0,1]");
  }
}

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

// Batagelj-Brandes geometric skipping over the pairs (w < v).
EdgeList erdos_renyi(std::size_t n, double p, Rng& rng) {
  EdgeList edges;
  if (p <= 0.0 || n < 2) return edges;
  if (p >= 1.0) {
    for (std::size_t v = 1; v < n; ++v) {
      for (std::size_t w = 0; w < v; ++w) edges.emplace_back(w, v);
    }
    return edges;
  }
  const double log_q = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = rng.uniform();
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<std::size_t>(w), static_cast<std::size_t>(v));
  }
  return edges;
}

// Barabasi-Albert: each new node links to `m` distinct earlier nodes chosen
// with probability proportional to degree. The first m + 1 nodes form a clique.
EdgeList preferential_attachment(std::size_t n, std::size_t m, Rng& rng) {
  EdgeList edges;
  std::vector<std::size_t> endpoints;
  const std::size_t core = std::min(n, m + 1);
  for (std::size_t v = 1; v < core; ++v) {
    for (std::size_t w = 0; w < v; ++w) {
      edges.emplace_back(w, v);
      endpoints.push_back(w);
      endpoints.push_back(v);
    }
  }
  for (std::size_t v = core; v < n; ++v) {
    std::vector<std::size_t> targets;
    while (targets.size() < m) {
      const std::size_t t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    std::sort(targets.begin(), targets.end());
    for (std::size_t t : targets) {
      edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return edges;
}

struct Copy {
  Network net;
  std::vector<std::int64_t> node_of_entity;  // -1 when dropped
  std::vector<std::size_t> entity_of_node;
};

Copy make_copy(std::size_t n, double drop, const std::string& prefix, double noise, Rng& rng) {
  Copy copy;
  copy.node_of_entity.assign(n, -1);
  std::vector<bool> keep(n);
  for (std::size_t e = 0; e < n; ++e) keep[e] = rng.uniform() >= drop;
  // Shuffled labels: entity e is called prefix + label[e]; nodes are created
  // in label order so indices are unrelated to entity order as well.
  const auto label = sample_positions(n, n, rng);
  std::vector<std::size_t> entity_by_label(n);
  for (std::size_t e = 0; e < n; ++e) entity_by_label[label[e]] = e;
  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t e = entity_by_label[l];
    if (!keep[e]) continue;
    const NodeIndex node = copy.net.add_node(prefix + std::to_string(l));
    copy.node_of_entity[e] = node;
    copy.entity_of_node.push_back(e);
  }
  for (NodeIndex v = 0; v < copy.net.node_count(); ++v) {
    std::string value = std::to_string(copy.entity_of_node[v]);
    if (noise > 0.0 && rng.uniform() < noise) value += "~";
    copy.net.set_attr(v, kEntityAttr, std::move(value));
  }
  return copy;
}

void add_edges(Copy& copy, const EdgeList& base, double retain, Rng& rng) {
  for (const auto& [a, b] : base) {
    const auto u = copy.node_of_entity[a];
    const auto v = copy.node_of_entity[b];
    if (u < 0 || v < 0) continue;
    if (rng.uniform() < retain) {
      copy.net.add_edge(static_cast<NodeIndex>(u), static_cast<NodeIndex>(v));
    }
  }
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n_entities < 2) throw Error("invalid-config", "n_entities must be at least 2");
  check_probability(er_p, "er_p");
  check_probability(edge_retain_x, "edge_retain_x");
  check_probability(edge_retain_y, "edge_retain_y");
  check_probability(node_drop_x, "node_drop_x");
  check_probability(node_drop_y, "node_drop_y");
  check_probability(attr_noise, "attr_noise");
  if (base_model == BaseModel::preferential_attachment && pa_edges < 1) {
    throw Error("invalid-config", "m_edges must be at least 1");
  }
}

GeneratedPair generate_pair(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  const std::size_t n = cfg.n_entities;
  const EdgeList base = cfg.base_model == BaseModel::erdos_renyi
                            ? erdos_renyi(n, cfg.er_p, rng)
                            : preferential_attachment(n, cfg.pa_edges, rng);

  Copy x = make_copy(n, cfg.node_drop_x, "x", 0.0, rng);
  Copy y = make_copy(n, cfg.node_drop_y, "y", cfg.attr_noise, rng);
  if (x.net.node_count() == 0) throw Error("degenerate-config", "every node dropped from X");
  if (y.net.node_count() == 0) throw Error("degenerate-config", "every node dropped from Y");
  add_edges(x, base, cfg.edge_retain_x, rng);
  add_edges(y, base, cfg.edge_retain_y, rng);

  std::vector<NodePair> truth_pairs;
  for (std::size_t e = 0; e < n; ++e) {
    if (x.node_of_entity[e] >= 0 && y.node_of_entity[e] >= 0) {
      truth_pairs.emplace_back(static_cast<NodeIndex>(x.node_of_entity[e]),
                               static_cast<NodeIndex>(y.node_of_entity[e]));
    }
  }
  GeneratedPair out{NetworkPair(std::move(x.net), std::move(y.net)), MatchSet{},
                    std::move(x.entity_of_node), std::move(y.entity_of_node)};
  out.truth = MatchSet::for_pair(out.pair, MatchRole::actual);
  out.truth.set_ky_cap(1);
  for (const auto& [a, b] : truth_pairs) out.truth.insert(a, b);
  return out;
}

}  // namespace matchcert
