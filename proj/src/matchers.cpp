#include "matchcert/matchers.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "matchcert/error.hpp"

namespace matchcert {

namespace {

struct Ranks {
  std::vector<std::uint32_t> x;
  std::vector<std::uint32_t> y;

  explicit Ranks(const NetworkPair& pair)
      : x(pair.x_net().lexicographic_ranks()), y(pair.y_net().lexicographic_ranks()) {}
};

struct Candidate {
  NodeIndex x;
  NodeIndex y;
  std::uint32_t count;
};

MatchSet step_with(const MatchSet& current, const NetworkPair& pair, std::size_t threshold,
                   const Ranks& ranks, std::vector<std::pair<NodePair, double>>* accepted) {
  const Network& xs = pair.x_net();
  const Network& ys = pair.y_net();
  const std::uint64_t ny = ys.node_count();
  std::vector<bool> x_matched(xs.node_count(), false);
  for (NodeIndex x = 0; x < xs.node_count(); ++x) x_matched[x] = !current.matches_of(x).empty();
  std::vector<bool> y_matched = current.matched_y();

  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  for (const auto& [u, v] : current.pairs()) {
    for (NodeIndex x : xs.neighbors(u)) {
      if (x_matched[x]) continue;
      for (NodeIndex y : ys.neighbors(v)) {
        if (y_matched[y]) continue;
        if (pair.self_match_mode() && x == y) continue;
        ++counts[std::uint64_t{x} * ny + y];
      }
    }
  }

  std::vector<Candidate> candidates;
  for (const auto& [key, count] : counts) {
    if (count >= threshold) {
      candidates.push_back({static_cast<NodeIndex>(key / ny), static_cast<NodeIndex>(key % ny), count});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    return std::make_tuple(b.count, ranks.x[a.x], ranks.y[a.y]) <
           std::make_tuple(a.count, ranks.x[b.x], ranks.y[b.y]);
  });

  MatchSet next = current;
  for (const auto& c : candidates) {
    if (x_matched[c.x] || y_matched[c.y]) continue;
    next.insert(c.x, c.y);
    x_matched[c.x] = true;
    y_matched[c.y] = true;
    if (accepted) accepted->push_back({{c.x, c.y}, static_cast<double>(c.count)});
  }
  return next;
}

MatchSet top_degree_seeds(const NetworkPair& pair, std::size_t k, MatchRole role) {
  auto by_degree = [](const Network& net) {
    const auto rank = net.lexicographic_ranks();
    std::vector<NodeIndex> order(net.node_count());
    std::iota(order.begin(), order.end(), NodeIndex{0});
    std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) {
      if (net.degree(a) != net.degree(b)) return net.degree(a) > net.degree(b);
      return rank[a] < rank[b];
    });
    return order;
  };
  const auto xs = by_degree(pair.x_net());
  const auto ys = by_degree(pair.y_net());
  auto seeds = MatchSet::for_pair(pair, role);
  const std::size_t limit = std::min({k, xs.size(), ys.size()});
  for (std::size_t i = 0; i < limit; ++i) {
    if (pair.self_match_mode() && xs[i] == ys[i]) continue;
    seeds.insert(xs[i], ys[i]);
  }
  return seeds;
}

MatchRole role_of(const MatcherHandle& handle) {
  return handle.is_holdout() ? MatchRole::identified_holdout : MatchRole::identified;
}

}  // namespace

void MatcherConfig::validate() const {
  if (threshold < 1) throw Error("invalid-config", "threshold must be at least 1");
  if (max_iters < 1) throw Error("invalid-config", "max_iters must be at least 1");
  if (kind == MatcherKind::attribute_exact && attr_key.empty()) {
    throw Error("missing-attr-key", "attribute-exact matcher needs attr_key");
  }
}

MatcherHandle MatcherHandle::holdout(MatcherConfig config, std::vector<IdPair> training_seeds,
                                     std::vector<std::string> trained_on) {
  config.validate();
  for (const auto& name : trained_on) {
    if (name == kSampleMatches || name == kSampleNodes) {
      throw Error("holdout-saw-validation", "holdout matcher trained on " + name);
    }
  }
  MatcherHandle h;
  h.config_ = std::move(config);
  std::sort(training_seeds.begin(), training_seeds.end());
  training_seeds.erase(std::unique(training_seeds.begin(), training_seeds.end()),
                       training_seeds.end());
  h.verified_seeds_ = std::move(training_seeds);
  h.trained_on_ = std::move(trained_on);
  h.holdout_ = true;
  return h;
}

MatcherHandle MatcherHandle::complete_with(std::vector<IdPair> validation_seeds,
                                           std::vector<std::string> validation_samples) const {
  MatcherHandle h = *this;
  h.verified_seeds_.insert(h.verified_seeds_.end(), validation_seeds.begin(),
                           validation_seeds.end());
  std::sort(h.verified_seeds_.begin(), h.verified_seeds_.end());
  h.verified_seeds_.erase(std::unique(h.verified_seeds_.begin(), h.verified_seeds_.end()),
                          h.verified_seeds_.end());
  for (auto& name : validation_samples) h.trained_on_.push_back(std::move(name));
  h.holdout_ = false;
  return h;
}

bool MatcherHandle::equivalent(const MatcherHandle& other) const {
  return config_ == other.config_ && verified_seeds_ == other.verified_seeds_;
}

MatchSet resolve_seeds(const MatcherHandle& handle, const NetworkPair& pair) {
  const auto& rule = handle.config().seeds;
  auto seeds = MatchSet::for_pair(pair, role_of(handle));
  auto add_ids = [&](const std::vector<IdPair>& ids) {
    for (const auto& [a, b] : ids) {
      const NodeIndex x = pair.x_net().index_of(a);
      const NodeIndex y = pair.y_net().index_of(b);
      if (pair.self_match_mode() && x == y) throw Error("identity-pair-forbidden", a);
      seeds.insert(x, y);
    }
  };
  switch (rule.kind) {
    case SeedRule::Kind::none:
      break;
    case SeedRule::Kind::top_degree:
      seeds = top_degree_seeds(pair, rule.top_k, role_of(handle));
      break;
    case SeedRule::Kind::verified_sample:
      break;
    case SeedRule::Kind::explicit_pairs:
      add_ids(rule.pairs);
      break;
  }
  // Verified pairs are always trusted, whatever the selection rule.
  add_ids(handle.verified_seeds());
  return seeds;
}

MatchSet percolate_step(const MatchSet& current, const NetworkPair& pair, std::size_t threshold) {
  if (threshold < 1) throw Error("invalid-config", "threshold must be at least 1");
  const Ranks ranks(pair);
  return step_with(current, pair, threshold, ranks, nullptr);
}

ScoredMatches run_batch_scored(const MatcherHandle& handle, const NetworkPair& pair) {
  const auto& cfg = handle.config();
  cfg.validate();
  ScoredMatches out{resolve_seeds(handle, pair), {}};
  for (const auto& p : out.matches.pairs()) out.scores.push_back({p, kSeedScore});

  if (cfg.kind == MatcherKind::attribute_exact) {
    const Network& xs = pair.x_net();
    const Network& ys = pair.y_net();
    std::unordered_map<std::string, std::vector<NodeIndex>> by_value;
    for (NodeIndex y = 0; y < ys.node_count(); ++y) {
      if (const auto* value = ys.attr(y, cfg.attr_key)) by_value[*value].push_back(y);
    }
    for (NodeIndex x = 0; x < xs.node_count(); ++x) {
      const auto* value = xs.attr(x, cfg.attr_key);
      if (!value) continue;
      auto it = by_value.find(*value);
      if (it == by_value.end()) continue;
      for (NodeIndex y : it->second) {
        if (pair.self_match_mode() && x == y) continue;
        if (out.matches.insert(x, y)) out.scores.push_back({{x, y}, 1.0});
      }
    }
  } else {
    const Ranks ranks(pair);
    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
      const std::size_t before = out.matches.size();
      out.matches = step_with(out.matches, pair, cfg.threshold, ranks, &out.scores);
      if (out.matches.size() == before) break;
    }
  }
  std::sort(out.scores.begin(), out.scores.end());
  return out;
}

MatchSet run_batch(const MatcherHandle& handle, const NetworkPair& pair) {
  return run_batch_scored(handle, pair).matches;
}

BaselineQueryMatcher::BaselineQueryMatcher(MatcherHandle handle, const NetworkPair& pair)
    : handle_(std::move(handle)), pair_(pair) {}

PerNodeView BaselineQueryMatcher::query(NodeIndex x) {
  if (!pair_.x_net().contains(x)) throw Error("unknown-node", "x index " + std::to_string(x));
  std::call_once(once_, [&] { result_ = run_batch(handle_, pair_); });
  ++queries_;
  return result_->view(x);
}

PerNodeView run_query(const MatcherHandle& handle, const NetworkPair& pair, NodeIndex x) {
  BaselineQueryMatcher matcher(handle, pair);
  return matcher.query(x);
}

}  // namespace matchcert
