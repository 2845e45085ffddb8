#include "matchcert/graph.hpp"

#include <algorithm>
#include <numeric>

#include "matchcert/error.hpp"

namespace matchcert {

NodeIndex Network::add_node(std::string_view id) {
  if (id.empty()) throw Error("empty-node-id");
  std::string key(id);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const auto node = static_cast<NodeIndex>(ids_.size());
  index_.emplace(key, node);
  ids_.push_back(std::move(key));
  adjacency_.emplace_back();
  attrs_.emplace_back();
  return node;
}

std::optional<NodeIndex> Network::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Network::index_of(std::string_view id) const {
  if (auto node = find(id)) return *node;
  throw Error("unknown-node", std::string(id));
}

bool Network::add_edge(NodeIndex u, NodeIndex v) {
  if (!contains(u) || !contains(v)) throw Error("unknown-node", "edge endpoint out of range");
  if (u == v) throw Error("self-loop", ids_[u]);
  auto& nu = adjacency_[u];
  auto pos = std::lower_bound(nu.begin(), nu.end(), v);
  if (pos != nu.end() && *pos == v) return false;
  nu.insert(pos, v);
  auto& nv = adjacency_[v];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++edge_count_;
  return true;
}

bool Network::has_edge(NodeIndex u, NodeIndex v) const {
  if (!contains(u) || !contains(v)) return false;
  const auto& nu = adjacency_[u];
  return std::binary_search(nu.begin(), nu.end(), v);
}

void Network::set_attr(NodeIndex node, std::string key, std::string value) {
  attrs_.at(node)[std::move(key)] = std::move(value);
}

const std::string* Network::attr(NodeIndex node, std::string_view key) const {
  const auto& map = attrs_.at(node);
  auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

std::vector<std::uint32_t> Network::lexicographic_ranks() const {
  std::vector<NodeIndex> order(ids_.size());
  std::iota(order.begin(), order.end(), NodeIndex{0});
  std::sort(order.begin(), order.end(), [&](NodeIndex a, NodeIndex b) { return ids_[a] < ids_[b]; });
  std::vector<std::uint32_t> rank(ids_.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<std::uint32_t>(i);
  return rank;
}

bool Network::operator==(const Network& other) const {
  return ids_ == other.ids_ && adjacency_ == other.adjacency_ && attrs_ == other.attrs_;
}

NetworkPair::NetworkPair(Network x, Network y)
    : NetworkPair(std::make_shared<const Network>(std::move(x)),
                  std::make_shared<const Network>(std::move(y)), false) {}

NetworkPair::NetworkPair(std::shared_ptr<const Network> x, std::shared_ptr<const Network> y,
                         bool self)
    : x_(std::move(x)), y_(std::move(y)), self_match_(self) {}

NetworkPair NetworkPair::self_match(Network net) {
  auto shared = std::make_shared<const Network>(std::move(net));
  return NetworkPair(shared, shared, true);
}

MatchSet::MatchSet(std::size_t x_count, std::size_t y_count, MatchRole role, bool forbid_identity)
    : by_x_(x_count), y_count_(y_count), role_(role), forbid_identity_(forbid_identity) {}

MatchSet MatchSet::for_pair(const NetworkPair& pair, MatchRole role) {
  return MatchSet(pair.x_net().node_count(), pair.y_net().node_count(), role,
                  pair.self_match_mode());
}

void MatchSet::check_x(NodeIndex x) const {
  if (x >= by_x_.size()) throw Error("unknown-node", "x index " + std::to_string(x));
}

bool MatchSet::insert(NodeIndex x, NodeIndex y) {
  check_x(x);
  if (y >= y_count_) throw Error("unknown-node", "y index " + std::to_string(y));
  if (forbid_identity_ && x == y) throw Error("identity-pair-forbidden");
  auto& row = by_x_[x];
  auto pos = std::lower_bound(row.begin(), row.end(), y);
  if (pos != row.end() && *pos == y) return false;
  if (role_ == MatchRole::actual && ky_cap_ && row.size() + 1 > *ky_cap_) {
    throw Error("ky-violated", "x index " + std::to_string(x) + " exceeds k_y=" +
                                   std::to_string(*ky_cap_));
  }
  row.insert(pos, y);
  ++size_;
  return true;
}

bool MatchSet::contains(NodeIndex x, NodeIndex y) const {
  if (x >= by_x_.size()) return false;
  const auto& row = by_x_[x];
  return std::binary_search(row.begin(), row.end(), y);
}

std::span<const NodeIndex> MatchSet::matches_of(NodeIndex x) const {
  check_x(x);
  return by_x_[x];
}

PerNodeView MatchSet::view(NodeIndex x) const {
  auto span = matches_of(x);
  return PerNodeView{x, std::vector<NodeIndex>(span.begin(), span.end())};
}

std::size_t MatchSet::match_count(NodeIndex x) const {
  const std::size_t count = matches_of(x).size();
  if (role_ == MatchRole::actual && ky_cap_ && count > *ky_cap_) {
    throw Error("ky-violated", "m(x)=" + std::to_string(count));
  }
  return count;
}

void MatchSet::set_ky_cap(std::optional<std::size_t> cap) {
  if (cap && *cap < 1) throw Error("invalid-ky", "k_y must be at least 1");
  ky_cap_ = cap;
  if (role_ == MatchRole::actual && cap) {
    for (std::size_t x = 0; x < by_x_.size(); ++x) match_count(static_cast<NodeIndex>(x));
  }
}

std::vector<NodePair> MatchSet::pairs() const {
  std::vector<NodePair> out;
  out.reserve(size_);
  for (std::size_t x = 0; x < by_x_.size(); ++x) {
    for (NodeIndex y : by_x_[x]) out.emplace_back(static_cast<NodeIndex>(x), y);
  }
  return out;
}

std::vector<bool> MatchSet::matched_y() const {
  std::vector<bool> out(y_count_, false);
  for (const auto& row : by_x_) {
    for (NodeIndex y : row) out[y] = true;
  }
  return out;
}

std::size_t MatchSet::difference_size(const MatchSet& other) const {
  std::size_t count = 0;
  for (std::size_t x = 0; x < by_x_.size(); ++x) {
    for (NodeIndex y : by_x_[x]) {
      if (!other.contains(static_cast<NodeIndex>(x), y)) ++count;
    }
  }
  return count;
}

std::size_t MatchSet::intersection_size(const MatchSet& other) const {
  return size_ - difference_size(other);
}

}  // namespace matchcert
