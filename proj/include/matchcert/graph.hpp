#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace matchcert {

using NodeIndex = std::uint32_t;
using NodePair = std::pair<NodeIndex, NodeIndex>;

/// Undirected simple graph over string-identified nodes with flat string
/// attributes. Node indices are dense and follow insertion order.
class Network {
 public:
  using AttrMap = std::map<std::string, std::string, std::less<>>;

  /// Returns the existing index when the id is already present.
  NodeIndex add_node(std::string_view id);
  std::optional<NodeIndex> find(std::string_view id) const;
  /// Throws "unknown-node".
  NodeIndex index_of(std::string_view id) const;
  const std::string& id(NodeIndex node) const { return ids_.at(node); }
  std::size_t node_count() const { return ids_.size(); }
  bool contains(NodeIndex node) const { return node < ids_.size(); }

  /// Returns false for a duplicate edge; throws "self-loop" for u == v.
  bool add_edge(NodeIndex u, NodeIndex v);
  bool has_edge(NodeIndex u, NodeIndex v) const;
  /// Sorted by index.
  std::span<const NodeIndex> neighbors(NodeIndex node) const { return adjacency_.at(node); }
  std::size_t degree(NodeIndex node) const { return adjacency_.at(node).size(); }
  std::size_t edge_count() const { return edge_count_; }

  void set_attr(NodeIndex node, std::string key, std::string value);
  const std::string* attr(NodeIndex node, std::string_view key) const;
  const AttrMap& attrs(NodeIndex node) const { return attrs_.at(node); }

  /// rank[i] is the position of id(i) in lexicographic order of all ids.
  std::vector<std::uint32_t> lexicographic_ranks() const;

  bool operator==(const Network& other) const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<NodeIndex>> adjacency_;
  std::vector<AttrMap> attrs_;
  std::size_t edge_count_ = 0;
};

/// The two node universes. In self-match mode both sides are the same
/// network and identity pairs (v, v) are illegal in every match set.
class NetworkPair {
 public:
  NetworkPair(Network x, Network y);
  static NetworkPair self_match(Network net);

  const Network& x_net() const { return *x_; }
  const Network& y_net() const { return *y_; }
  bool self_match_mode() const { return self_match_; }

 private:
  NetworkPair(std::shared_ptr<const Network> x, std::shared_ptr<const Network> y, bool self);

  std::shared_ptr<const Network> x_;
  std::shared_ptr<const Network> y_;
  bool self_match_ = false;
};

enum class MatchRole { actual, identified, identified_holdout };

struct PerNodeView {
  NodeIndex node = 0;
  std::vector<NodeIndex> matched;  // sorted
};

/// Set of (x, y) pairs with an x-indexed view. Several x may share one y.
class MatchSet {
 public:
  MatchSet() = default;
  MatchSet(std::size_t x_count, std::size_t y_count, MatchRole role = MatchRole::identified,
           bool forbid_identity = false);
  static MatchSet for_pair(const NetworkPair& pair, MatchRole role = MatchRole::identified);

  /// Returns false when the pair is already present. Throws "unknown-node",
  /// "identity-pair-forbidden", or "ky-violated" (actual role with a cap).
  bool insert(NodeIndex x, NodeIndex y);
  bool contains(NodeIndex x, NodeIndex y) const;

  std::span<const NodeIndex> matches_of(NodeIndex x) const;
  PerNodeView view(NodeIndex x) const;
  /// m(x); throws "ky-violated" when a declared cap is exceeded.
  std::size_t match_count(NodeIndex x) const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t x_count() const { return by_x_.size(); }
  std::size_t y_count() const { return y_count_; }
  MatchRole role() const { return role_; }
  bool forbids_identity() const { return forbid_identity_; }

  void set_ky_cap(std::optional<std::size_t> cap);
  std::optional<std::size_t> ky_cap() const { return ky_cap_; }

  /// All pairs ordered by (x, y).
  std::vector<NodePair> pairs() const;
  /// y nodes appearing in at least one pair.
  std::vector<bool> matched_y() const;

  /// |this \ other|
  std::size_t difference_size(const MatchSet& other) const;
  /// |this ∩ other|
  std::size_t intersection_size(const MatchSet& other) const;

  bool operator==(const MatchSet& other) const { return by_x_ == other.by_x_; }

 private:
  void check_x(NodeIndex x) const;

  std::vector<std::vector<NodeIndex>> by_x_;
  std::size_t y_count_ = 0;
  std::size_t size_ = 0;
  MatchRole role_ = MatchRole::identified;
  bool forbid_identity_ = false;
  std::optional<std::size_t> ky_cap_;
};

// Edge TSV: `u<TAB>v` per line, `#attr<TAB>node<TAB>key<TAB>value` attribute
// directives and `#node<TAB>id` declarations for nodes without edges. Other
// `#` lines are comments.
Network parse_network(std::istream& in, const std::string& source = "<stream>");
Network load_network(const std::filesystem::path& path);
void write_network(std::ostream& out, const Network& net);
void save_network(const std::filesystem::path& path, const Network& net);

// Match TSV: `x<TAB>y` per line.
MatchSet parse_matches(std::istream& in, const NetworkPair& pair, MatchRole role,
                       std::optional<std::size_t> ky_cap = std::nullopt,
                       const std::string& source = "<stream>");
MatchSet load_matches(const std::filesystem::path& path, const NetworkPair& pair, MatchRole role,
                      std::optional<std::size_t> ky_cap = std::nullopt);
void write_matches(std::ostream& out, const NetworkPair& pair, const MatchSet& matches);
void save_matches(const std::filesystem::path& path, const NetworkPair& pair,
                  const MatchSet& matches);

// Item lists: one id per line, comments and blank lines skipped.
std::vector<std::string> load_item_list(const std::filesystem::path& path);
void save_item_list(const std::filesystem::path& path, std::span<const std::string> items);

}  // namespace matchcert
