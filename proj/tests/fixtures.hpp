#pragma once

#include <string>
#include <vector>

#include "matchcert/error.hpp"
#include "matchcert/graph.hpp"

namespace fixture {

template <typename Fn>
std::string code_of(Fn&& fn) {
  try {
    fn();
  } catch (const matchcert::Error& e) {
    return e.code();
  }
  return "";
}

inline matchcert::Network numbered(const std::string& prefix, std::size_t count) {
  matchcert::Network net;
  for (std::size_t i = 0; i < count; ++i) net.add_node(prefix + std::to_string(i));
  return net;
}

/// Edgeless X and Y with nodes x0.. and y0..; index i of X is index i of Y.
inline matchcert::NetworkPair numbered_pair(std::size_t x_count, std::size_t y_count) {
  return matchcert::NetworkPair(numbered("x", x_count), numbered("y", y_count));
}

/// Pairs (i, i) for i in [first, last).
inline matchcert::MatchSet diagonal(const matchcert::NetworkPair& pair, std::size_t first,
                                    std::size_t last) {
  auto m = matchcert::MatchSet::for_pair(pair);
  for (std::size_t i = first; i < last; ++i) {
    m.insert(static_cast<matchcert::NodeIndex>(i), static_cast<matchcert::NodeIndex>(i));
  }
  return m;
}

inline std::vector<matchcert::NodeIndex> range(std::size_t first, std::size_t last) {
  std::vector<matchcert::NodeIndex> out;
  for (std::size_t i = first; i < last; ++i) out.push_back(static_cast<matchcert::NodeIndex>(i));
  return out;
}

}  // namespace fixture
