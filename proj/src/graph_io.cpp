#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "matchcert/error.hpp"
#include "matchcert/graph.hpp"

namespace matchcert {

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string where(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no);
}

// Reads lines with trailing CR stripped; calls fn(line, line_no).
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(std::string_view(line), line_no);
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", "cannot write " + path.string());
  return out;
}

struct PendingAttr {
  std::string node, key, value;
  std::size_t line_no;
};

}  // namespace

Network parse_network(std::istream& in, const std::string& source) {
  Network net;
  std::vector<PendingAttr> attrs;
  for_each_line(in, [&](std::string_view line, std::size_t line_no) {
    if (line.front() == '#') {
      auto fields = split_tabs(line);
      if (fields[0] == "#attr") {
        if (fields.size() != 4 || fields[1].empty() || fields[2].empty()) {
          throw Error("malformed-line", where(source, line_no) + ": expected #attr<TAB>node<TAB>key<TAB>value");
        }
        attrs.push_back({fields[1], fields[2], fields[3], line_no});
      } else if (fields[0] == "#node") {
        if (fields.size() != 2 || fields[1].empty()) {
          throw Error("malformed-line", where(source, line_no) + ": expected #node<TAB>id");
        }
        net.add_node(fields[1]);
      }
      return;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw Error("malformed-line", where(source, line_no) + ": expected u<TAB>v");
    }
    if (fields[0] == fields[1]) {
      throw Error("self-loop", where(source, line_no) + ": " + fields[0]);
    }
    const NodeIndex u = net.add_node(fields[0]);
    const NodeIndex v = net.add_node(fields[1]);
    net.add_edge(u, v);
  });
  for (auto& a : attrs) {
    auto node = net.find(a.node);
    if (!node) throw Error("unknown-node", where(source, a.line_no) + ": " + a.node);
    net.set_attr(*node, std::move(a.key), std::move(a.value));
  }
  return net;
}

Network load_network(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_network(in, path.string());
}

void write_network(std::ostream& out, const Network& net) {
  for (NodeIndex v = 0; v < net.node_count(); ++v) out << "#node\t" << net.id(v) << '\n';
  for (NodeIndex v = 0; v < net.node_count(); ++v) {
    for (const auto& [key, value] : net.attrs(v)) {
      out << "#attr\t" << net.id(v) << '\t' << key << '\t' << value << '\n';
    }
  }
  for (NodeIndex u = 0; u < net.node_count(); ++u) {
    for (NodeIndex v : net.neighbors(u)) {
      if (u < v) out << net.id(u) << '\t' << net.id(v) << '\n';
    }
  }
}

void save_network(const std::filesystem::path& path, const Network& net) {
  auto out = open_out(path);
  write_network(out, net);
}

MatchSet parse_matches(std::istream& in, const NetworkPair& pair, MatchRole role,
                       std::optional<std::size_t> ky_cap, const std::string& source) {
  auto set = MatchSet::for_pair(pair, role);
  set.set_ky_cap(ky_cap);
  for_each_line(in, [&](std::string_view line, std::size_t line_no) {
    if (line.front() == '#') return;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw Error("malformed-line", where(source, line_no) + ": expected x<TAB>y");
    }
    auto x = pair.x_net().find(fields[0]);
    if (!x) throw Error("unknown-node", where(source, line_no) + ": x " + fields[0]);
    auto y = pair.y_net().find(fields[1]);
    if (!y) throw Error("unknown-node", where(source, line_no) + ": y " + fields[1]);
    try {
      set.insert(*x, *y);
    } catch (const Error& e) {
      throw Error(e.code(), where(source, line_no) + ": " + fields[0] + " " + fields[1]);
    }
  });
  return set;
}

MatchSet load_matches(const std::filesystem::path& path, const NetworkPair& pair, MatchRole role,
                      std::optional<std::size_t> ky_cap) {
  auto in = open_in(path);
  return parse_matches(in, pair, role, ky_cap, path.string());
}

void write_matches(std::ostream& out, const NetworkPair& pair, const MatchSet& matches) {
  for (const auto& [x, y] : matches.pairs()) {
    out << pair.x_net().id(x) << '\t' << pair.y_net().id(y) << '\n';
  }
}

void save_matches(const std::filesystem::path& path, const NetworkPair& pair,
                  const MatchSet& matches) {
  auto out = open_out(path);
  write_matches(out, pair, matches);
}

std::vector<std::string> load_item_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::string> items;
  for_each_line(in, [&](std::string_view line, std::size_t line_no) {
    if (line.front() == '#') return;
    if (line.find('\t') != std::string_view::npos) {
      throw Error("malformed-line", where(path.string(), line_no) + ": expected a single id");
    }
    items.emplace_back(line);
  });
  return items;
}

void save_item_list(const std::filesystem::path& path, std::span<const std::string> items) {
  auto out = open_out(path);
  for (const auto& item : items) out << item << '\n';
}

}  // namespace matchcert
