#include "echoverify/netconfig.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace echoverify {

namespace {

void require_node_count(int node_count) {
  if (node_count < 1 || node_count > kMaxNodes) {
    throw ConfigError("node count " + std::to_string(node_count) +
                      " outside 1.." + std::to_string(kMaxNodes));
  }
}

// All non-initiator nodes of an n-node network rooted at `root`, ascending.
std::vector<NodeId> others(int n, NodeId root) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < n; ++i) {
    if (i != root) out.push_back(i);
  }
  return out;
}

NodeSet map_set(NodeSet s, std::span<const NodeId> mapping) {
  NodeSet out;
  for (NodeId m : s) out.insert(mapping[m]);
  return out;
}

}  // namespace

Config::Config(int node_count, NodeId initiator,
               std::span<const NodeSet> adjacency)
    : node_count_(node_count), initiator_(initiator) {
  require_node_count(node_count);
  if (initiator < 0 || initiator >= node_count) {
    throw ConfigError("initiator " + std::to_string(initiator) +
                      " is not a node");
  }
  if (static_cast<int>(adjacency.size()) != node_count) {
    throw ConfigError("adjacency has " + std::to_string(adjacency.size()) +
                      " entries, expected " + std::to_string(node_count));
  }
  const NodeSet all = NodeSet::first_n(node_count);
  for (int n = 0; n < node_count; ++n) {
    if (!adjacency[n].is_subset_of(all)) {
      throw ConfigError("adjacency of node " + std::to_string(n) +
                        " names a node outside 0.." +
                        std::to_string(node_count - 1));
    }
    adjacency_[n] = adjacency[n];
  }
}

Config Config::from_edges(int node_count, NodeId initiator,
                          std::span<const Edge> edges) {
  require_node_count(node_count);
  std::vector<NodeSet> adj(node_count);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= node_count || b < 0 || b >= node_count) {
      throw ConfigError("edge " + std::to_string(a) + "-" + std::to_string(b) +
                        " names a node outside 0.." +
                        std::to_string(node_count - 1));
    }
    adj[a].insert(b);
    adj[b].insert(a);
  }
  return Config(node_count, initiator, adj);
}

std::vector<Edge> Config::edges() const {
  std::vector<Edge> out;
  for (NodeId i = 0; i < node_count_; ++i) {
    for (NodeId j : adjacency_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

std::uint64_t Config::encoding() const {
  std::uint64_t code = 0;
  for (int i = 0; i < kMaxNodes; ++i) code = (code << 8) | adjacency_[i].bits();
  return code;
}

bool config_less(const Config& a, const Config& b) {
  if (a.node_count() != b.node_count()) return a.node_count() < b.node_count();
  if (a.initiator() != b.initiator()) return a.initiator() < b.initiator();
  return a.encoding() < b.encoding();
}

Permutation::Permutation(std::vector<NodeId> mapping)
    : mapping_(std::move(mapping)) {
  std::vector<bool> seen(mapping_.size(), false);
  for (NodeId m : mapping_) {
    if (m < 0 || m >= size() || seen[m]) {
      throw ConfigError("mapping is not a bijection");
    }
    seen[m] = true;
  }
}

Permutation Permutation::identity(int size) {
  std::vector<NodeId> m(size);
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

NodeSet Permutation::operator()(NodeSet s) const { return map_set(s, mapping_); }

Permutation Permutation::inverse() const {
  std::vector<NodeId> inv(mapping_.size());
  for (NodeId i = 0; i < size(); ++i) inv[mapping_[i]] = i;
  return Permutation(std::move(inv));
}

NodeSet reachable_set(const Config& c, NodeId n) {
  NodeSet frontier = c.neighbors(n);
  NodeSet seen = frontier;
  while (!frontier.empty()) {
    NodeSet next;
    for (NodeId x : frontier) next |= c.neighbors(x);
    frontier = next - seen;
    seen |= next;
  }
  return seen;
}

bool is_valid_config(const Config& c) {
  for (NodeId n = 0; n < c.node_count(); ++n) {
    if (c.neighbors(n).contains(n)) return false;
    for (NodeId m : c.neighbors(n)) {
      if (!c.neighbors(m).contains(n)) return false;
    }
  }
  const NodeSet must_reach = c.nodes().without(c.initiator());
  return must_reach.is_subset_of(reachable_set(c, c.initiator()));
}

Config relabel(const Config& c, const Permutation& p) {
  if (p.size() != c.node_count()) {
    throw ConfigError("permutation size does not match node count");
  }
  std::vector<NodeSet> adj(c.node_count());
  for (NodeId n = 0; n < c.node_count(); ++n) adj[p(n)] = p(c.neighbors(n));
  return Config(c.node_count(), p(c.initiator()), adj);
}

Config canonical_form(const Config& c) {
  if (!is_valid_config(c)) {
    throw ConfigError("canonical_form requires a valid configuration");
  }
  const int n = c.node_count();
  // order[k] is the original node that receives label k + 1.
  std::vector<NodeId> order = others(n, c.initiator());
  std::vector<NodeId> mapping(n);
  mapping[c.initiator()] = 0;

  std::array<NodeSet, kMaxNodes> best{};
  bool have_best = false;
  std::array<NodeSet, kMaxNodes> rows{};
  do {
    for (int k = 0; k < n - 1; ++k) mapping[order[k]] = k + 1;
    // Build rows in label order, abandoning as soon as a prefix is larger.
    bool smaller = !have_best;
    bool larger = false;
    for (NodeId label = 0; label < n && !larger; ++label) {
      const NodeId original = label == 0 ? c.initiator() : order[label - 1];
      rows[label] = map_set(c.neighbors(original), mapping);
      if (!smaller) {
        if (rows[label] < best[label]) {
          smaller = true;
        } else if (best[label] < rows[label]) {
          larger = true;
        }
      }
    }
    if (smaller && !larger) {
      best = rows;
      have_best = true;
    }
  } while (std::next_permutation(order.begin(), order.end()));

  return Config(n, 0, std::span<const NodeSet>(best.data(), n));
}

std::vector<Permutation> automorphisms(const Config& c) {
  const int n = c.node_count();
  const std::vector<NodeId> base = others(n, c.initiator());
  std::vector<NodeId> rest = base;
  std::vector<Permutation> out;
  std::vector<NodeId> mapping(n);
  mapping[c.initiator()] = c.initiator();
  do {
    for (std::size_t k = 0; k < rest.size(); ++k) {
      mapping[base[k]] = rest[k];
    }
    bool preserves = true;
    for (NodeId x = 0; x < n && preserves; ++x) {
      preserves = map_set(c.neighbors(x), mapping) == c.neighbors(mapping[x]);
    }
    if (preserves) out.emplace_back(mapping);
  } while (std::next_permutation(rest.begin(), rest.end()));
  return out;
}

std::vector<Config> enumerate_canonical(int max_nodes) {
  if (max_nodes < 1 || max_nodes > kMaxEnumerateNodes) {
    throw ResourceLimitError("max_nodes must be within 1.." +
                             std::to_string(kMaxEnumerateNodes));
  }
  std::vector<Config> all;
  const NodeSet none[1] = {};
  std::vector<Config> layer = {Config(1, 0, none)};
  all.insert(all.end(), layer.begin(), layer.end());

  // Every connected rooted graph on k >= 2 nodes has a non-root vertex whose
  // removal leaves it connected (a deepest leaf of a BFS tree), so extending
  // each (k-1)-node class by one vertex reaches every k-node class.
  for (int k = 2; k <= max_nodes; ++k) {
    std::set<std::uint64_t> seen;
    std::vector<Config> next;
    for (const Config& base : layer) {
      std::vector<NodeSet> adj(base.adjacency().begin(), base.adjacency().end());
      adj.emplace_back();
      for (unsigned attach = 1; attach < (1u << (k - 1)); ++attach) {
        const NodeSet link = NodeSet::from_bits(attach);
        std::vector<NodeSet> grown = adj;
        grown[k - 1] = link;
        for (NodeId m : link) grown[m].insert(k - 1);
        Config canon = canonical_form(Config(k, 0, grown));
        if (seen.insert(canon.encoding()).second) next.push_back(canon);
      }
    }
    std::sort(next.begin(), next.end(), config_less);
    all.insert(all.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return all;
}

std::uint64_t count_connected_labeled(int k) {
  if (k < 1 || k > kMaxNodes) {
    throw ResourceLimitError("k must be within 1.." + std::to_string(kMaxNodes));
  }
  std::vector<Edge> slots;
  for (NodeId i = 0; i < k; ++i) {
    for (NodeId j = i + 1; j < k; ++j) slots.emplace_back(i, j);
  }
  const NodeSet all = NodeSet::first_n(k);
  std::uint64_t connected = 0;
  const std::uint64_t subsets = std::uint64_t{1} << slots.size();
  std::array<NodeSet, kMaxNodes> adj{};
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    adj.fill(NodeSet{});
    for (std::size_t e = 0; e < slots.size(); ++e) {
      if ((mask >> e) & 1u) {
        adj[slots[e].first].insert(slots[e].second);
        adj[slots[e].second].insert(slots[e].first);
      }
    }
    NodeSet seen{0};
    NodeSet frontier{0};
    while (!frontier.empty()) {
      NodeSet next;
      for (NodeId x : frontier) next |= adj[x];
      frontier = next - seen;
      seen |= next;
    }
    if (seen == all) ++connected;
  }
  return connected;
}

std::uint64_t count_labeled(int universe_size) {
  if (universe_size < 1 || universe_size > kMaxNodes) {
    throw ResourceLimitError("universe size must be within 1.." +
                             std::to_string(kMaxNodes));
  }
  std::uint64_t total = 0;
  std::uint64_t choose = 1;  // C(U, k)
  for (int k = 1; k <= universe_size; ++k) {
    choose = choose * (universe_size - k + 1) / k;
    total += choose * static_cast<std::uint64_t>(k) * count_connected_labeled(k);
  }
  return total;
}

}  // namespace echoverify
