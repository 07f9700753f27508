#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

namespace oracle {

std::uint64_t brute_force_labeled_count(int universe) {
  std::uint64_t total = 0;
  for (unsigned subset = 1; subset < (1u << universe); ++subset) {
    std::vector<NodeId> members;
    for (int i = 0; i < universe; ++i) {
      if ((subset >> i) & 1u) members.push_back(i);
    }
    const int k = static_cast<int>(members.size());
    // adj is any function Node -> SUBSET Node: k rows of k bits each. The
    // valuation is renamed onto 0..k-1 (order preserving) before filtering.
    const std::uint64_t functions = std::uint64_t{1} << (k * k);
    for (std::uint64_t f = 0; f < functions; ++f) {
      std::vector<NodeSet> adj(k);
      for (int row = 0; row < k; ++row) {
        adj[row] = NodeSet::from_bits(static_cast<unsigned>((f >> (row * k)) & ((1u << k) - 1)));
      }
      for (int init = 0; init < k; ++init) {
        if (is_valid_config(Config(k, init, adj))) ++total;
      }
    }
  }
  return total;
}

std::vector<Config> labeled_configs(int k) {
  std::vector<Edge> slots;
  for (NodeId i = 0; i < k; ++i) {
    for (NodeId j = i + 1; j < k; ++j) slots.emplace_back(i, j);
  }
  std::vector<Config> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < slots.size(); ++e) {
      if ((mask >> e) & 1u) edges.push_back(slots[e]);
    }
    for (NodeId init = 0; init < k; ++init) {
      Config c = Config::from_edges(k, init, edges);
      if (is_valid_config(c)) out.push_back(c);
    }
  }
  return out;
}

Config brute_force_canonical(const Config& c) {
  std::vector<NodeId> perm(c.node_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::optional<Config> best;
  do {
    Permutation p(perm);
    if (p(c.initiator()) != 0) continue;
    Config image = relabel(c, p);
    if (!best || image.encoding() < best->encoding()) best = image;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return *best;
}

std::vector<Permutation> brute_force_automorphisms(const Config& c) {
  std::vector<NodeId> perm(c.node_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Permutation> out;
  do {
    Permutation p(perm);
    if (p(c.initiator()) == c.initiator() && relabel(c, p) == c) out.push_back(p);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

NaiveGraph naive_explore(const Config& c, Variant v) {
  NaiveGraph g;
  std::vector<ProtocolState> work = {initial_state(c, v)};
  while (!work.empty()) {
    ProtocolState s = work.back();
    work.pop_back();
    if (g.successors.count(s)) continue;
    auto& succ = g.successors[s];
    for (const Event& e : enabled_events(c, s)) {
      ProtocolState next = apply_event(c, s, e);
      succ.push_back(next);
      if (!g.successors.count(next)) work.push_back(next);
    }
  }
  return g;
}

bool naive_correctness_violated(const Config& c, Variant v) {
  const NaiveGraph g = naive_explore(c, v);
  return std::any_of(g.successors.begin(), g.successors.end(), [&](const auto& kv) {
    return finish(c, kv.first) && !spanning_tree(c, kv.first);
  });
}

bool scc_termination_violated(const Config& c, Variant v) {
  const NaiveGraph g = naive_explore(c, v);
  const ProtocolState init = initial_state(c, v);
  if (finish(c, init)) return false;

  // Non-finish states reachable through non-finish states.
  std::map<ProtocolState, int> id;
  std::vector<ProtocolState> nodes;
  std::deque<ProtocolState> queue = {init};
  id[init] = 0;
  nodes.push_back(init);
  while (!queue.empty()) {
    ProtocolState s = queue.front();
    queue.pop_front();
    for (const ProtocolState& t : g.successors.at(s)) {
      if (finish(c, t) || id.count(t)) continue;
      id[t] = static_cast<int>(nodes.size());
      nodes.push_back(t);
      queue.push_back(t);
    }
  }
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    if (g.successors.at(nodes[i]).empty()) return true;  // fair stutter forever
    for (const ProtocolState& t : g.successors.at(nodes[i])) {
      if (!finish(c, t)) adj[i].push_back(id.at(t));
    }
  }

  // Tarjan: a non-trivial SCC (or self loop) is a fair non-progress cycle.
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0;
  bool cyclic = false;
  std::function<void(int)> connect = [&](int u) {
    index[u] = low[u] = counter++;
    stack.push_back(u);
    on_stack[u] = true;
    for (int w : adj[u]) {
      if (w == u) cyclic = true;
      if (index[w] < 0) {
        connect(w);
        low[u] = std::min(low[u], low[w]);
      } else if (on_stack[w]) {
        low[u] = std::min(low[u], index[w]);
      }
    }
    if (low[u] == index[u]) {
      int size = 0;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        ++size;
      } while (w != u);
      if (size > 1) cyclic = true;
    }
  };
  for (int i = 0; i < n; ++i) {
    if (index[i] < 0) connect(i);
  }
  return cyclic;
}

std::optional<std::size_t> layered_distance(const Config& c, Variant v, Target target) {
  std::set<ProtocolState> seen;
  std::vector<ProtocolState> layer = {initial_state(c, v)};
  seen.insert(layer.front());
  for (std::size_t depth = 0; !layer.empty(); ++depth) {
    for (const ProtocolState& s : layer) {
      if (satisfies(target, c, s)) return depth;
    }
    std::vector<ProtocolState> next;
    for (const ProtocolState& s : layer) {
      for (const Event& e : enabled_events(c, s)) {
        ProtocolState t = apply_event(c, s, e);
        if (seen.insert(t).second) next.push_back(t);
      }
    }
    layer = std::move(next);
  }
  return std::nullopt;
}

Config random_config(std::mt19937& rng, int max_nodes) {
  const int n = std::uniform_int_distribution<int>(1, max_nodes)(rng);
  for (;;) {
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (rng() % 2) edges.emplace_back(i, j);
      }
    }
    const NodeId init = std::uniform_int_distribution<int>(0, n - 1)(rng);
    Config c = Config::from_edges(n, init, edges);
    if (is_valid_config(c)) return c;
  }
}

Permutation random_permutation(std::mt19937& rng, int n) {
  std::vector<NodeId> m(n);
  std::iota(m.begin(), m.end(), 0);
  std::shuffle(m.begin(), m.end(), rng);
  return Permutation(m);
}

std::vector<ProtocolState> random_walk(std::mt19937& rng, const Config& c, Variant v,
                                       int steps) {
  std::vector<ProtocolState> out = {initial_state(c, v)};
  for (int k = 0; k < steps; ++k) {
    const std::vector<Event> events = enabled_events(c, out.back());
    if (events.empty()) break;
    out.push_back(apply_event(c, out.back(), events[rng() % events.size()]));
  }
  return out;
}

}  // namespace oracle
