#ifndef ECHOVERIFY_NETCONFIG_HPP
#define ECHOVERIFY_NETCONFIG_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "echoverify/errors.hpp"
#include "echoverify/node_set.hpp"

namespace echoverify {

using Edge = std::pair<NodeId, NodeId>;

/// A rooted undirected network: the immutable part of a protocol instance.
///
/// Construction only checks the shape (node count in range, adjacency entries
/// name existing nodes). Whether the network satisfies the protocol's
/// assumptions is a separate question answered by is_valid_config().
class Config {
 public:
  Config() = default;
  /// Throws ConfigError on a malformed shape.
  Config(int node_count, NodeId initiator, std::span<const NodeSet> adjacency);

  /// Undirected edge list; each edge is inserted in both directions.
  static Config from_edges(int node_count, NodeId initiator,
                           std::span<const Edge> edges);

  int node_count() const { return node_count_; }
  NodeId initiator() const { return initiator_; }
  NodeSet neighbors(NodeId n) const { return adjacency_[n]; }
  NodeSet nodes() const { return NodeSet::first_n(node_count_); }
  std::span<const NodeSet> adjacency() const {
    return {adjacency_.data(), static_cast<std::size_t>(node_count_)};
  }

  /// Edges (i, j) with i < j, ascending. Only meaningful for symmetric adjacency.
  std::vector<Edge> edges() const;

  /// Adjacency masks packed big-endian: adjacency[0] is the most significant
  /// byte, so numeric order equals lexicographic order of the adjacency rows.
  std::uint64_t encoding() const;

  friend bool operator==(const Config&, const Config&) = default;

 private:
  int node_count_ = 1;
  NodeId initiator_ = 0;
  std::array<NodeSet, kMaxNodes> adjacency_{};
};

/// Orders by node count, then initiator, then adjacency encoding.
bool config_less(const Config& a, const Config& b);

/// A bijection on 0..size-1.
class Permutation {
 public:
  /// Throws ConfigError when `mapping` is not a bijection.
  explicit Permutation(std::vector<NodeId> mapping);
  static Permutation identity(int size);

  int size() const { return static_cast<int>(mapping_.size()); }
  NodeId operator()(NodeId n) const { return mapping_[n]; }
  NodeSet operator()(NodeSet s) const;
  const std::vector<NodeId>& mapping() const { return mapping_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<NodeId> mapping_;
};

/// Nodes reachable from `n` in one or more adjacency steps.
NodeSet reachable_set(const Config& c, NodeId n);

/// No self loops, symmetric adjacency, every node reachable from the initiator.
bool is_valid_config(const Config& c);

/// Node i of `c` becomes node p(i); the initiator moves with it.
Config relabel(const Config& c, const Permutation& p);

/// Representative of the rooted-isomorphism class of `c`: initiator at 0 and
/// minimal adjacency encoding over all relabelings of the other nodes.
/// Throws ConfigError for invalid configurations.
Config canonical_form(const Config& c);

/// Initiator-fixing permutations that map the adjacency onto itself, in
/// lexicographic order of their mappings (so the identity comes first).
std::vector<Permutation> automorphisms(const Config& c);

inline constexpr int kMaxEnumerateNodes = 8;

/// Every rooted-isomorphism class with 1..max_nodes nodes, in canonical form,
/// sorted by node count then encoding. Throws ResourceLimitError above
/// kMaxEnumerateNodes.
std::vector<Config> enumerate_canonical(int max_nodes);

/// Number of connected labeled graphs on k nodes, by exhaustive enumeration
/// of edge subsets.
std::uint64_t count_connected_labeled(int k);

/// Valid configurations over a universe of `universe_size` identifiers:
/// sum over k of C(U,k) * k * Conn(k).
std::uint64_t count_labeled(int universe_size);

}  // namespace echoverify

#endif  // ECHOVERIFY_NETCONFIG_HPP
