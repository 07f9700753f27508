#ifndef ECHOVERIFY_PROTOCOL_HPP
#define ECHOVERIFY_PROTOCOL_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "echoverify/netconfig.hpp"

namespace echoverify {

/// Chang starts with no parents; Fixed makes the initiator its own parent so
/// it counts as explored before the first message arrives.
enum class Variant { Chang, Fixed };

enum class MessageKind { Explorer, Echo };

std::string_view to_string(Variant v);
std::string_view to_string(MessageKind k);
std::optional<Variant> parse_variant(std::string_view s);
std::optional<MessageKind> parse_message_kind(std::string_view s);

/// Processing of one pending message: `node` consumes a `kind` message sent
/// by `from`.
struct Event {
  NodeId node = 0;
  MessageKind kind = MessageKind::Explorer;
  NodeId from = 0;

  friend bool operator==(const Event&, const Event&) = default;
  friend auto operator<=>(const Event&, const Event&) = default;
};

/// Mutable protocol state for one network.
///
/// Inboxes are split by message kind: a message (from s, kind k) is pending
/// at n iff s is in the kind-k inbox of n. Entries at index >= node_count are
/// unused and stay empty. The layout is a flat 32-byte value so states hash
/// and compare cheaply.
class ProtocolState {
 public:
  std::optional<NodeId> parent(NodeId n) const {
    if (parent_[n] < 0) return std::nullopt;
    return parent_[n];
  }
  void set_parent(NodeId n, std::optional<NodeId> p) {
    parent_[n] = static_cast<std::int8_t>(p.value_or(-1));
  }

  NodeSet received(NodeId n) const { return received_[n]; }
  NodeSet& received(NodeId n) { return received_[n]; }

  NodeSet inbox(NodeId n, MessageKind k) const {
    return k == MessageKind::Explorer ? explorer_[n] : echo_[n];
  }
  NodeSet& inbox(NodeId n, MessageKind k) {
    return k == MessageKind::Explorer ? explorer_[n] : echo_[n];
  }

  bool has_pending_messages() const;

  /// Raw parent slot: -1 for none, otherwise the parent id (may be out of
  /// range in hand-built states; well_formed() rejects those).
  std::int8_t raw_parent(NodeId n) const { return parent_[n]; }

  std::size_t hash() const;

  friend bool operator==(const ProtocolState&, const ProtocolState&) = default;
  friend auto operator<=>(const ProtocolState&, const ProtocolState&) = default;

 private:
  std::array<std::int8_t, kMaxNodes> parent_ = {-1, -1, -1, -1, -1, -1, -1, -1};
  std::array<NodeSet, kMaxNodes> received_{};
  std::array<NodeSet, kMaxNodes> explorer_{};
  std::array<NodeSet, kMaxNodes> echo_{};
};

struct ProtocolStateHash {
  std::size_t operator()(const ProtocolState& s) const { return s.hash(); }
};

/// Throws ConfigError when `c` is invalid.
ProtocolState initial_state(const Config& c, Variant v);

/// One event per pending message, ordered by node, then Explorer before
/// Echo, then sender.
std::vector<Event> enabled_events(const Config& c, const ProtocolState& s);

bool is_enabled(const ProtocolState& s, const Event& e);

/// Throws ContractError when `e` is not enabled in `s`.
ProtocolState apply_event(const Config& c, const ProtocolState& s,
                          const Event& e);

/// The initiator has received echoes from all its neighbors.
bool finish(const Config& c, const ProtocolState& s);

/// Nodes reachable from `n` by one or more parent steps.
NodeSet ancestors(const ProtocolState& s, NodeId n);

/// Every non-initiator has the initiator among its ancestors.
bool spanning_tree(const Config& c, const ProtocolState& s);

/// Runtime type check: every recorded identifier names a node of `c` and
/// unused slots are empty.
bool well_formed(const Config& c, const ProtocolState& s);

/// Relabels every node reference in `s` through `p`.
ProtocolState permute_state(const ProtocolState& s, const Permutation& p);

}  // namespace echoverify

#endif  // ECHOVERIFY_PROTOCOL_HPP
