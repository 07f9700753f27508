#include "echoverify/protocol.hpp"

#include <cstring>
#include <string>

namespace echoverify {

std::string_view to_string(Variant v) {
  return v == Variant::Chang ? "chang" : "fixed";
}

std::string_view to_string(MessageKind k) {
  return k == MessageKind::Explorer ? "Explorer" : "Echo";
}

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "chang") return Variant::Chang;
  if (s == "fixed") return Variant::Fixed;
  return std::nullopt;
}

std::optional<MessageKind> parse_message_kind(std::string_view s) {
  if (s == "Explorer") return MessageKind::Explorer;
  if (s == "Echo") return MessageKind::Echo;
  return std::nullopt;
}

bool ProtocolState::has_pending_messages() const {
  for (int n = 0; n < kMaxNodes; ++n) {
    if (!explorer_[n].empty() || !echo_[n].empty()) return true;
  }
  return false;
}

std::size_t ProtocolState::hash() const {
  static_assert(sizeof(ProtocolState) == 4 * kMaxNodes);
  std::uint64_t words[4];
  std::memcpy(words, this, sizeof(words));
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (std::uint64_t w : words) {
    h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

ProtocolState initial_state(const Config& c, Variant v) {
  if (!is_valid_config(c)) {
    throw ConfigError("initial_state requires a valid configuration");
  }
  ProtocolState s;
  const NodeId root = c.initiator();
  for (NodeId n : c.neighbors(root)) s.inbox(n, MessageKind::Explorer).insert(root);
  if (v == Variant::Fixed) s.set_parent(root, root);
  return s;
}

std::vector<Event> enabled_events(const Config& c, const ProtocolState& s) {
  std::vector<Event> out;
  for (NodeId n = 0; n < c.node_count(); ++n) {
    for (MessageKind k : {MessageKind::Explorer, MessageKind::Echo}) {
      for (NodeId from : s.inbox(n, k)) out.push_back({n, k, from});
    }
  }
  return out;
}

bool is_enabled(const ProtocolState& s, const Event& e) {
  return e.node >= 0 && e.node < kMaxNodes && s.inbox(e.node, e.kind).contains(e.from);
}

ProtocolState apply_event(const Config& c, const ProtocolState& s,
                          const Event& e) {
  if (e.node >= c.node_count() || !is_enabled(s, e)) {
    throw ContractError("event (" + std::to_string(e.node) + ", " +
                        std::string(to_string(e.kind)) + ", " +
                        std::to_string(e.from) + ") is not enabled");
  }
  ProtocolState next = s;
  const NodeId n = e.node;
  const NodeId m = e.from;

  if (e.kind == MessageKind::Explorer) {
    const bool first = !s.parent(n).has_value();
    if (first) next.set_parent(n, m);
    next.inbox(n, MessageKind::Explorer).erase(m);
    const NodeSet onward = c.neighbors(n).without(m);
    if (first && !onward.empty()) {
      for (NodeId x : onward) next.inbox(x, MessageKind::Explorer).insert(n);
    } else {
      next.inbox(m, MessageKind::Echo).insert(n);
    }
    return next;
  }

  next.received(n).insert(m);
  next.inbox(n, MessageKind::Echo).erase(m);
  const std::optional<NodeId> up = s.parent(n);
  if (n != c.initiator() && up.has_value() &&
      next.received(n) == c.neighbors(n).without(*up)) {
    next.inbox(*up, MessageKind::Echo).insert(n);
  }
  return next;
}

bool finish(const Config& c, const ProtocolState& s) {
  return s.received(c.initiator()) == c.neighbors(c.initiator());
}

NodeSet ancestors(const ProtocolState& s, NodeId n) {
  NodeSet seen;
  std::optional<NodeId> cur = s.parent(n);
  while (cur.has_value() && *cur >= 0 && *cur < kMaxNodes && !seen.contains(*cur)) {
    seen.insert(*cur);
    cur = s.parent(*cur);
  }
  return seen;
}

bool spanning_tree(const Config& c, const ProtocolState& s) {
  for (NodeId n = 0; n < c.node_count(); ++n) {
    if (n != c.initiator() && !ancestors(s, n).contains(c.initiator())) {
      return false;
    }
  }
  return true;
}

bool well_formed(const Config& c, const ProtocolState& s) {
  const NodeSet nodes = c.nodes();
  for (NodeId n = 0; n < kMaxNodes; ++n) {
    const bool used = n < c.node_count();
    const std::int8_t p = s.raw_parent(n);
    if (p < -1 || p >= c.node_count() || (!used && p != -1)) return false;
    for (NodeSet set : {s.received(n), s.inbox(n, MessageKind::Explorer),
                        s.inbox(n, MessageKind::Echo)}) {
      if (used ? !set.is_subset_of(nodes) : !set.empty()) return false;
    }
  }
  return true;
}

ProtocolState permute_state(const ProtocolState& s, const Permutation& p) {
  ProtocolState out;
  for (NodeId n = 0; n < p.size(); ++n) {
    const NodeId to = p(n);
    if (const auto up = s.parent(n)) out.set_parent(to, p(*up));
    out.received(to) = p(s.received(n));
    out.inbox(to, MessageKind::Explorer) = p(s.inbox(n, MessageKind::Explorer));
    out.inbox(to, MessageKind::Echo) = p(s.inbox(n, MessageKind::Echo));
  }
  return out;
}

}  // namespace echoverify
