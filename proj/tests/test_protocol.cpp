#include <doctest.h>

#include <algorithm>
#include <random>

#include "echoverify/protocol.hpp"
#include "oracles.hpp"

using namespace echoverify;

namespace {

Config single() {
  const NodeSet none[1] = {};
  return Config(1, 0, none);
}

Config edge() { return Config::from_edges(2, 0, std::vector<Edge>{{0, 1}}); }

Config path3() { return Config::from_edges(3, 0, std::vector<Edge>{{0, 1}, {1, 2}}); }

Config k4() {
  return Config::from_edges(4, 0, std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

constexpr MessageKind kExp = MessageKind::Explorer;
constexpr MessageKind kEcho = MessageKind::Echo;

// Every (node, kind, sender) slot of a state as a flat bit list.
std::vector<Event> pending(const Config& c, const ProtocolState& s) {
  std::vector<Event> out;
  for (NodeId n = 0; n < c.node_count(); ++n) {
    for (MessageKind k : {kExp, kEcho}) {
      for (NodeId m = 0; m < c.node_count(); ++m) {
        if (s.inbox(n, k).contains(m)) out.push_back({n, k, m});
      }
    }
  }
  return out;
}

bool contains(const std::vector<Event>& v, const Event& e) {
  return std::find(v.begin(), v.end(), e) != v.end();
}

}  // namespace

TEST_CASE("variant and message kind names") {
  CHECK(to_string(Variant::Chang) == "chang");
  CHECK(parse_variant("fixed") == Variant::Fixed);
  CHECK_FALSE(parse_variant("Fixed").has_value());
  CHECK(to_string(kEcho) == "Echo");
  CHECK(parse_message_kind("Explorer") == kExp);
}

TEST_CASE("initial_state") {
  const ProtocolState s = initial_state(edge(), Variant::Fixed);
  CHECK(s.parent(0) == 0);
  CHECK_FALSE(s.parent(1).has_value());
  CHECK(s.received(0).empty());
  CHECK(s.received(1).empty());
  CHECK(s.inbox(0, kExp).empty());
  CHECK(s.inbox(1, kExp) == NodeSet{0});

  for (Variant v : {Variant::Chang, Variant::Fixed}) {
    const ProtocolState one = initial_state(single(), v);
    CHECK_FALSE(one.has_pending_messages());
    CHECK(finish(single(), one));
  }

  const ProtocolState c = initial_state(k4(), Variant::Chang);
  for (NodeId n = 0; n < 4; ++n) CHECK_FALSE(c.parent(n).has_value());
  CHECK(c.inbox(0, kExp).empty());
  for (NodeId n = 1; n < 4; ++n) CHECK(c.inbox(n, kExp) == NodeSet{0});

  CHECK_THROWS_AS(initial_state(Config::from_edges(3, 0, std::vector<Edge>{{0, 1}}), Variant::Fixed),
                  ConfigError);
}

TEST_CASE("enabled_events") {
  CHECK(enabled_events(edge(), initial_state(edge(), Variant::Fixed)) ==
        std::vector<Event>{{1, kExp, 0}});
  CHECK(enabled_events(single(), initial_state(single(), Variant::Chang)).empty());
  CHECK(enabled_events(k4(), initial_state(k4(), Variant::Chang)) ==
        std::vector<Event>{{1, kExp, 0}, {2, kExp, 0}, {3, kExp, 0}});

  ProtocolState s;
  s.inbox(1, kEcho).insert(2);
  s.inbox(1, kExp).insert(3);
  s.inbox(1, kExp).insert(0);
  s.inbox(0, kEcho).insert(1);
  CHECK(enabled_events(k4(), s) ==
        std::vector<Event>{{0, kEcho, 1}, {1, kExp, 0}, {1, kExp, 3}, {1, kEcho, 2}});
}

TEST_CASE("apply_event hand execution") {
  const Config c = edge();
  const ProtocolState s0 = initial_state(c, Variant::Fixed);
  CHECK_FALSE(finish(c, s0));

  const ProtocolState s1 = apply_event(c, s0, {1, kExp, 0});
  CHECK(s1.parent(0) == 0);
  CHECK(s1.parent(1) == 0);
  CHECK(s1.inbox(0, kExp).empty());
  CHECK(s1.inbox(1, kExp).empty());
  CHECK(s1.inbox(0, kEcho) == NodeSet{1});
  CHECK(s1.inbox(1, kEcho).empty());

  const ProtocolState s2 = apply_event(c, s1, {0, kEcho, 1});
  CHECK(s2.received(0) == NodeSet{1});
  CHECK_FALSE(s2.has_pending_messages());
  CHECK(finish(c, s2));

  const ProtocolState p = apply_event(path3(), initial_state(path3(), Variant::Fixed), {1, kExp, 0});
  CHECK(p.parent(1) == 0);
  CHECK(p.inbox(2, kExp) == NodeSet{1});
  CHECK(p.inbox(0, kEcho).empty());
}

TEST_CASE("apply_event rejects events that are not enabled") {
  const Config c = edge();
  const ProtocolState s0 = initial_state(c, Variant::Fixed);
  CHECK_THROWS_AS(apply_event(c, s0, {0, kEcho, 1}), ContractError);
  CHECK_THROWS_AS(apply_event(c, s0, {0, kExp, 1}), ContractError);
  CHECK_THROWS_AS(apply_event(c, s0, {1, kEcho, 0}), ContractError);
}

TEST_CASE("Fixed initiator answers an explorer with an echo") {
  // Triangle: node 2 first hears from 1 and forwards to the initiator,
  // which already has a parent and echoes back.
  const Config tri = Config::from_edges(3, 0, std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
  ProtocolState s = initial_state(tri, Variant::Fixed);
  s = apply_event(tri, s, {1, kExp, 0});
  s = apply_event(tri, s, {2, kExp, 1});
  CHECK(s.parent(2) == 1);
  CHECK(s.inbox(0, kExp) == NodeSet{2});
  s = apply_event(tri, s, {0, kExp, 2});
  CHECK(s.parent(0) == 0);
  CHECK(s.inbox(2, kEcho) == NodeSet{0});

  // Under Chang the same explorer makes node 2 the initiator's parent and
  // the initiator floods explorers to its other neighbor.
  ProtocolState c = initial_state(tri, Variant::Chang);
  c = apply_event(tri, c, {1, kExp, 0});
  c = apply_event(tri, c, {2, kExp, 1});
  c = apply_event(tri, c, {0, kExp, 2});
  CHECK(c.parent(0) == 2);
  CHECK(c.inbox(1, kExp) == NodeSet{0});
}

TEST_CASE("finish") {
  CHECK(finish(single(), initial_state(single(), Variant::Fixed)));
  CHECK_FALSE(finish(edge(), initial_state(edge(), Variant::Fixed)));
}

TEST_CASE("ancestors") {
  ProtocolState s;
  s.set_parent(0, 0);
  s.set_parent(1, 0);
  CHECK(ancestors(s, 1) == NodeSet{0});
  CHECK(ancestors(s, 0) == NodeSet{0});
  CHECK(ancestors(ProtocolState{}, 2).empty());

  ProtocolState chain;
  chain.set_parent(1, 0);
  chain.set_parent(2, 1);
  CHECK(ancestors(chain, 2) == NodeSet{0, 1});
  CHECK(ancestors(chain, 0).empty());
}

TEST_CASE("spanning_tree") {
  CHECK(spanning_tree(single(), ProtocolState{}));
  ProtocolState s;
  s.set_parent(0, 0);
  s.set_parent(1, 0);
  CHECK(spanning_tree(edge(), s));

  ProtocolState cycle;
  cycle.set_parent(1, 2);
  cycle.set_parent(2, 1);
  CHECK(ancestors(cycle, 1) == NodeSet{1, 2});
  CHECK_FALSE(spanning_tree(path3(), cycle));
}

TEST_CASE("well_formed") {
  ProtocolState bad;
  bad.set_parent(1, 7);
  CHECK_FALSE(well_formed(edge(), bad));

  ProtocolState any_subset;
  any_subset.received(0).insert(0);
  CHECK(well_formed(edge(), any_subset));

  ProtocolState stray;
  stray.inbox(0, kEcho).insert(3);
  CHECK_FALSE(well_formed(edge(), stray));
  ProtocolState unused_slot;
  unused_slot.received(5).insert(0);
  CHECK_FALSE(well_formed(edge(), unused_slot));

  for (const Config& c : enumerate_canonical(5)) {
    for (Variant v : {Variant::Chang, Variant::Fixed}) CHECK(well_formed(c, initial_state(c, v)));
  }
}

TEST_CASE("permute_state commutes with the step relation") {
  std::mt19937 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Config c = oracle::random_config(rng, 6);
    const Variant v = rng() % 2 ? Variant::Chang : Variant::Fixed;
    const auto walk = oracle::random_walk(rng, c, v, 1 + static_cast<int>(rng() % 20));
    const ProtocolState& s = walk.back();
    const Permutation p = oracle::random_permutation(rng, c.node_count());
    const Config pc = relabel(c, p);
    CHECK(permute_state(initial_state(c, v), p) == initial_state(pc, v));
    const ProtocolState ps = permute_state(s, p);
    CHECK(finish(pc, ps) == finish(c, s));
    CHECK(spanning_tree(pc, ps) == spanning_tree(c, s));
    for (const Event& e : enabled_events(c, s)) {
      const Event pe{p(e.node), e.kind, p(e.from)};
      CHECK(permute_state(apply_event(c, s, e), p) == apply_event(pc, ps, pe));
    }
  }
}

TEST_CASE("step invariants over random reachable states") {
  std::mt19937 rng(2024);
  int cases = 0;
  for (int i = 0; i < 1500; ++i) {
    const Config c = oracle::random_config(rng, 6);
    const Variant v = rng() % 2 ? Variant::Chang : Variant::Fixed;
    const auto walk = oracle::random_walk(rng, c, v, static_cast<int>(rng() % 30));
    const ProtocolState& s = walk.back();
    REQUIRE(well_formed(c, s));
    const std::vector<Event> enabled = enabled_events(c, s);
    const std::vector<Event> slots = pending(c, s);
    // Event/guard agreement.
    CHECK(enabled == slots);
    for (NodeId n = 0; n < c.node_count(); ++n) {
      for (MessageKind k : {kExp, kEcho}) {
        for (NodeId m = 0; m < c.node_count(); ++m) {
          const Event e{n, k, m};
          CHECK(is_enabled(s, e) == contains(enabled, e));
          if (!contains(enabled, e)) CHECK_THROWS_AS(apply_event(c, s, e), ContractError);
        }
      }
    }
    for (const Event& e : enabled) {
      ++cases;
      const ProtocolState t = apply_event(c, s, e);
      CHECK(well_formed(c, t));
      for (NodeId n = 0; n < c.node_count(); ++n) {
        CHECK(s.received(n).is_subset_of(t.received(n)));
        if (s.parent(n)) CHECK(t.parent(n) == s.parent(n));
      }
      if (finish(c, s)) CHECK(finish(c, t));

      // Message conservation: the consumed slot goes away and every new
      // slot is one the step rule allows.
      const std::vector<Event> after = pending(c, t);
      CHECK_FALSE(contains(after, e));
      for (const Event& old : slots) {
        if (old != e) CHECK(contains(after, old));
      }
      const bool first_explorer = e.kind == kExp && !s.parent(e.node);
      for (const Event& add : after) {
        if (contains(slots, add)) continue;
        CHECK(add.from == e.node);
        if (e.kind == kExp && first_explorer && !(c.neighbors(e.node) - NodeSet{e.from}).empty()) {
          CHECK(add.kind == kExp);
          CHECK(c.neighbors(e.node).contains(add.node));
          CHECK(add.node != e.from);
        } else if (e.kind == kExp) {
          CHECK(add == Event{e.from, kEcho, e.node});
        } else {
          CHECK(e.node != c.initiator());
          CHECK(add.kind == kEcho);
          CHECK(s.parent(e.node) == add.node);
          CHECK(t.received(e.node) == c.neighbors(e.node) - NodeSet{*s.parent(e.node)});
        }
      }
      if (e.kind == kEcho) CHECK(t.received(e.node) == s.received(e.node).with(e.from));
      else CHECK(t.received(e.node) == s.received(e.node));
    }
  }
  CHECK(cases >= 1000);
}
