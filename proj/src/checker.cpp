#include "echoverify/checker.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <array>
#include <string>
#include <thread>

namespace echoverify {

namespace {

using Clock = std::chrono::steady_clock;
using Index = std::uint32_t;
constexpr Index kNoIndex = ~Index{0};

// Events fit in a byte: node and sender need 3 bits each, kind one.
std::uint8_t pack(const Event& e) {
  return static_cast<std::uint8_t>((e.node << 4) |
                                   (e.kind == MessageKind::Echo ? 8 : 0) | e.from);
}

Event unpack(std::uint8_t b) {
  return {b >> 4, (b & 8) != 0 ? MessageKind::Echo : MessageKind::Explorer, b & 7};
}

std::chrono::milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}

// Open-addressing set of indices into an external state vector.
class StateIndex {
 public:
  explicit StateIndex(const std::vector<ProtocolState>& states) : states_(states) {
    slots_.assign(1024, kNoIndex);
  }

  // Index of an equal stored state, or kNoIndex after recording `candidate`
  // (which must be states_.back()).
  Index find_or_insert(Index candidate) {
    if ((count_ + 1) * 2 > slots_.size()) grow();
    const ProtocolState& s = states_[candidate];
    std::size_t mask = slots_.size() - 1;
    for (std::size_t i = s.hash() & mask;; i = (i + 1) & mask) {
      if (slots_[i] == kNoIndex) {
        slots_[i] = candidate;
        ++count_;
        return kNoIndex;
      }
      if (states_[slots_[i]] == s) return slots_[i];
    }
  }

 private:
  void grow() {
    std::vector<Index> old = std::move(slots_);
    slots_.assign(old.size() * 2, kNoIndex);
    std::size_t mask = slots_.size() - 1;
    for (Index idx : old) {
      if (idx == kNoIndex) continue;
      std::size_t i = states_[idx].hash() & mask;
      while (slots_[i] != kNoIndex) i = (i + 1) & mask;
      slots_[i] = idx;
    }
  }

  const std::vector<ProtocolState>& states_;
  std::vector<Index> slots_;
  std::size_t count_ = 0;
};

// Automorphism applied to states through lookup tables.
class StateSymmetry {
 public:
  explicit StateSymmetry(const Permutation& p) : perm_(p) {
    for (unsigned bits = 0; bits < 256; ++bits) {
      sets_[bits] = p.size() == kMaxNodes || (bits >> p.size()) == 0
                        ? p(NodeSet::from_bits(bits))
                        : NodeSet{};
    }
  }

  ProtocolState apply(const ProtocolState& s, int node_count) const {
    ProtocolState out;
    for (NodeId n = 0; n < node_count; ++n) {
      const NodeId to = perm_(n);
      if (const auto up = s.parent(n)) out.set_parent(to, perm_(*up));
      out.received(to) = sets_[s.received(n).bits()];
      out.inbox(to, MessageKind::Explorer) = sets_[s.inbox(n, MessageKind::Explorer).bits()];
      out.inbox(to, MessageKind::Echo) = sets_[s.inbox(n, MessageKind::Echo).bits()];
    }
    return out;
  }

 private:
  Permutation perm_;
  std::array<NodeSet, 256> sets_{};
};

// Breadth-first store of (representative) states with BFS predecessor links.
// Insertion order is BFS order, so the state vector doubles as the queue.
class Search {
 public:
  Search(const Config& c, Variant v, const CheckOptions& opt)
      : config_(c), variant_(v), budget_(opt.state_budget), index_(states_) {
    if (!is_valid_config(c)) {
      throw ConfigError("checking requires a valid configuration");
    }
    if (opt.symmetry) {
      for (const Permutation& p : automorphisms(c)) {
        if (p != Permutation::identity(c.node_count())) symmetries_.emplace_back(p);
      }
    }
    add(reduce(initial_state(c, v)), kNoIndex, Event{});
  }

  const Config& config() const { return config_; }
  std::size_t size() const { return states_.size(); }
  const ProtocolState& state(Index i) const { return states_[i]; }
  std::uint32_t depth(Index i) const { return depth_[i]; }
  std::size_t transitions = 0;

  ProtocolState reduce(const ProtocolState& s) const {
    ProtocolState best = s;
    for (const StateSymmetry& p : symmetries_) {
      ProtocolState image = p.apply(s, config_.node_count());
      if (image < best) best = image;
    }
    return best;
  }

  // Returns {index, inserted}.
  std::pair<Index, bool> add(const ProtocolState& s, Index pred, const Event& via) {
    states_.push_back(s);
    const Index candidate = static_cast<Index>(states_.size() - 1);
    const Index existing = index_.find_or_insert(candidate);
    if (existing != kNoIndex) {
      states_.pop_back();
      return {existing, false};
    }
    if (budget_ && states_.size() > *budget_) {
      throw ResourceLimitError(
          "state budget of " + std::to_string(*budget_) + " exceeded",
          PartialStats{states_.size() - 1, transitions});
    }
    pred_.push_back(pred);
    via_.push_back(pack(via));
    depth_.push_back(pred == kNoIndex ? 0 : depth_[pred] + 1);
    return {candidate, true};
  }

  // Chain of stored indices from the initial state to `i`.
  std::vector<Index> path_to(Index i) const {
    std::vector<Index> path;
    for (Index cur = i; cur != kNoIndex; cur = pred_[cur]) path.push_back(cur);
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Event that led the BFS to stored state `i`.
  Event via(Index i) const { return unpack(via_[i]); }

  // Concrete successor of `s` whose representative is `target`. Under
  // symmetry reduction the stored event belongs to a different orbit member,
  // so a matching event is searched in deterministic order.
  std::pair<Event, ProtocolState> lift_step(const ProtocolState& s,
                                            const ProtocolState& target) const {
    for (const Event& e : enabled_events(config_, s)) {
      ProtocolState next = apply_event(config_, s, e);
      if (reduce(next) == target) return {e, next};
    }
    throw ContractError("no concrete step matches the stored transition");
  }

  // Concrete trace following the stored path. `hints[k]` is the event taken
  // from path[k] when known (used directly without symmetry reduction).
  Trace lift(const std::vector<Index>& path, const std::vector<Event>& hints) const {
    Trace t{config_, variant_, {initial_state(config_, variant_)}, {}, std::nullopt};
    for (std::size_t k = 1; k < path.size(); ++k) {
      const ProtocolState& cur = t.states.back();
      if (symmetries_.empty()) {
        const Event e = hints[k - 1];
        t.states.push_back(apply_event(config_, cur, e));
        t.events.push_back(e);
      } else {
        auto [e, next] = lift_step(cur, states_[path[k]]);
        t.states.push_back(next);
        t.events.push_back(e);
      }
    }
    return t;
  }

  Trace bfs_trace(Index i) const {
    std::vector<Index> path = path_to(i);
    std::vector<Event> hints;
    for (std::size_t k = 1; k < path.size(); ++k) hints.push_back(via(path[k]));
    return lift(path, hints);
  }

  bool reduced() const { return !symmetries_.empty(); }

 private:
  Config config_;
  Variant variant_;
  std::optional<std::size_t> budget_;
  std::vector<StateSymmetry> symmetries_;
  std::vector<ProtocolState> states_;
  std::vector<Index> pred_;
  std::vector<std::uint8_t> via_;
  std::vector<std::uint32_t> depth_;
  StateIndex index_;
};

ExploreStats stats_of(const Search& s, Clock::time_point start) {
  return {s.size(), s.transitions, since(start)};
}

// BFS until a stored state satisfies `bad`; returns its index.
std::optional<Index> bfs_find(Search& search,
                              const std::function<bool(const ProtocolState&)>& bad,
                              std::optional<std::size_t> max_depth) {
  if (bad(search.state(0))) return Index{0};
  const Config& c = search.config();
  for (Index i = 0; i < search.size(); ++i) {
    if (max_depth && search.depth(i) >= *max_depth) continue;
    const ProtocolState cur = search.state(i);
    for (const Event& e : enabled_events(c, cur)) {
      ++search.transitions;
      const ProtocolState next = apply_event(c, cur, e);
      auto [idx, inserted] = search.add(search.reduce(next), i, e);
      if (inserted && bad(next)) return idx;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Violation: return "violation";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "";
}

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::InvariantViolation: return "invariant_violation";
    case Reason::Deadlock: return "deadlock";
    case Reason::NonProgressCycle: return "non_progress_cycle";
  }
  return "";
}

std::string_view to_string(Property p) {
  return p == Property::Correctness ? "correctness" : "termination";
}

std::string_view to_string(Target t) {
  return t == Target::Finish ? "finish" : "finish-not-spanning-tree";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  for (Outcome o : {Outcome::Pass, Outcome::Violation, Outcome::Inconclusive}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

std::optional<Reason> parse_reason(std::string_view s) {
  for (Reason r : {Reason::InvariantViolation, Reason::Deadlock, Reason::NonProgressCycle}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<Property> parse_property(std::string_view s) {
  for (Property p : {Property::Correctness, Property::Termination}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

std::optional<Target> parse_target(std::string_view s) {
  for (Target t : {Target::Finish, Target::FinishWithoutSpanningTree}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

void validate_trace(const Trace& t) {
  if (t.states.empty()) throw ContractError("trace has no states");
  if (t.events.size() + 1 != t.states.size()) {
    throw ContractError("trace needs exactly one event per step");
  }
  if (t.states.front() != initial_state(t.config, t.variant)) {
    throw ContractError("trace does not start in the initial state");
  }
  for (std::size_t k = 0; k < t.events.size(); ++k) {
    if (!well_formed(t.config, t.states[k])) {
      throw ContractError("state " + std::to_string(k) + " is not well formed");
    }
    if (apply_event(t.config, t.states[k], t.events[k]) != t.states[k + 1]) {
      throw ContractError("event " + std::to_string(k) +
                          " does not produce the next state");
    }
  }
  if (t.loop_start) {
    if (*t.loop_start + 1 >= t.states.size() ||
        t.states[*t.loop_start] != t.states.back()) {
      throw ContractError("loop does not close on its start state");
    }
  }
}

bool replays(const Trace& t) {
  try {
    validate_trace(t);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

Trace stutter_trace(const Config& c, Variant v) {
  return Trace{c, v, {initial_state(c, v)}, {}, std::nullopt};
}

StateGraph explore(const Config& c, Variant v, std::optional<std::size_t> limit) {
  const auto start = Clock::now();
  Search search(c, v, CheckOptions{limit, false});
  StateGraph g;
  for (Index i = 0; i < search.size(); ++i) {
    const ProtocolState cur = search.state(i);
    std::vector<Transition> out;
    for (const Event& e : enabled_events(c, cur)) {
      ++search.transitions;
      auto [idx, inserted] = search.add(apply_event(c, cur, e), i, e);
      out.push_back({e, idx});
    }
    g.successors.push_back(std::move(out));
  }
  for (Index i = 0; i < search.size(); ++i) {
    g.states.push_back(search.state(i));
    g.depth.push_back(search.depth(i));
  }
  g.stats = stats_of(search, start);
  return g;
}

bool satisfies(Target t, const Config& c, const ProtocolState& s) {
  if (!finish(c, s)) return false;
  return t == Target::Finish || !spanning_tree(c, s);
}

Verdict check_correctness(const Config& c, Variant v, const CheckOptions& opt) {
  const auto start = Clock::now();
  Search search(c, v, opt);
  auto bad = [&c](const ProtocolState& s) {
    return satisfies(Target::FinishWithoutSpanningTree, c, s);
  };
  Verdict verdict;
  if (auto hit = bfs_find(search, bad, std::nullopt)) {
    verdict.outcome = Outcome::Violation;
    verdict.reason = Reason::InvariantViolation;
    verdict.witness = search.bfs_trace(*hit);
  }
  verdict.stats = stats_of(search, start);
  return verdict;
}

std::optional<Trace> shortest_trace_to(const Config& c, Variant v, Target target,
                                       const CheckOptions& opt,
                                       std::optional<std::size_t> max_steps) {
  Search search(c, v, opt);
  auto hit = bfs_find(
      search, [&](const ProtocolState& s) { return satisfies(target, c, s); },
      max_steps);
  if (!hit) return std::nullopt;
  return search.bfs_trace(*hit);
}

Verdict check_termination(const Config& c, Variant v, const CheckOptions& opt) {
  const auto start = Clock::now();
  Search search(c, v, opt);
  Verdict verdict;
  if (finish(c, search.state(0))) {
    verdict.stats = stats_of(search, start);
    return verdict;
  }

  // Restricted graph in CSR form: edges of state i are
  // targets[offsets[i] .. offsets[i+1]), with the event's position in
  // enabled_events() kept alongside.
  std::vector<std::size_t> offsets{0};
  std::vector<Index> targets;
  std::vector<std::uint8_t> ordinals;
  for (Index i = 0; i < search.size(); ++i) {
    const ProtocolState cur = search.state(i);
    const std::vector<Event> events = enabled_events(c, cur);
    if (events.empty()) {
      verdict.outcome = Outcome::Violation;
      verdict.reason = Reason::Deadlock;
      verdict.witness = search.bfs_trace(i);
      verdict.stats = stats_of(search, start);
      return verdict;
    }
    for (std::size_t k = 0; k < events.size(); ++k) {
      ++search.transitions;
      const ProtocolState next = apply_event(c, cur, events[k]);
      if (finish(c, next)) continue;
      targets.push_back(search.add(search.reduce(next), i, events[k]).first);
      ordinals.push_back(static_cast<std::uint8_t>(k));
    }
    offsets.push_back(targets.size());
  }

  // Iterative DFS; a gray target closes a cycle through the current stack.
  enum Color : std::uint8_t { kWhite, kGray, kBlack };
  std::vector<std::uint8_t> color(search.size(), kWhite);
  struct Frame {
    Index node;
    std::size_t next_edge;
  };
  std::vector<Frame> stack{{0, offsets[0]}};
  color[0] = kGray;
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next_edge == offsets[top.node + 1]) {
      color[top.node] = kBlack;
      stack.pop_back();
      continue;
    }
    const std::size_t edge = top.next_edge++;
    const Index w = targets[edge];
    if (color[w] == kWhite) {
      color[w] = kGray;
      stack.push_back({w, offsets[w]});
      continue;
    }
    if (color[w] != kGray) continue;

    // Lasso: stack path, then the closing edge back to w.
    std::vector<Index> path;
    std::vector<Event> hints;
    std::size_t loop_at = 0;
    for (std::size_t k = 0; k < stack.size(); ++k) {
      const Index u = stack[k].node;
      if (u == w) loop_at = k;
      path.push_back(u);
      const std::size_t used = stack[k].next_edge - 1;
      hints.push_back(enabled_events(c, search.state(u))[ordinals[used]]);
    }
    path.push_back(w);
    Trace t = search.lift(path, hints);

    if (search.reduced()) {
      // The concrete state reached may be a symmetric image of the loop
      // start; keep walking the cycle until a concrete state repeats.
      std::vector<Index> cycle(path.begin() + static_cast<std::ptrdiff_t>(loop_at) + 1,
                               path.end());
      std::vector<std::size_t> landings{loop_at};
      for (;;) {
        const auto seen = std::find_if(landings.begin(), landings.end(),
                                       [&](std::size_t at) {
                                         return t.states[at] == t.states.back();
                                       });
        if (seen != landings.end() && *seen != t.states.size() - 1) {
          t.loop_start = *seen;
          break;
        }
        landings.push_back(t.states.size() - 1);
        for (Index rep : cycle) {
          auto [e, next] = search.lift_step(t.states.back(), search.state(rep));
          t.events.push_back(e);
          t.states.push_back(next);
        }
      }
    } else {
      t.loop_start = loop_at;
    }
    verdict.outcome = Outcome::Violation;
    verdict.reason = Reason::NonProgressCycle;
    verdict.witness = std::move(t);
    break;
  }
  verdict.stats = stats_of(search, start);
  return verdict;
}

std::size_t SweepReport::violations() const {
  return static_cast<std::size_t>(std::count_if(
      results.begin(), results.end(),
      [](const SweepEntry& e) { return e.verdict.outcome == Outcome::Violation; }));
}

std::size_t SweepReport::inconclusive() const {
  return static_cast<std::size_t>(std::count_if(
      results.begin(), results.end(),
      [](const SweepEntry& e) { return e.verdict.outcome == Outcome::Inconclusive; }));
}

ExploreStats SweepReport::totals() const {
  ExploreStats total;
  for (const SweepEntry& e : results) {
    total.states += e.verdict.stats.states;
    total.transitions += e.verdict.stats.transitions;
    total.elapsed += e.verdict.stats.elapsed;
  }
  return total;
}

SweepReport check_all(std::span<const Config> configs, Variant v, Property p,
                      const CheckOptions& opt, unsigned workers) {
  SweepReport report;
  report.property = p;
  report.variant = v;
  for (const Config& c : configs) {
    report.max_nodes = std::max(report.max_nodes, c.node_count());
    report.results.push_back({c, {}});
  }

  auto run_one = [&](SweepEntry& entry) {
    const auto start = Clock::now();
    try {
      entry.verdict = p == Property::Correctness ? check_correctness(entry.config, v, opt)
                                                 : check_termination(entry.config, v, opt);
    } catch (const ResourceLimitError& err) {
      entry.verdict = Verdict{};
      entry.verdict.outcome = Outcome::Inconclusive;
      entry.verdict.note = err.what();
      entry.verdict.stats = {err.partial().states, err.partial().transitions, since(start)};
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(report.results.size()));
  if (workers <= 1) {
    for (SweepEntry& entry : report.results) run_one(entry);
    return report;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < report.results.size(); i = next++) {
          run_one(report.results[i]);
        }
      });
    }
  }
  return report;
}

SweepReport sweep(int max_nodes, Variant v, Property p, const CheckOptions& opt,
                  unsigned workers) {
  if (max_nodes < 1 || max_nodes > kMaxSweepNodes) {
    throw ResourceLimitError("sweep max_nodes must be within 1.." +
                             std::to_string(kMaxSweepNodes));
  }
  const std::vector<Config> configs = enumerate_canonical(max_nodes);
  SweepReport report = check_all(configs, v, p, opt, workers);
  report.max_nodes = max_nodes;
  return report;
}

}  // namespace echoverify
