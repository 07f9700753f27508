#ifndef ECHOVERIFY_CHECKER_HPP
#define ECHOVERIFY_CHECKER_HPP

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "echoverify/netconfig.hpp"
#include "echoverify/protocol.hpp"

namespace echoverify {

/// A finite behavior prefix. Without `loop_start` the behavior continues by
/// stuttering in the last state forever. With it, the last recorded event
/// closes a cycle: states.back() == states[*loop_start] and the segment
/// between them repeats forever. Either way events.size() == states.size()-1.
struct Trace {
  Config config;
  Variant variant = Variant::Fixed;
  std::vector<ProtocolState> states;
  std::vector<Event> events;
  std::optional<std::size_t> loop_start;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Throws ContractError unless `t` starts in the initial state, every step
/// is an enabled event producing the next state, and the loop (if any) is
/// closed.
void validate_trace(const Trace& t);
bool replays(const Trace& t);

/// Stutter-terminated trace consisting only of the initial state.
Trace stutter_trace(const Config& c, Variant v);

struct ExploreStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::chrono::milliseconds elapsed{0};
};

struct Transition {
  Event event;
  std::uint32_t target = 0;
};

/// Reachable state graph in BFS discovery order; states[0] is initial.
struct StateGraph {
  std::vector<ProtocolState> states;
  std::vector<std::vector<Transition>> successors;
  std::vector<std::uint32_t> depth;
  ExploreStats stats;
};

struct CheckOptions {
  /// Maximum number of distinct stored states before ResourceLimitError.
  std::optional<std::size_t> state_budget;
  /// Store one representative per orbit of the configuration's automorphism
  /// group. Witnesses are still concrete, replayable traces.
  bool symmetry = false;
};

/// Throws ResourceLimitError (with partial counts) when `limit` is exceeded.
StateGraph explore(const Config& c, Variant v,
                   std::optional<std::size_t> limit = std::nullopt);

enum class Outcome { Pass, Violation, Inconclusive };
enum class Reason { InvariantViolation, Deadlock, NonProgressCycle };
enum class Property { Correctness, Termination };
enum class Target { Finish, FinishWithoutSpanningTree };

std::string_view to_string(Outcome o);
std::string_view to_string(Reason r);
std::string_view to_string(Property p);
std::string_view to_string(Target t);
std::optional<Outcome> parse_outcome(std::string_view s);
std::optional<Reason> parse_reason(std::string_view s);
std::optional<Property> parse_property(std::string_view s);
std::optional<Target> parse_target(std::string_view s);

struct Verdict {
  Outcome outcome = Outcome::Pass;
  std::optional<Reason> reason;
  std::optional<Trace> witness;
  ExploreStats stats;
  /// Why the verdict is inconclusive; empty otherwise.
  std::string note;
};

/// Always (finish implies spanning tree). A violation carries a shortest
/// witness, ties broken by the lexicographically first event sequence.
Verdict check_correctness(const Config& c, Variant v, const CheckOptions& opt = {});

/// Under weak fairness of the whole next-state relation, finish is
/// eventually reached. Decided on the subgraph of non-finish states reachable
/// through non-finish states: a deadlock there lets a fair behavior stutter
/// forever, a cycle lets it loop forever.
Verdict check_termination(const Config& c, Variant v, const CheckOptions& opt = {});

/// Minimum-length trace to a state satisfying `target`, or nullopt when no
/// such state is reachable within `max_steps` events.
std::optional<Trace> shortest_trace_to(
    const Config& c, Variant v, Target target, const CheckOptions& opt = {},
    std::optional<std::size_t> max_steps = std::nullopt);

bool satisfies(Target t, const Config& c, const ProtocolState& s);

struct SweepEntry {
  Config config;
  Verdict verdict;
};

struct SweepReport {
  Property property = Property::Correctness;
  Variant variant = Variant::Fixed;
  int max_nodes = 0;
  std::vector<SweepEntry> results;

  std::size_t violations() const;
  std::size_t inconclusive() const;
  ExploreStats totals() const;
};

/// Runs `property` on each configuration; resource-limit errors mark the
/// entry Inconclusive instead of aborting. Results keep input order.
/// `workers == 0` picks the hardware concurrency.
SweepReport check_all(std::span<const Config> configs, Variant v, Property p,
                      const CheckOptions& opt = {}, unsigned workers = 0);

/// check_all over enumerate_canonical(max_nodes). max_nodes must be 1..6.
SweepReport sweep(int max_nodes, Variant v, Property p,
                  const CheckOptions& opt = {}, unsigned workers = 0);

inline constexpr int kMaxSweepNodes = 6;

}  // namespace echoverify

#endif  // ECHOVERIFY_CHECKER_HPP
