#ifndef ECHOVERIFY_TRACE_TEXT_HPP
#define ECHOVERIFY_TRACE_TEXT_HPP

#include <string>

#include "echoverify/checker.hpp"

namespace echoverify {

/// Human-readable node name: 0, 1, 2, ... become a, b, c, ...
std::string node_name(NodeId n);

/// Counterexample-style listing: the first state in full, every later state
/// only with the variables its event changed, then the stutter or loop
/// marker.
std::string format_trace_text(const Trace& t);

}  // namespace echoverify

#endif  // ECHOVERIFY_TRACE_TEXT_HPP
