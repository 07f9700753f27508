#include "echoverify/trace_text.hpp"

#include <sstream>

#include "echoverify/json_io.hpp"

namespace echoverify {

namespace {

std::string set_text(NodeSet s) {
  std::string out = "{";
  bool first = true;
  for (NodeId n : s) {
    out += (first ? "" : ", ") + node_name(n);
    first = false;
  }
  return out + "}";
}

std::string parent_text(const Config& c, const ProtocolState& s) {
  std::string out = "(";
  for (NodeId n = 0; n < c.node_count(); ++n) {
    const auto p = s.parent(n);
    out += (n ? " @@ " : "") + node_name(n) + " :> " + (p ? node_name(*p) : "None");
  }
  return out + ")";
}

std::string received_text(const Config& c, const ProtocolState& s) {
  std::string out = "(";
  for (NodeId n = 0; n < c.node_count(); ++n) {
    out += (n ? " @@ " : "") + node_name(n) + " :> " + set_text(s.received(n));
  }
  return out + ")";
}

std::string inbox_text(const Config& c, const ProtocolState& s) {
  std::string out = "(";
  for (NodeId n = 0; n < c.node_count(); ++n) {
    out += (n ? " @@ " : "") + node_name(n) + " :> {";
    bool first = true;
    for (MessageKind k : {MessageKind::Explorer, MessageKind::Echo}) {
      for (NodeId from : s.inbox(n, k)) {
        out += std::string(first ? "" : ", ") + "[from |-> " + node_name(from) +
               ", type |-> \"" + std::string(to_string(k)) + "\"]";
        first = false;
      }
    }
    out += "}";
  }
  return out + ")";
}

std::string event_text(const Event& e) {
  return std::string(e.kind == MessageKind::Explorer ? "receiveExplorer" : "receiveEcho") +
         "(" + node_name(e.node) + ") from " + node_name(e.from);
}

}  // namespace

std::string node_name(NodeId n) {
  return std::string(1, static_cast<char>('a' + n));
}

std::string format_trace_text(const Trace& t) {
  const Config& c = t.config;
  std::ostringstream out;
  out << "Configuration: " << format_config_line(c) << " (initiator "
      << node_name(c.initiator()) << ", variant " << to_string(t.variant) << ")\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    const ProtocolState& s = t.states[k];
    out << "\nState " << k + 1 << ": ";
    if (k == 0) {
      out << "<Initial predicate>\n";
      out << "/\\ parent = " << parent_text(c, s) << "\n";
      out << "/\\ received = " << received_text(c, s) << "\n";
      out << "/\\ inbox = " << inbox_text(c, s) << "\n";
      continue;
    }
    const ProtocolState& prev = t.states[k - 1];
    out << "<" << event_text(t.events[k - 1]) << ">\n";
    const std::string p = parent_text(c, s);
    const std::string r = received_text(c, s);
    const std::string i = inbox_text(c, s);
    if (p != parent_text(c, prev)) out << "/\\ parent = " << p << "\n";
    if (r != received_text(c, prev)) out << "/\\ received = " << r << "\n";
    if (i != inbox_text(c, prev)) out << "/\\ inbox = " << i << "\n";
  }
  out << "\n";
  if (t.loop_start) {
    out << "Back to state " << *t.loop_start + 1 << "\n";
  } else {
    out << "State " << t.states.size() + 1 << ": Stuttering\n";
  }
  out << "Trace length: " << t.states.size() << " states\n";
  return out.str();
}

}  // namespace echoverify
