#include "echoverify/json_io.hpp"

#include <regex>
#include <sstream>

namespace echoverify {

namespace {

int to_int(const std::string& digits, std::string_view what) {
  if (digits.size() > 3) throw FormatError(std::string(what) + " out of range");
  return std::stoi(digits);
}

NodeId node_from_json(const Json& j, int node_count, std::string_view what) {
  if (!j.is_number_integer()) throw FormatError(std::string(what) + " must be an integer");
  const auto v = j.get<long long>();
  if (v < 0 || v >= node_count) {
    throw FormatError(std::string(what) + " " + std::to_string(v) + " is not a node");
  }
  return static_cast<NodeId>(v);
}

Json node_set_to_json(NodeSet s) {
  Json out = Json::array();
  for (NodeId n : s) out.push_back(n);
  return out;
}

NodeSet node_set_from_json(const Json& j, int node_count, std::string_view what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array");
  NodeSet s;
  NodeId last = -1;
  for (const Json& e : j) {
    const NodeId n = node_from_json(e, node_count, what);
    if (n <= last) throw FormatError(std::string(what) + " must be strictly ascending");
    last = n;
    s.insert(n);
  }
  return s;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

template <typename T, typename Parse>
T parse_enum(const Json& j, Parse parse, std::string_view what) {
  if (!j.is_string()) throw FormatError(std::string(what) + " must be a string");
  const auto v = parse(j.get<std::string>());
  if (!v) throw FormatError("unknown " + std::string(what) + " \"" + j.get<std::string>() + "\"");
  return *v;
}

}  // namespace

std::string format_config_line(const Config& c) {
  std::ostringstream out;
  out << "n=" << c.node_count() << " init=" << c.initiator() << " edges=";
  bool first = true;
  for (const auto& [i, j] : c.edges()) {
    out << (first ? "" : ",") << i << '-' << j;
    first = false;
  }
  return out.str();
}

Config parse_config_line(std::string_view line) {
  static const std::regex shape(R"(n=(\d+) init=(\d+) edges=((?:\d+-\d+)(?:,\d+-\d+)*)?)");
  static const std::regex edge(R"((\d+)-(\d+))");
  const std::string text(line);
  std::smatch m;
  if (!std::regex_match(text, m, shape)) {
    throw FormatError("expected `n=<count> init=<id> edges=<i-j>,...`, got `" + text + "`");
  }
  const int n = to_int(m[1], "node count");
  const int init = to_int(m[2], "initiator");
  std::vector<Edge> edges;
  const std::string list = m[3];
  for (auto it = std::sregex_iterator(list.begin(), list.end(), edge);
       it != std::sregex_iterator(); ++it) {
    const Edge e{to_int((*it)[1], "edge endpoint"), to_int((*it)[2], "edge endpoint")};
    if (e.first >= e.second) throw FormatError("edges must be written i-j with i < j");
    if (!edges.empty() && !(edges.back() < e)) {
      throw FormatError("edges must be listed in ascending order without repeats");
    }
    edges.push_back(e);
  }
  try {
    return Config::from_edges(n, init, edges);
  } catch (const ConfigError& err) {
    throw FormatError(err.what());
  }
}

std::vector<Config> parse_config_file(std::string_view text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos && (text[start] == '{' || text[start] == '[')) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& err) {
      throw FormatError(err.what());
    }
    std::vector<Config> out;
    if (j.is_array()) {
      for (const Json& e : j) out.push_back(config_from_json(e));
    } else {
      out.push_back(config_from_json(j));
    }
    return out;
  }
  std::vector<Config> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_config_line(line));
  }
  return out;
}

Json config_to_json(const Config& c) {
  Json edges = Json::array();
  for (const auto& [i, j] : c.edges()) edges.push_back({i, j});
  return Json{{"nodes", c.node_count()}, {"initiator", c.initiator()}, {"edges", edges}};
}

Config config_from_json(const Json& j) {
  const Json& nodes = field(j, "nodes");
  if (!nodes.is_number_integer()) throw FormatError("nodes must be an integer");
  const auto n = nodes.get<long long>();
  if (n < 1 || n > kMaxNodes) throw FormatError("nodes out of range");
  const int count = static_cast<int>(n);
  const NodeId init = node_from_json(field(j, "initiator"), count, "initiator");
  const Json& list = field(j, "edges");
  if (!list.is_array()) throw FormatError("edges must be an array");
  std::vector<Edge> edges;
  for (const Json& e : list) {
    if (!e.is_array() || e.size() != 2) throw FormatError("edge must be a pair");
    const Edge edge{node_from_json(e[0], count, "edge endpoint"),
                    node_from_json(e[1], count, "edge endpoint")};
    if (edge.first >= edge.second) throw FormatError("edges must be [i,j] with i < j");
    if (!edges.empty() && !(edges.back() < edge)) {
      throw FormatError("edges must be listed in ascending order without repeats");
    }
    edges.push_back(edge);
  }
  return Config::from_edges(count, init, edges);
}

Json event_to_json(const Event& e) {
  return Json{{"node", e.node}, {"kind", to_string(e.kind)}, {"from", e.from}};
}

Event event_from_json(const Json& j) {
  Event e;
  e.node = node_from_json(field(j, "node"), kMaxNodes, "node");
  e.kind = parse_enum<MessageKind>(field(j, "kind"), parse_message_kind, "kind");
  e.from = node_from_json(field(j, "from"), kMaxNodes, "from");
  return e;
}

Json events_to_json(const std::vector<Event>& events) {
  Json out = Json::array();
  for (const Event& e : events) out.push_back(event_to_json(e));
  return out;
}

Json state_to_json(const Config& c, const ProtocolState& s) {
  Json parent = Json::array();
  Json received = Json::array();
  Json inbox = Json::array();
  for (NodeId n = 0; n < c.node_count(); ++n) {
    const auto p = s.parent(n);
    parent.push_back(p ? Json(*p) : Json(nullptr));
    received.push_back(node_set_to_json(s.received(n)));
    Json messages = Json::array();
    for (MessageKind k : {MessageKind::Explorer, MessageKind::Echo}) {
      for (NodeId from : s.inbox(n, k)) {
        messages.push_back(Json{{"from", from}, {"type", to_string(k)}});
      }
    }
    inbox.push_back(std::move(messages));
  }
  return Json{{"parent", parent}, {"received", received}, {"inbox", inbox}};
}

ProtocolState state_from_json(const Config& c, const Json& j) {
  const int n = c.node_count();
  const Json& parent = field(j, "parent");
  const Json& received = field(j, "received");
  const Json& inbox = field(j, "inbox");
  for (const Json* arr : {&parent, &received, &inbox}) {
    if (!arr->is_array() || static_cast<int>(arr->size()) != n) {
      throw FormatError("state arrays must have one entry per node");
    }
  }
  ProtocolState s;
  for (NodeId i = 0; i < n; ++i) {
    if (!parent[i].is_null()) s.set_parent(i, node_from_json(parent[i], n, "parent"));
    s.received(i) = node_set_from_json(received[i], n, "received");
    if (!inbox[i].is_array()) throw FormatError("inbox entry must be an array");
    std::pair<int, NodeId> last{-1, -1};
    for (const Json& m : inbox[i]) {
      const MessageKind k = parse_enum<MessageKind>(field(m, "type"), parse_message_kind, "type");
      const NodeId from = node_from_json(field(m, "from"), n, "from");
      const std::pair<int, NodeId> key{k == MessageKind::Explorer ? 0 : 1, from};
      if (!(last < key)) throw FormatError("inbox messages must be sorted");
      last = key;
      s.inbox(i, k).insert(from);
    }
  }
  return s;
}

Json trace_to_json(const Trace& t) {
  Json states = Json::array();
  for (const ProtocolState& s : t.states) states.push_back(state_to_json(t.config, s));
  return Json{{"config", config_to_json(t.config)},
              {"variant", to_string(t.variant)},
              {"states", states},
              {"events", events_to_json(t.events)},
              {"loop_start", t.loop_start ? Json(*t.loop_start) : Json(nullptr)}};
}

Trace trace_from_json(const Json& j) {
  Trace t;
  t.config = config_from_json(field(j, "config"));
  t.variant = parse_enum<Variant>(field(j, "variant"), parse_variant, "variant");
  const Json& states = field(j, "states");
  const Json& events = field(j, "events");
  if (!states.is_array() || !events.is_array()) throw FormatError("states and events must be arrays");
  for (const Json& s : states) t.states.push_back(state_from_json(t.config, s));
  for (const Json& e : events) t.events.push_back(event_from_json(e));
  const Json& loop = field(j, "loop_start");
  if (!loop.is_null()) {
    if (!loop.is_number_unsigned()) throw FormatError("loop_start must be a non-negative integer");
    t.loop_start = loop.get<std::size_t>();
  }
  return t;
}

Json report_to_json(const SweepReport& r, bool timing) {
  Json results = Json::array();
  for (const SweepEntry& e : r.results) {
    const Verdict& v = e.verdict;
    results.push_back(Json{
        {"config", config_to_json(e.config)},
        {"outcome", to_string(v.outcome)},
        {"reason", v.reason ? Json(to_string(*v.reason)) : Json(nullptr)},
        {"witness", v.witness ? trace_to_json(*v.witness) : Json(nullptr)},
        {"states", v.stats.states},
        {"transitions", v.stats.transitions},
        {"millis", timing ? v.stats.elapsed.count() : 0}});
  }
  return Json{{"property", to_string(r.property)},
              {"variant", to_string(r.variant)},
              {"max_nodes", r.max_nodes},
              {"results", results},
              {"violations", r.violations()}};
}

SweepReport report_from_json(const Json& j) {
  SweepReport r;
  r.property = parse_enum<Property>(field(j, "property"), parse_property, "property");
  r.variant = parse_enum<Variant>(field(j, "variant"), parse_variant, "variant");
  r.max_nodes = field(j, "max_nodes").get<int>();
  for (const Json& e : field(j, "results")) {
    SweepEntry entry;
    entry.config = config_from_json(field(e, "config"));
    Verdict& v = entry.verdict;
    v.outcome = parse_enum<Outcome>(field(e, "outcome"), parse_outcome, "outcome");
    if (!field(e, "reason").is_null()) {
      v.reason = parse_enum<Reason>(e.at("reason"), parse_reason, "reason");
    }
    if (!field(e, "witness").is_null()) v.witness = trace_from_json(e.at("witness"));
    v.stats.states = field(e, "states").get<std::size_t>();
    v.stats.transitions = field(e, "transitions").get<std::size_t>();
    v.stats.elapsed = std::chrono::milliseconds(field(e, "millis").get<long long>());
    r.results.push_back(std::move(entry));
  }
  if (field(j, "violations").get<std::size_t>() != r.violations()) {
    throw FormatError("violations count does not match the results");
  }
  return r;
}

}  // namespace echoverify
