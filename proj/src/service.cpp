#include "echoverify/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <random>

#include <httplib.h>

namespace echoverify {

namespace {

using Response = ExploreService::Response;

Response error(int status, const std::string& code, const std::string& message) {
  return {status, Json{{"error", Json{{"code", code}, {"message", message}}}}};
}

Response error_with_events(int status, const std::string& code,
                           const std::string& message,
                           const std::vector<Event>& enabled) {
  Response r = error(status, code, message);
  r.body["error"]["enabled"] = events_to_json(enabled);
  return r;
}

std::optional<int> parse_int(const std::string& s) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string trace_digest(const Trace& t) {
  // FNV-1a over a canonical text rendering.
  std::string text = format_config_line(t.config) + "|" + std::string(to_string(t.variant)) + "|";
  for (const Event& e : t.events) {
    text += std::to_string(e.node) + (e.kind == MessageKind::Explorer ? "X" : "E") +
            std::to_string(e.from) + ";";
  }
  if (t.loop_start) text += "@" + std::to_string(*t.loop_start);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return hex64(h);
}

ExploreService::ExploreService() : ExploreService(Options{}) {}

ExploreService::ExploreService(Options options) : options_(std::move(options)) {
  next_id_ = std::random_device{}();
  next_id_ = (next_id_ << 32) ^ std::random_device{}();
}

std::shared_ptr<const std::vector<Config>> ExploreService::configs_for(int max_nodes) {
  std::lock_guard lock(cache_mutex_);
  auto& slot = cache_[max_nodes];
  if (!slot) slot = std::make_shared<const std::vector<Config>>(enumerate_canonical(max_nodes));
  return slot;
}

std::shared_ptr<ExploreService::Slot> ExploreService::find(const std::string& id) {
  expire_idle();
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t ExploreService::expire_idle() {
  const auto now = options_.now();
  std::unique_lock lock(sessions_mutex_);
  std::size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock slot_lock(it->second->mutex, std::try_to_lock);
    // A locked slot is in use right now, so it is not idle.
    if (slot_lock.owns_lock() && now - it->second->last_used > options_.idle_timeout) {
      slot_lock.unlock();
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

std::size_t ExploreService::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

template <typename Op>
Response ExploreService::with_session(const std::string& id, Op op) {
  std::shared_ptr<Slot> slot = find(id);
  if (!slot) return error(404, "unknown_session", "no session with id " + id);
  std::lock_guard lock(slot->mutex);
  slot->last_used = options_.now();
  return op(slot->session);
}

Response ExploreService::serve_trace(Session& s, Trace t, Json extra) {
  validate_trace(t);
  s.history.insert(trace_digest(t));
  s.trace = std::move(t);
  Json body = Json{{"trace", trace_to_json(s.trace)}, {"digest", trace_digest(s.trace)}};
  for (auto& [key, value] : extra.items()) body[key] = value;
  return {200, std::move(body)};
}

Response ExploreService::create_session(const Json& body) {
  if (!body.is_object() || !body.contains("max_nodes") || !body["max_nodes"].is_number_integer()) {
    return error(400, "bad_request", "body must be {\"max_nodes\": int, \"variant\": str}");
  }
  const auto max_nodes = body["max_nodes"].get<long long>();
  if (max_nodes < 1 || max_nodes > kMaxEnumerateNodes) {
    return error(400, "bad_bounds",
                 "max_nodes must be within 1.." + std::to_string(kMaxEnumerateNodes));
  }
  std::optional<Variant> variant = Variant::Fixed;
  if (body.contains("variant")) {
    variant = body["variant"].is_string() ? parse_variant(body["variant"].get<std::string>())
                                          : std::nullopt;
  }
  if (!variant) return error(400, "bad_variant", "variant must be \"chang\" or \"fixed\"");

  auto slot = std::make_shared<Slot>();
  Session& s = slot->session;
  s.max_nodes = static_cast<int>(max_nodes);
  s.variant = *variant;
  s.configs = configs_for(s.max_nodes);
  slot->last_used = options_.now();
  Response r = serve_trace(s, stutter_trace(s.configs->front(), s.variant));
  {
    std::unique_lock lock(sessions_mutex_);
    do {
      s.id = hex64(next_id_);
      next_id_ = next_id_ * 6364136223846793005ull + 1442695040888963407ull;
    } while (sessions_.count(s.id) != 0);
    sessions_[s.id] = slot;
  }
  Json body_out{{"session_id", s.id}};
  for (auto& [key, value] : r.body.items()) body_out[key] = value;
  return {201, std::move(body_out)};
}

Response ExploreService::get_session(const std::string& id) {
  return with_session(id, [](Session& s) -> Response {
    return {200, Json{{"session_id", s.id},
                      {"max_nodes", s.max_nodes},
                      {"variant", to_string(s.variant)},
                      {"config_index", s.cursor},
                      {"config_count", s.configs->size()},
                      {"trace", trace_to_json(s.trace)},
                      {"digest", trace_digest(s.trace)},
                      {"shown", s.history.size()}}};
  });
}

Response ExploreService::new_config(const std::string& id) {
  return with_session(id, [this](Session& s) {
    s.cursor = (s.cursor + 1) % s.configs->size();
    return serve_trace(s, stutter_trace((*s.configs)[s.cursor], s.variant),
                       Json{{"config_index", s.cursor}});
  });
}

Response ExploreService::new_trace(const std::string& id) {
  return with_session(id, [this](Session& s) -> Response {
    const Config& c = s.trace.config;
    const std::uint64_t base = s.history.size();
    for (int attempt = 0; attempt < options_.max_reseeds; ++attempt) {
      std::mt19937_64 rng(base + static_cast<std::uint64_t>(attempt));
      Trace t = stutter_trace(c, s.variant);
      while (t.events.size() < options_.max_run_steps) {
        const std::vector<Event> enabled = enabled_events(c, t.states.back());
        if (enabled.empty()) break;
        const Event e = enabled[rng() % enabled.size()];
        t.states.push_back(apply_event(c, t.states.back(), e));
        t.events.push_back(e);
      }
      if (s.history.count(trace_digest(t)) == 0) return serve_trace(s, std::move(t));
    }
    return error(404, "exhausted", "no further distinct trace found for this configuration");
  });
}

Response ExploreService::new_init(const std::string& id) {
  return with_session(id, [](Session& s) -> Response {
    return {200, Json{{"notice", "initial state is unique for this model"},
                      {"state", state_to_json(s.trace.config, s.trace.states.front())}}};
  });
}

Response ExploreService::fork(const std::string& id, const Json& body) {
  return with_session(id, [&](Session& s) -> Response {
    if (!body.is_object() || !body.contains("state_index") ||
        !body["state_index"].is_number_integer()) {
      return error(400, "bad_request", "body must be {\"state_index\": int, \"event\"?: Event}");
    }
    const auto index = body["state_index"].get<long long>();
    if (index < 0 || index >= static_cast<long long>(s.trace.states.size())) {
      return error(400, "bad_index", "state_index outside the current trace");
    }
    const auto at = static_cast<std::size_t>(index);
    const Config& c = s.trace.config;
    const ProtocolState& pre = s.trace.states[at];
    const std::vector<Event> enabled = enabled_events(c, pre);

    std::optional<Event> chosen;
    if (body.contains("event") && !body["event"].is_null()) {
      Event e;
      try {
        e = event_from_json(body["event"]);
      } catch (const std::exception& err) {
        return error(400, "bad_event", err.what());
      }
      if (std::find(enabled.begin(), enabled.end(), e) == enabled.end()) {
        return error_with_events(409, "not_enabled", "event is not enabled at this state",
                                 enabled);
      }
      chosen = e;
    } else {
      std::optional<Event> shown;
      if (at < s.trace.events.size()) shown = s.trace.events[at];
      for (const Event& e : enabled) {
        if (!shown || e != *shown) {
          chosen = e;
          break;
        }
      }
      if (!chosen) {
        return error_with_events(409, "no_alternative",
                                 "no enabled event differs from the one shown", enabled);
      }
    }
    Trace t{c, s.variant,
            {s.trace.states.begin(), s.trace.states.begin() + static_cast<std::ptrdiff_t>(at) + 1},
            {s.trace.events.begin(), s.trace.events.begin() + static_cast<std::ptrdiff_t>(at)},
            std::nullopt};
    t.states.push_back(apply_event(c, pre, *chosen));
    t.events.push_back(*chosen);
    return serve_trace(s, std::move(t), Json{{"enabled", events_to_json(enabled)}});
  });
}

Response ExploreService::get_step(const std::string& id, long long index) {
  return with_session(id, [&](Session& s) -> Response {
    const Trace& t = s.trace;
    if (index < 0 || index > static_cast<long long>(t.events.size())) {
      return error(400, "bad_index", "step index outside the current trace");
    }
    const auto at = static_cast<std::size_t>(index);
    const Config& c = t.config;
    const bool terminal = at == t.events.size();
    const ProtocolState& pre = t.states[at];
    const ProtocolState& post = terminal ? pre : t.states[at + 1];
    return {200, Json{{"index", at},
                      {"pre", state_to_json(c, pre)},
                      {"event", terminal ? Json(nullptr) : event_to_json(t.events[at])},
                      {"post", state_to_json(c, post)},
                      {"enabled", events_to_json(enabled_events(c, pre))},
                      {"finish", finish(c, post)},
                      {"spanning_tree", spanning_tree(c, post)},
                      {"stutter", terminal && !t.loop_start},
                      {"loop_start", t.loop_start ? Json(*t.loop_start) : Json(nullptr)}}};
  });
}

Response ExploreService::list_configs(const std::optional<std::string>& max_nodes) {
  const auto n = max_nodes ? parse_int(*max_nodes) : std::nullopt;
  if (!n || *n < 1 || *n > kMaxEnumerateNodes) {
    return error(400, "bad_bounds",
                 "max_nodes must be within 1.." + std::to_string(kMaxEnumerateNodes));
  }
  Json list = Json::array();
  for (const Config& c : *configs_for(*n)) list.push_back(config_to_json(c));
  return {200, std::move(list)};
}

Response ExploreService::check(const std::optional<std::string>& property,
                               const std::optional<std::string>& variant,
                               const std::optional<std::string>& max_nodes) {
  const auto p = property ? parse_property(*property) : std::nullopt;
  if (!p) return error(400, "bad_property", "property must be correctness or termination");
  const auto v = variant ? parse_variant(*variant) : std::nullopt;
  if (!v) return error(400, "bad_variant", "variant must be chang or fixed");
  const auto n = max_nodes ? parse_int(*max_nodes) : std::nullopt;
  if (!n || *n < 1 || *n > kMaxSweepNodes) {
    return error(400, "bad_bounds",
                 "max_nodes must be within 1.." + std::to_string(kMaxSweepNodes));
  }
  return {200, report_to_json(sweep(*n, *v, *p))};
}

void mount_routes(httplib::Server& server, ExploreService& service,
                  const std::string& static_dir) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto parse_body = [](const httplib::Request& req) -> std::optional<Json> {
    if (req.body.empty()) return Json::object();
    try {
      return Json::parse(req.body);
    } catch (const Json::parse_error&) {
      return std::nullopt;
    }
  };
  auto param = [](const httplib::Request& req, const char* key) -> std::optional<std::string> {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
  };
  const Response bad_json = error(400, "bad_json", "request body is not valid JSON");

  server.Post("/sessions", [=, &service](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    reply(res, body ? service.create_session(*body) : bad_json);
  });
  server.Get(R"(/sessions/([^/]+))", [=, &service](const httplib::Request& req,
                                                   httplib::Response& res) {
    reply(res, service.get_session(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/new-config)",
              [=, &service](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.new_config(req.matches[1]));
              });
  server.Post(R"(/sessions/([^/]+)/new-trace)",
              [=, &service](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.new_trace(req.matches[1]));
              });
  server.Post(R"(/sessions/([^/]+)/new-init)",
              [=, &service](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.new_init(req.matches[1]));
              });
  server.Post(R"(/sessions/([^/]+)/fork)",
              [=, &service](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                reply(res, body ? service.fork(req.matches[1], *body) : bad_json);
              });
  server.Get(R"(/sessions/([^/]+)/steps/(-?\d+))",
             [=, &service](const httplib::Request& req, httplib::Response& res) {
               const auto index = parse_int(req.matches[2]);
               reply(res, index ? service.get_step(req.matches[1], *index)
                                : error(400, "bad_index", "step index out of range"));
             });
  server.Get("/configs", [=, &service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.list_configs(param(req, "max_nodes")));
  });
  server.Get("/check", [=, &service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.check(param(req, "property"), param(req, "variant"),
                             param(req, "max_nodes")));
  });
  if (!static_dir.empty()) server.set_mount_point("/", static_dir);
}

}  // namespace echoverify
