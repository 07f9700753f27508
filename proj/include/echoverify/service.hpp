#ifndef ECHOVERIFY_SERVICE_HPP
#define ECHOVERIFY_SERVICE_HPP

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "echoverify/checker.hpp"
#include "echoverify/json_io.hpp"

namespace httplib {
class Server;
}

namespace echoverify {

/// Stable hex digest of a trace's configuration, variant and event sequence.
std::string trace_digest(const Trace& t);

/// Interactive trace exploration over sessions, independent of transport.
///
/// Every operation returns an HTTP status plus a JSON body; errors use
/// `{"error": {"code", "message", "enabled"?}}`. Operations on one session
/// are serialized; distinct sessions never share mutable state.
class ExploreService {
 public:
  using Clock = std::chrono::steady_clock;

  struct Options {
    std::chrono::minutes idle_timeout{30};
    /// Replaceable for tests.
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
    /// Reseeds tried by new-trace before reporting exhaustion.
    int max_reseeds = 32;
    /// Cap on the length of one greedy run.
    std::size_t max_run_steps = 4096;
  };

  struct Response {
    int status = 200;
    Json body;
  };

  ExploreService();
  explicit ExploreService(Options options);

  Response create_session(const Json& body);
  Response get_session(const std::string& id);
  Response new_config(const std::string& id);
  Response new_trace(const std::string& id);
  Response new_init(const std::string& id);
  Response fork(const std::string& id, const Json& body);
  Response get_step(const std::string& id, long long index);
  Response list_configs(const std::optional<std::string>& max_nodes);
  Response check(const std::optional<std::string>& property,
                 const std::optional<std::string>& variant,
                 const std::optional<std::string>& max_nodes);

  /// Drops sessions idle for longer than the timeout; returns how many.
  std::size_t expire_idle();
  std::size_t session_count() const;

 private:
  struct Session {
    std::string id;
    int max_nodes = 0;
    Variant variant = Variant::Fixed;
    std::shared_ptr<const std::vector<Config>> configs;
    std::size_t cursor = 0;
    Trace trace;
    std::set<std::string> history;
  };
  struct Slot {
    std::mutex mutex;
    Session session;
    Clock::time_point last_used;
  };

  std::shared_ptr<Slot> find(const std::string& id);
  std::shared_ptr<const std::vector<Config>> configs_for(int max_nodes);
  Response serve_trace(Session& s, Trace t, Json extra = Json::object());

  template <typename Op>
  Response with_session(const std::string& id, Op op);

  Options options_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::mutex cache_mutex_;
  std::map<int, std::shared_ptr<const std::vector<Config>>> cache_;
  std::uint64_t next_id_ = 0;
};

/// Registers the JSON API on `server`; when `static_dir` is non-empty it is
/// served at `/` as well.
void mount_routes(httplib::Server& server, ExploreService& service,
                  const std::string& static_dir = {});

}  // namespace echoverify

#endif  // ECHOVERIFY_SERVICE_HPP
