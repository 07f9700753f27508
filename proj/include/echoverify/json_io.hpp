#ifndef ECHOVERIFY_JSON_IO_HPP
#define ECHOVERIFY_JSON_IO_HPP

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "echoverify/checker.hpp"
#include "echoverify/netconfig.hpp"
#include "echoverify/protocol.hpp"

namespace echoverify {

/// Key order follows the documented schemas.
using Json = nlohmann::ordered_json;

/// Thrown for text or JSON that does not follow the documented formats.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Config text line: `n=<count> init=<id> edges=<i-j>[,<i-j>...]`, edges with
// i < j in ascending order.
std::string format_config_line(const Config& c);
Config parse_config_line(std::string_view line);

/// A config file holds either text lines (blank lines and `#` comments
/// skipped) or a JSON config object / array of objects.
std::vector<Config> parse_config_file(std::string_view text);

Json config_to_json(const Config& c);
Config config_from_json(const Json& j);

Json event_to_json(const Event& e);
Event event_from_json(const Json& j);
Json events_to_json(const std::vector<Event>& events);

Json state_to_json(const Config& c, const ProtocolState& s);
ProtocolState state_from_json(const Config& c, const Json& j);

Json trace_to_json(const Trace& t);
Trace trace_from_json(const Json& j);

/// Report schema. With `timing == false` every `millis` is written as 0 so
/// repeated runs serialize identically.
Json report_to_json(const SweepReport& r, bool timing = true);
SweepReport report_from_json(const Json& j);

}  // namespace echoverify

#endif  // ECHOVERIFY_JSON_IO_HPP
