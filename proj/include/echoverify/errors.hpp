#ifndef ECHOVERIFY_ERRORS_HPP
#define ECHOVERIFY_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace echoverify {

/// Malformed configuration shape (wrong adjacency length, out-of-range node).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition, e.g. applying a disabled event.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Partial counters accumulated before a resource limit stopped the work.
struct PartialStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
};

/// A size guard or state budget was exceeded.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what, PartialStats partial = {})
      : std::runtime_error(what), partial_(partial) {}

  const PartialStats& partial() const { return partial_; }

 private:
  PartialStats partial_;
};

}  // namespace echoverify

#endif  // ECHOVERIFY_ERRORS_HPP
