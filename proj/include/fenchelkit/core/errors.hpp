#pragma once

#include <stdexcept>
#include <string>

namespace fenchelkit {

/// Invalid construction data: unknown energy name, parameter out of range,
/// non-convex samples, infeasible constraint data.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An inner iterative solve (root find, ascent, Newton) did not reach its
/// tolerance. The message names the query point.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The approximation scheme stopped: a hypothesis check on the comparison
/// function failed or the gradient norms of the stage solutions blew up.
class SchemeAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem configuration document failed to parse or validate.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line),
        message_(msg) {}
  int line() const { return line_; }
  /// The message without the line prefix.
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

}  // namespace fenchelkit
