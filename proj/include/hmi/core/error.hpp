#pragma once

#include <stdexcept>
#include <string>

namespace hmi {

// Bad input files, parameters or command-line configuration. The CLI maps
// this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures while a trial or experiment is running (exit code 3).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScenarioError : public ConfigError {
 public:
  enum class Kind { Syntax, StartOnObstacle, UnreachableGoal, DuplicateGoal, Invalid };

  ScenarioError(Kind kind, int line, int col, const std::string& what)
      : ConfigError(format(line, col, what)), kind_(kind), line_(line), col_(col) {}

  Kind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  static std::string format(int line, int col, const std::string& what) {
    if (line <= 0) return "scenario: " + what;
    return "scenario:" + std::to_string(line) + ":" + std::to_string(col) + ": " + what;
  }

  Kind kind_;
  int line_;
  int col_;
};

}  // namespace hmi
