#pragma once

#include <stdexcept>
#include <string>

namespace ddsim {

// Thrown when a numerical routine fails to reach its tolerance; carries a
// human-readable diagnostic (what was integrated, achieved error, budget).
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Configuration / input-file problems. Distinct from std::invalid_argument so
// the CLI can map them onto separate exit codes.
class config_error : public std::runtime_error {
public:
  config_error(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_ = 0;
  int column_ = 0;
};

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ddsim
