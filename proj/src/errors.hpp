#pragma once

#include <stdexcept>
#include <string>

namespace tme {

// Configuration file problems; carries key and line for user-facing messages.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

// A time step produced a non-finite value or a negative excursion beyond
// tolerance; names the first offending field and cell.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string field, size_t cell, double t, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)), cell_(cell), t_(t) {}

  const std::string& field() const { return field_; }
  size_t cell() const { return cell_; }
  double time() const { return t_; }

 private:
  std::string field_;
  size_t cell_;
  double t_;
};

}  // namespace tme
