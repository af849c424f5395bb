#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsoc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Malformed input text; `line()` is 1-based.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

/// A point required by an algorithm lies outside the mesh.
class LocateError : public Error {
public:
  using Error::Error;
};

/// A normal line of the smooth curve does not meet the interpolating polygon.
class CoveringError : public Error {
public:
  using Error::Error;
};

/// Closest-point projection onto the curve is not unique.
class AmbiguityError : public Error {
public:
  using Error::Error;
};

class SolverError : public Error {
public:
  using Error::Error;
};

/// Invalid experiment configuration; `key()` names the offending setting.
class ConfigError : public Error {
public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

class NonconvergenceError : public Error {
public:
  NonconvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

private:
  std::vector<double> history_;
};

} // namespace hsoc
