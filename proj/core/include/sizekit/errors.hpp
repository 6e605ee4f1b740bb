#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sizekit {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based source line (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Two relations imply different ratios (or fixed values) for the same pair of handles.
class ConflictError : public Error {
 public:
  ConflictError(std::size_t relation, std::vector<std::size_t> against, const std::string& what)
      : Error(what), relation_(relation), against_(std::move(against)) {}
  /// Index of the relation being merged when the conflict surfaced.
  std::size_t relation() const noexcept { return relation_; }
  /// Indices of the earlier relations whose implied value disagrees.
  const std::vector<std::size_t>& against() const noexcept { return against_; }

 private:
  std::size_t relation_;
  std::vector<std::size_t> against_;
};

class InfeasibleBound : public Error {
 public:
  using Error::Error;
};

class UnknownHandle : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace sizekit
