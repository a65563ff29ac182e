#pragma once

#include <stdexcept>
#include <string>

namespace qwal {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries a byte offset when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, std::size_t pos = npos);
  std::size_t position() const { return pos_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t pos_;
};

/// Well-formed input that violates a precondition (letter outside alphabet, negative cost, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configured cap was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Rejected because of ambiguity; the message carries the witness.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for the given combination (e.g. custom structure on an ambiguous automaton).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Evaluation heuristic did not converge within its bound.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qwal
