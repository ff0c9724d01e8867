#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fidelity {

/// Base for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line > 0 ? what + " at line " + std::to_string(line) : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input is well-formed but violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A stage could not produce a result from otherwise valid input.
class ProcessingError : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public ProcessingError {
 public:
  using ProcessingError::ProcessingError;
};

class EstimationError : public ProcessingError {
 public:
  using ProcessingError::ProcessingError;
};

class FitError : public ProcessingError {
 public:
  using ProcessingError::ProcessingError;
};

class SimulationError : public ProcessingError {
 public:
  using ProcessingError::ProcessingError;
};

class UndefinedEffectError : public ProcessingError {
 public:
  using ProcessingError::ProcessingError;
};

class ReportError : public ProcessingError {
 public:
  using ProcessingError::ProcessingError;
};

}  // namespace fidelity
