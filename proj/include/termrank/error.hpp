#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace termrank {

// Base for every failure caused by the input data rather than by how the
// program was invoked. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MarginViolation : public DataError {
 public:
  using DataError::DataError;
};

class UnsupportedMeasure : public DataError {
 public:
  using DataError::DataError;
};

class UnknownMeasure : public DataError {
 public:
  using DataError::DataError;
};

class EmptyInput : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateDataset : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public DataError {
 public:
  using DataError::DataError;
};

class SingleClass : public DataError {
 public:
  using DataError::DataError;
};

class TooFewExamples : public DataError {
 public:
  using DataError::DataError;
};

class UnknownTag : public DataError {
 public:
  using DataError::DataError;
};

class EmptyCorpus : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Invalid configuration or option values; a usage error, not a data error.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace termrank
