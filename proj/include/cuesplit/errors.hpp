#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cuesplit {

// Root of every error the toolkit throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input rejected by validation. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Validation failure attached to a location inside a structured input,
// e.g. "pages[0].blocks[2].lines[1].tokens[3].bbox".
class PathError : public ValidationError {
 public:
  PathError(std::string kind, std::string path, const std::string& message)
      : ValidationError(kind + " at " + path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class SchemaError : public PathError {
 public:
  SchemaError(std::string path, const std::string& message)
      : PathError("SchemaError", std::move(path), message) {}
};

class GeometryError : public PathError {
 public:
  GeometryError(std::string path, const std::string& message)
      : PathError("GeometryError", std::move(path), message) {}
};

class EmptyError : public PathError {
 public:
  EmptyError(std::string path, const std::string& message)
      : PathError("EmptyError", std::move(path), message) {}
};

#define CUESPLIT_VALIDATION_ERROR(Name)                              \
  class Name : public ValidationError {                              \
   public:                                                           \
    explicit Name(const std::string& message)                        \
        : ValidationError(#Name ": " + message) {}                   \
  };

CUESPLIT_VALIDATION_ERROR(ConfigError)
CUESPLIT_VALIDATION_ERROR(DataError)
CUESPLIT_VALIDATION_ERROR(ShapeMismatch)
CUESPLIT_VALIDATION_ERROR(InvalidRef)
CUESPLIT_VALIDATION_ERROR(EmptyCorpus)
CUESPLIT_VALIDATION_ERROR(EmptyDocument)
CUESPLIT_VALIDATION_ERROR(InvalidDocument)
CUESPLIT_VALIDATION_ERROR(ConfigMismatch)
CUESPLIT_VALIDATION_ERROR(LengthMismatch)
CUESPLIT_VALIDATION_ERROR(ModelMismatch)
CUESPLIT_VALIDATION_ERROR(DuplicateId)
CUESPLIT_VALIDATION_ERROR(AlignmentError)
CUESPLIT_VALIDATION_ERROR(FormatError)

#undef CUESPLIT_VALIDATION_ERROR

class RuleSyntaxError : public ValidationError {
 public:
  RuleSyntaxError(std::size_t line, std::size_t column,
                  const std::string& message)
      : ValidationError("RuleSyntaxError at line " + std::to_string(line) +
                        ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Optimisation produced a NaN or infinite objective.
class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(const std::string& message)
      : Error("NonFinite: " + message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IoError: " + message) {}
};

}  // namespace cuesplit
