#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the admissible range of an operation.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A configuration document is malformed; the message starts with the field path.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Two fields or operators live on different grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// The fiber derivative never changed sign on [0, t_max].
class NoBracket : public Error {
 public:
  using Error::Error;
};

/// An iterative method exhausted its iteration budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// File-system failures, carrying the offending path in the message.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fraclab
