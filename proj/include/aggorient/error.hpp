#pragma once

#include <stdexcept>
#include <string>

namespace aggorient {

/// Base for every domain failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input geometry cannot support the requested computation (collinear points,
/// coincident correspondences, zero variance).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class OutOfBoundsError : public Error {
 public:
  using Error::Error;
};

/// Doubly centered distance matrix has rank above two.
class NonPlanarError : public Error {
 public:
  using Error::Error;
};

class InvalidCorrespondenceError : public Error {
 public:
  using Error::Error;
};

/// The two primaries share no aggregate point, so no aggregation center exists.
class NoOverlapError : public Error {
 public:
  using Error::Error;
};

class UndefinedOrientationError : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

/// Wraps a downstream failure with the name of the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace aggorient
