#pragma once

#include <stdexcept>
#include <string>

namespace persfit {

/// Base class for all persfit errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Invalid argument or parameter outside its mathematical domain.
class DomainError : public Error {
  public:
    explicit DomainError(const std::string &msg) : Error(msg) {}
};

/// Undistortion failed: point outside the invertible radius of the model.
class NonInvertibleError : public Error {
  public:
    explicit NonInvertibleError(const std::string &msg) : Error(msg) {}
};

/// Pixel coincides with the projection of the gravity direction; the
/// up-vector is undefined there.
class DegeneratePixelError : public Error {
  public:
    explicit DegeneratePixelError(const std::string &msg) : Error(msg) {}
};

/// Mismatched grid or problem dimensions.
class DimensionMismatchError : public Error {
  public:
    explicit DimensionMismatchError(const std::string &msg) : Error(msg) {}
};

/// File parsing / serialization errors.
class FileFormatError : public Error {
  public:
    explicit FileFormatError(const std::string &msg) : Error(msg) {}
};

class BadMagicError : public FileFormatError {
  public:
    explicit BadMagicError(const std::string &msg) : FileFormatError(msg) {}
};

class TruncatedFileError : public FileFormatError {
  public:
    explicit TruncatedFileError(const std::string &msg) : FileFormatError(msg) {}
};

class InvariantViolationError : public FileFormatError {
  public:
    explicit InvariantViolationError(const std::string &msg) : FileFormatError(msg) {}
};

/// Damped normal equations are not positive definite.
class SingularSystemError : public Error {
  public:
    explicit SingularSystemError(const std::string &msg) : Error(msg) {}
};

/// Heuristic initialization cannot produce a usable estimate.
class DegenerateHeuristicError : public Error {
  public:
    explicit DegenerateHeuristicError(const std::string &msg) : Error(msg) {}
};

/// RANSAC initialization errors.
class InsufficientSamplesError : public Error {
  public:
    explicit InsufficientSamplesError(const std::string &msg) : Error(msg) {}
};

class NoHypothesisError : public Error {
  public:
    explicit NoHypothesisError(const std::string &msg) : Error(msg) {}
};

/// Problem assembly errors.
class EmptyProblemError : public Error {
  public:
    explicit EmptyProblemError(const std::string &msg) : Error(msg) {}
};

class NotImplementedError : public Error {
  public:
    explicit NotImplementedError(const std::string &msg) : Error(msg) {}
};

} // namespace persfit
