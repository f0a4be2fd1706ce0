#pragma once

#include <stdexcept>
#include <string>

namespace rr {

// Bad argument: even kernel size, zero dimension, shape mismatch, box off canvas.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mask that was required to be non-empty had no 1-pixels.
class EmptyRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Base for every failure raised by a refiner backend.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

class TimeoutError : public BackendError {
 public:
  using BackendError::BackendError;
};

class HttpStatusError : public BackendError {
 public:
  HttpStatusError(int status, const std::string& body)
      : BackendError("backend returned HTTP " + std::to_string(status) +
                     (body.empty() ? std::string() : ": " + body)),
        status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class PayloadError : public BackendError {
 public:
  using BackendError::BackendError;
};

class DimensionMismatch : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace rr
