#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace porelbm {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed on-disk content: bad magic, wrong dtype, truncated payload,
// non-binary geometry pixels.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateRangeError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, std::int64_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

// Geometry has no pore cell at all.
class NoFlowDomainError : public Error {
 public:
  using Error::Error;
};

// Geometry has no solid cell, so a nonzero body force accelerates the fluid
// without bound.
class UnboundedAccelerationError : public Error {
 public:
  using Error::Error;
};

class UndefinedPermeabilityError : public Error {
 public:
  using Error::Error;
};

class MissingFileError : public Error {
 public:
  using Error::Error;
};

}  // namespace porelbm
