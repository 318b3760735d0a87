#pragma once

#include <stdexcept>
#include <string>

namespace copos {

inline constexpr const char* kVersion = "0.1.0";

/// Thrown when an exact enumeration would exceed its configured cap.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when the conic solver cannot reach a verdict that the caller requires.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a documented operation precondition fails (carries the witness).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace copos
