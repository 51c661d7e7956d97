#pragma once

#include <stdexcept>
#include <string>

namespace scclab {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WalkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoverageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an enumeration outgrows its memory budget. completed_radius is
// the largest radius for which the partial result is still complete.
struct ResourceError : std::runtime_error {
  ResourceError(const std::string& what, double completed)
      : std::runtime_error(what), completed_radius(completed) {}
  double completed_radius;
};

}  // namespace scclab
