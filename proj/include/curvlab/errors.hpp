#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

/// A finite-difference stencil left the chart's domain box.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A sampled metric matrix was not symmetric positive definite.
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested a dimension or model combination the code does not handle.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A zonal field carries more high-degree content than the grid resolves.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curvlab
