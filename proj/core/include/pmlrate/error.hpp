#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pml {

/// Invalid parameters passed to a constructor (radii ordering, bad spec strings).
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain an operation supports.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the estimate reached so far.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial, std::size_t intervals)
      : std::runtime_error(what), partial_(partial), intervals_(intervals) {}

  double partial_estimate() const noexcept { return partial_; }
  std::size_t intervals() const noexcept { return intervals_; }

 private:
  double partial_;
  std::size_t intervals_;
};

/// A linear system (or closed-form truncation) is numerically singular.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The automatic mode cutoff hit the special-function order window.
class CutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pml
