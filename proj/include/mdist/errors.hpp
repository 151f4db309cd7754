#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mdist {

// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A hypothesis required by the operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed shift or function description.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyShiftError : public SpecError {
 public:
  EmptyShiftError() : SpecError("empty shift: presentation trims to nothing") {}
};

// Raised when a presentation is not transitive; carries the strongly
// connected components (node indices of the trimmed input cover) so callers
// can work componentwise.
class NotTransitiveError : public std::runtime_error {
 public:
  NotTransitiveError(std::string what, std::vector<std::vector<int>> components)
      : std::runtime_error(std::move(what)), components_(std::move(components)) {}
  const std::vector<std::vector<int>>& components() const { return components_; }

 private:
  std::vector<std::vector<int>> components_;
};

}  // namespace mdist
