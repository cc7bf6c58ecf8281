#pragma once

#include <stdexcept>
#include <string>

namespace tenscert {

// Input file could not be parsed or violates the tensor file format.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operation is only defined for a restricted class of shapes (e.g. the exact
// characteristic polynomial exists for symmetric order-3 dimension-2 input).
struct ShapeUnsupported : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Mathematical precondition violated (non-positive tensor, non-unit vector, ...).
struct PreconditionViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative solver could not produce a usable result.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tenscert
