#pragma once

#include <stdexcept>
#include <string>

namespace edgelab {

enum class ErrorKind {
  InvalidInput,   // malformed user input or violated precondition
  NoConvergence,  // iterative solver or quadrature refinement failed
  NonGeneric,     // non-generic edge: P(a*) <= 0 or negative density on the support
  Precision,      // loss of orthogonality beyond the detector threshold
  Numerical,      // anything else that makes a result meaningless
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace edgelab
