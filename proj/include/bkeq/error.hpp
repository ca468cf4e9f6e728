#pragma once

#include <stdexcept>
#include <string>

namespace bkeq {

/// Bad user input: malformed documents, shape violations, non-finite data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical step could not be completed (eigen solver failure, defective
/// basis that cannot be assembled, singular full eigenvector matrix).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bkeq
