#pragma once

#include <stdexcept>
#include <string>

namespace dem {

/// A precondition on an instance (dimensions, parameter ranges) was violated.
class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A JSON document does not match the expected schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// lambda fails the admissibility inequality; what() names the inequality.
class InadmissibleLambda : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dem
