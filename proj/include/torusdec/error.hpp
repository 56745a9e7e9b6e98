#ifndef TORUSDEC_ERROR_HPP_
#define TORUSDEC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace torusdec {

// Exception hierarchy. Each class maps to one CLI exit code (see harness.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A lemma/proposition hypothesis does not hold for the given data.
class HypothesisFailed : public Error {
 public:
  using Error::Error;
};

// A constructive search (BSG refinement, regular subset, granule search)
// ended without a certified result.
class ExtractionFailed : public Error {
 public:
  using Error::Error;
};

// A guaranteed conclusion was violated: this is a bug, never a data issue.
class InternalAssertion : public Error {
 public:
  using Error::Error;
};

}  // namespace torusdec

#endif  // TORUSDEC_ERROR_HPP_
