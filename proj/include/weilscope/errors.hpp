#pragma once

#include <stdexcept>
#include <string>

namespace weilscope {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's domain (bad prime,
/// odd-degree field where a tower is needed, unparseable element, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Field would exceed the configured table size cap.
class SizeCapError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Exponent is not of the form 1 + k(p^n - 1) where that is required.
class NotNormalizedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A Weil sum was requested as a rational integer but is not one.
///
/// `internal()` distinguishes the two causes: false when the exponent fails
/// s = 1 (mod p-1), true when the exponent passed that check and the count
/// histogram still came out non-rational, which can only be a bug.
class NotRationalError : public Error {
 public:
  NotRationalError(const std::string& what, bool internal)
      : Error(what), internal_(internal) {}
  bool internal() const noexcept { return internal_; }

 private:
  bool internal_;
};

/// The 4x4 multiplicity system has no unique solution.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace weilscope
