#pragma once

#include <stdexcept>
#include <string>

namespace lowmach {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MeanNotZero : public Error {
public:
  using Error::Error;
};

/// A thermodynamic state (or an integration path) left the validity box of a
/// gas model. Coefficients are never extrapolated.
class OutOfDomain : public Error {
public:
  using Error::Error;
};

class PathOutOfDomain : public OutOfDomain {
public:
  using OutOfDomain::OutOfDomain;
};

class DegenerateState : public Error {
public:
  using Error::Error;
};

class SingularJacobian : public Error {
public:
  using Error::Error;
};

class InversionFailure : public Error {
public:
  using Error::Error;
};

class NumericalBlowup : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace lowmach
