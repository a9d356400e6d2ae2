#pragma once

#include <stdexcept>
#include <string>

namespace krlab {

// Bad argument outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The value-jet covariance block A is singular or too badly conditioned to
// factor. For real coefficients this happens on (or numerically near) R^m.
class DegenerateCovariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonFinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every real/complex density difference fell below the resolution floor.
class RateUnresolvable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootFindFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace krlab
