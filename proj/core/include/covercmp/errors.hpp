#pragma once

#include <stdexcept>
#include <string>

namespace covercmp {

/// A model parameter or contract argument violates its invariants.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A premium target lies below the cheapest purchasable contract.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bracketed search found no sign change.
class NoRoot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The general-count deductible first-order condition is not monotone on [0, L].
class NonMonotoneFOC : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covercmp
