#pragma once

#include <stdexcept>
#include <string>

namespace zf {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A prime table does not reach the limit an operation needs.
class InsufficientSieveError : public std::runtime_error {
 public:
  InsufficientSieveError(double required, double available)
      : std::runtime_error("prime table limit " + std::to_string(available) +
                           " is below the required limit " + std::to_string(required)),
        required_limit(required) {}
  double required_limit;
};

// A term, leaf or sample budget would be exceeded.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature stopped before reaching the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"),
        achieved_error(achieved) {}
  double achieved_error;
};

// A numerical verdict cannot be trusted (e.g. unresolved tail mass).
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zf
