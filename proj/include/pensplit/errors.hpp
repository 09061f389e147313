#pragma once

#include <stdexcept>
#include <string>

namespace pensplit {

/// Caller misuse: dimension mismatches, bad parameters, wrong operator kind.
class UsageError : public std::invalid_argument {
public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// No closed form is available for the requested quantity.
class UnsupportedError : public std::runtime_error {
public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// A user-supplied callback broke its documented contract.
class ContractViolation : public std::logic_error {
public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Malformed run configuration document.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pensplit
