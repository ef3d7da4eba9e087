#ifndef DCSIM_ERRORS_HPP
#define DCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dcsim {

/// Invalid or inconsistent configuration (bad topology, missing files, ...).
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or out-of-contract input data (traces, price files, ...).
/// The CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

} // namespace dcsim

#endif
