#pragma once

#include <stdexcept>
#include <string>

namespace bqmc {

// Invalid configuration: bad parameters, missing data files, incompatible options.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the mathematical domain of a function (e.g. u <= 0 for the inverse CDF).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numerical construction broke down (zero denominators, vanishing directions).
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// Root finding saw a payout that is not monotone in z1.
class NonMonotoneError : public std::runtime_error {
public:
    explicit NonMonotoneError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bqmc
