#pragma once

#include <stdexcept>
#include <string>

namespace wolff {

// Parameter combination outside the regime an operation is defined for.
class RegimeError : public std::domain_error {
public:
    explicit RegimeError(const std::string& what) : std::domain_error(what) {}
};

// Malformed or incomplete configuration / input data.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace wolff
