#pragma once

#include <stdexcept>
#include <string>

namespace hml {

/// Invalid argument values: parameters outside their documented domain,
/// mismatched grids, malformed input files.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that cannot be completed to the promised accuracy
/// (overflow, catastrophic cancellation, divergence). Never returned as a
/// quietly wrong number.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

} // namespace hml
