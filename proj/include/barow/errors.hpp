#pragma once

#include <stdexcept>
#include <string>

namespace barow {

/// Thrown when a factorization or solve cannot proceed (non-PD matrix,
/// rank-deficient design, near-singular covariance).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown for malformed input data: non-finite values in a batch, CSV
/// parse failures, schema violations.
class InvalidData : public std::runtime_error {
public:
    explicit InvalidData(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace barow
