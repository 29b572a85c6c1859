#ifndef NOQE_ERRORS_H
#define NOQE_ERRORS_H

#include <complex>
#include <stdexcept>
#include <string>

namespace noqe {

/// Violated precondition: bad qubit index, mismatched sizes, invalid argument.
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A dense guardrail (qubit count, memory) would be exceeded.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input text could not be parsed into a domain object.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A persisted dataset is malformed, truncated or fails its checksum.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical degeneracy, e.g. a vanishing trace or an empty retained subspace.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Division by an overlap whose magnitude is below the reliability floor.
/// Carries both estimates so callers can decide whether to widen the budget.
struct UnreliableDivision : DegenerateError {
    std::complex<double> numerator;
    std::complex<double> overlap;
    UnreliableDivision(const std::string &msg, std::complex<double> num, std::complex<double> s)
        : DegenerateError(msg), numerator(num), overlap(s) {
    }
};

}  // namespace noqe

#endif
