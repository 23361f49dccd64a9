#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad sizes, non-finite couplings, empty ranges.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The signed-reversal involution squares to -1 for even N, so no real sector split exists.
class EvenNNoSplit : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// An iterative method ran out of iterations. Carries the best iterate found.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, std::vector<std::complex<double>> best = {}, double residual = 0.0)
        : Error(what), best_iterate(std::move(best)), residual(residual) {}

    std::vector<std::complex<double>> best_iterate;
    double residual;
};

/// Both ends of a bracket carry the same classification.
class NoBracket : public Error {
public:
    using Error::Error;
};

/// A bracket contains more than one transition; the caller has to narrow it.
class AmbiguousBracket : public Error {
public:
    using Error::Error;
};

/// Doubling the Fourier truncation moved the answer by more than the allowed drift.
class TruncationUnstable : public Error {
public:
    using Error::Error;
};

/// The requested energy is not close to any eigenvalue of the matrix.
class NotAnEigenvalue : public Error {
public:
    using Error::Error;
};

/// A classification that should be structural could not be decided.
class Inconclusive : public Error {
public:
    using Error::Error;
};

}  // namespace qes
