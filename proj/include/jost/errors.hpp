#pragma once

#include <stdexcept>
#include <string>

namespace jost {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad argument: wrong sizes, non-finite values, out-of-range orders.
struct InvalidArgument : Error {
    using Error::Error;
};

/// Evaluation at a singular point (z = 0 for irregular functions, k = 0 in a denominator).
struct SingularPoint : Error {
    using Error::Error;
};

/// The requested energy lies outside the region where the radial limits exist
/// for the chosen contour (including overflow-guard trips).
struct DivergenceError : Error {
    using Error::Error;
};

/// The adaptive integrator gave up (step-size underflow, step budget exhausted).
struct IntegrationError : Error {
    using Error::Error;
};

/// An iterative search did not converge.
struct NoConvergence : Error {
    using Error::Error;
};

}  // namespace jost
