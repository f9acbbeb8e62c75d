#pragma once

#include <stdexcept>

namespace alt {

/// Numerical failure distinct from domain/config errors: step underflow,
/// quadrature non-convergence, failed initialization retries.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace alt
