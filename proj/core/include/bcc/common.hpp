#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bcc {

// Error taxonomy. The CLI maps these onto exit codes, everything else
// just propagates them.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : error {
    using error::error;
};
struct validation_error : error {
    using error::error;
};
struct numeric_error : error {
    using error::error;
};

using node_id = std::int32_t;
using cluster_id = std::int32_t;

inline double log_factorial(std::int64_t n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

// log C(n, k), valid for 0 <= k <= n.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) throw validation_error("log_binomial: k out of range");
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace bcc
