#include "rsm/errors.hpp"

#include <utility>

namespace rsm {

DivergenceError::DivergenceError(const std::string& what, double time)
    : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}

NonConvergenceError::NonConvergenceError(const std::string& what, double residual,
                                         int iterations)
    : Error(what + " after " + std::to_string(iterations) +
            " iterations, residual " + std::to_string(residual)),
      residual_(residual),
      iterations_(iterations) {}

PartialResultError::PartialResultError(const std::string& what,
                                       std::vector<std::string> failures)
    : Error(what), failures_(std::move(failures)) {}

}  // namespace rsm
