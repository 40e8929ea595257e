#include "rmest/errors.hpp"

namespace rmest {

NonConvergence::NonConvergence(const std::string& what, int iterations, double residual)
    : Error(what + " (iterations=" + std::to_string(iterations) +
            ", residual=" + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

}  // namespace rmest
