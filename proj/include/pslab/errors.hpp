#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pslab {

/// Violated precondition of a library operation. The message names the
/// condition that failed; the CLI maps this to exit status 1.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative solver did not converge within its budget. Carries the best
/// iterate and per-root scaled residuals so callers can inspect how close
/// the run got.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what,
                 std::vector<std::complex<double>> best,
                 std::vector<double> resid)
        : std::runtime_error(what),
          best_iterate(std::move(best)),
          residuals(std::move(resid)) {}

    std::vector<std::complex<double>> best_iterate;
    std::vector<double> residuals;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw domain_error(msg);
}

}  // namespace pslab
