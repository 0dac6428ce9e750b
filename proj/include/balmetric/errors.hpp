#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace balmetric {

// Bad input: wrong degree, non-positive coefficient, unsupported parity.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Anything that goes wrong inside the numerics.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double best_estimate, double err_est)
        : NumericalError(what), best_estimate_(best_estimate), err_est_(err_est) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double err_est() const noexcept { return err_est_; }

private:
    double best_estimate_;
    double err_est_;
};

// An operator failed part way through a trajectory.
class IterationError : public NumericalError {
public:
    IterationError(const std::string& what, std::size_t step)
        : NumericalError(what + " (at step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate, double last_step)
        : NumericalError(what), last_iterate_(std::move(last_iterate)), last_step_(last_step) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double last_step() const noexcept { return last_step_; }

private:
    std::vector<double> last_iterate_;
    double last_step_;
};

} // namespace balmetric
