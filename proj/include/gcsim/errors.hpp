#pragma once

#include <stdexcept>
#include <string>

namespace gcsim {

/// Base class for all errors raised by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or out-of-range run configuration.
class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(what) {}
};

/// Circuit construction rejected (invariant violations listed in the message).
class build_error : public error {
public:
    explicit build_error(const std::string& what) : error(what) {}
};

/// Non-finite values fed into numerical routines.
class numerical_input_error : public error {
public:
    explicit numerical_input_error(const std::string& what) : error(what) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

class solve_error : public error {
public:
    explicit solve_error(const std::string& what) : error(what) {}
};

/// Newton iteration exhausted max_newton_iters (or stalled on a singular
/// Jacobian after making progress). Carries the last residual norm.
class nonconvergence_error : public solve_error {
public:
    nonconvergence_error(const std::string& what, double last_residual, int iterations)
        : solve_error(what), last_residual(last_residual), iterations(iterations) {}
    double last_residual;
    int iterations;
};

/// Structurally singular linear system; `pivot_index` names the elimination
/// column whose pivot fell below threshold.
class singular_matrix_error : public solve_error {
public:
    singular_matrix_error(const std::string& what, int pivot_index)
        : solve_error(what), pivot_index(pivot_index) {}
    int pivot_index;
};

} // namespace gcsim
