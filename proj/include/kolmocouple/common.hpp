#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace kolmocouple {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Parameter validation failure; the message names the offending parameter.
class InvalidParameterError : public std::runtime_error {
public:
    explicit InvalidParameterError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

/// A coefficient or test-function evaluator produced a non-finite value.
class NumericalEvalError : public std::runtime_error {
public:
    NumericalEvalError(const std::string& what_arg, Vec where)
        : std::runtime_error(what_arg), location(std::move(where)) {}
    Vec location;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what_arg, double achieved_estimate,
                    double achieved_error)
        : std::runtime_error(what_arg),
          estimate(achieved_estimate),
          error(achieved_error) {}
    double estimate;
    double error;
};

/// An operation was asked for a quantity undefined on the diagonal x == y.
class DiagonalError : public std::runtime_error {
public:
    explicit DiagonalError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

/// 1D/2D stationary solvers: degeneracy structure outside the supported cases.
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

/// Least-squares fit attempted on degenerate data (e.g. identically zero).
class DegenerateFitError : public std::runtime_error {
public:
    explicit DegenerateFitError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }
inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite())
        throw NumericalEvalError(std::string(what) + ": non-finite vector", v);
}

}  // namespace kolmocouple
