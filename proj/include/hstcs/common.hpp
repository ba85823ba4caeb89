#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hstcs {

using cdouble = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Validation failure of user-supplied parameters or files (CLI exit code 2).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ceil/floor with a snap tolerance so values that are integers up to
// floating-point roundoff (e.g. 5e6 * 5e-6) land on the integer.
inline long ceil_snapped(double x, double rel_tol = 1e-9) {
    return static_cast<long>(std::ceil(x - rel_tol * std::max(1.0, std::abs(x))));
}

inline long floor_snapped(double x, double rel_tol = 1e-9) {
    return static_cast<long>(std::floor(x + rel_tol * std::max(1.0, std::abs(x))));
}

inline cdouble unit_phasor(double angle) {
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace hstcs
