#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace focklab {

/// A point of the plane, identified with a complex number x + iy.
using Point = std::complex<double>;
using Complex = std::complex<double>;

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A factorization or fit failed numerically (singular matrix, unresolved quadrature, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Input configuration could not be parsed or validated.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace focklab
