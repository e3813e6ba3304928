#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace kmx {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Default absolute tolerance on Frobenius-norm residuals.
inline constexpr double kDefaultTol = 1e-10;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
  using Error::Error;
};

/// Restricted Killing form (or another required metric) is singular.
struct SingularMetricError : Error {
  using Error::Error;
};

/// Leading coefficient of an expansion is not invertible.
struct NotQuasiClassicalError : Error {
  using Error::Error;
};

/// A rational matrix function is unbounded at u -> infinity.
struct NormalizationRequiredError : Error {
  using Error::Error;
};

/// Evaluation hit (or came too close to) a pole.
struct PoleError : Error {
  using Error::Error;
};

/// Spectral sampling did not stabilize a kernel dimension.
struct SamplingError : Error {
  using Error::Error;
};

/// Seed matrix handed to a perturbative solver is not a classical solution.
struct InvalidSeedError : Error {
  using Error::Error;
};

struct CrossingNotFoundError : Error {
  using Error::Error;
};

struct NotClosedError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

}  // namespace kmx
