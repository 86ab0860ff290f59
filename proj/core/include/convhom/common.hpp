#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace convhom {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Point or quasimomentum in R^d, d in {1, 2}.
using Coord = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Error categories. Each maps onto a CLI exit code (see exit_code()).
enum class ErrorKind {
  configuration,  ///< invalid parameters or config documents
  usage,          ///< API misuse: mismatched grids, wrong context
  assembly,       ///< a structural bound failed during operator assembly
  numeric,        ///< iteration failure, singular factorization
  spectral,       ///< eigenvalue isolation/positivity failures
  contour,        ///< Riesz projector quadrature did not converge
  solver,         ///< cell problem / reduced resolvent failures
  model           ///< effective model failed its own invariants
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorKind kind_;
  std::string stage_;
};

/// 2 for configuration/usage errors, 3 for numeric and spectral failures.
int exit_code(ErrorKind kind) noexcept;

[[noreturn]] void raise(ErrorKind kind, std::string stage, const std::string& message);

}  // namespace convhom
