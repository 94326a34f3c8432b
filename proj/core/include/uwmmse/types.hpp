#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace uwmmse {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Caller supplied an argument outside an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two array operands did not have compatible shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A transmitter coincides with a receiver, so the path gain is unbounded.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shared by the solver, the unfolded layers and the tape division nodes.
inline constexpr double kDivisionGuard = 1e-12;

}  // namespace uwmmse
