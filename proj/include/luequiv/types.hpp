#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace luequiv {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

using Complex = std::complex<double>;
using MatrixXc = Matrix<Complex>;
using VectorXc = Vector<Complex>;

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  Parse,
  Numeric,
};

// Every failure raised by the library carries a kind so front ends can map it
// to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Tolerances {
  double cluster = 1e-9;
  double match = 1e-8;
  double norm = 1e-10;
  double unitary = 1e-10;
  double diag = 1e-9;
};

// Dense coefficient cap; desk-scale problems only.
inline constexpr Index kMaxCoefficients = 10'000'000;

}  // namespace luequiv
