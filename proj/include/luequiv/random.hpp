#pragma once

#include "luequiv/tensor.hpp"

#include <cstdint>
#include <numbers>
#include <random>

namespace luequiv {

// All randomness flows through an explicitly seeded engine; there is no
// global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double angle() { return 2.0 * std::numbers::pi * uniform_(engine_); }
  Index below(Index n) { return static_cast<Index>(std::uniform_int_distribution<std::uint64_t>(0, static_cast<std::uint64_t>(n - 1))(engine_)); }

  template <typename Scalar>
  Scalar gaussian() {
    using Real = RealOf<Scalar>;
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
      return Scalar(static_cast<Real>(normal()), static_cast<Real>(normal()));
    } else {
      return Scalar(normal());
    }
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

template <typename Scalar>
Matrix<Scalar> ginibre(Index rows, Index cols, Rng& rng) {
  Matrix<Scalar> g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.gaussian<Scalar>();
  return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
// diagonal moved into Q.
template <typename Scalar>
Matrix<Scalar> haar_unitary(Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix<Scalar>> qr(ginibre<Scalar>(n, n, rng));
  Matrix<Scalar> q = qr.householderQ();
  const Matrix<Scalar>& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const auto mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

template <typename Scalar>
Matrix<Scalar> random_phases(Index n, Rng& rng) {
  Matrix<Scalar> d = Matrix<Scalar>::Zero(n, n);
  for (Index j = 0; j < n; ++j) d(j, j) = std::polar(RealOf<Scalar>(1), static_cast<RealOf<Scalar>>(rng.angle()));
  return d;
}

template <typename Scalar>
Matrix<Scalar> random_hermitian(Index n, Rng& rng) {
  Matrix<Scalar> g = ginibre<Scalar>(n, n, rng);
  Matrix<Scalar> h = (g + g.adjoint()) / RealOf<Scalar>(2);
  return h;
}

// Haar-random normalized state (uniform on the unit sphere).
template <typename Scalar>
PureState<Scalar> random_state(const std::vector<Index>& dims, Rng& rng) {
  auto state = PureState<Scalar>::zeros(dims);
  for (Index i = 0; i < state.size(); ++i) state.coeffs()(i) = rng.gaussian<Scalar>();
  state.coeffs() /= state.coeffs().norm();
  state.mark_unnormalized(false);
  return state;
}

template <typename Scalar>
std::vector<Matrix<Scalar>> haar_local_unitaries(const std::vector<Index>& dims, Rng& rng) {
  std::vector<Matrix<Scalar>> out;
  for (Index d : dims) out.push_back(haar_unitary<Scalar>(d, rng));
  return out;
}

template <typename Scalar>
std::vector<Matrix<Scalar>> random_local_phases(const std::vector<Index>& dims, Rng& rng) {
  std::vector<Matrix<Scalar>> out;
  for (Index d : dims) out.push_back(random_phases<Scalar>(d, rng));
  return out;
}

}  // namespace luequiv
