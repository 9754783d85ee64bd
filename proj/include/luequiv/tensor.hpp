#pragma once

#include "luequiv/types.hpp"

#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace luequiv {

// Dense coefficient tensor of a pure state in C^{I_1} (x) ... (x) C^{I_N}.
// Storage is row-major over the multi-index (last mode fastest), 0-based.
template <typename Scalar>
class PureState {
 public:
  using Real = RealOf<Scalar>;

  PureState() = default;

  PureState(std::vector<Index> dims, Vector<Scalar> coeffs, std::string label = {})
      : dims_(std::move(dims)), coeffs_(std::move(coeffs)), label_(std::move(label)) {
    if (dims_.size() < 2) {
      throw Error(ErrorKind::InvalidArgument, "a state needs at least two subsystems");
    }
    Index total = 1;
    for (Index d : dims_) {
      if (d < 1) throw Error(ErrorKind::InvalidArgument, "subsystem dimensions must be positive");
      if (total > kMaxCoefficients / d) {
        throw Error(ErrorKind::InvalidArgument, "dimension product exceeds the dense coefficient cap");
      }
      total *= d;
    }
    if (coeffs_.size() != total) {
      throw Error(ErrorKind::DimensionMismatch, "coefficient count does not match dimensions");
    }
  }

  // Sub-states and other intermediate objects are not normalized; they say so.
  static PureState unnormalized(std::vector<Index> dims, Vector<Scalar> coeffs, std::string label = {}) {
    PureState s(std::move(dims), std::move(coeffs), std::move(label));
    s.unnormalized_ = true;
    return s;
  }

  static PureState zeros(std::vector<Index> dims) {
    Index total = std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
    return unnormalized(std::move(dims), Vector<Scalar>::Zero(total));
  }

  const std::vector<Index>& dims() const noexcept { return dims_; }
  Index order() const noexcept { return static_cast<Index>(dims_.size()); }
  Index dim(Index m) const { return dims_.at(static_cast<std::size_t>(m)); }
  Index size() const noexcept { return coeffs_.size(); }

  const Vector<Scalar>& coeffs() const noexcept { return coeffs_; }
  Vector<Scalar>& coeffs() noexcept { return coeffs_; }

  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  bool is_unnormalized() const noexcept { return unnormalized_; }
  void mark_unnormalized(bool flag = true) noexcept { unnormalized_ = flag; }

  Real norm() const { return coeffs_.norm(); }

  Index linear_index(std::span<const Index> multi) const {
    Index lin = 0;
    for (std::size_t m = 0; m < dims_.size(); ++m) lin = lin * dims_[m] + multi[m];
    return lin;
  }

  std::vector<Index> multi_index(Index lin) const {
    std::vector<Index> multi(dims_.size());
    for (std::size_t m = dims_.size(); m-- > 0;) {
      multi[m] = lin % dims_[m];
      lin /= dims_[m];
    }
    return multi;
  }

  const Scalar& operator()(std::span<const Index> multi) const { return coeffs_(linear_index(multi)); }
  Scalar& operator()(std::span<const Index> multi) { return coeffs_(linear_index(multi)); }

 private:
  std::vector<Index> dims_;
  Vector<Scalar> coeffs_;
  std::string label_;
  bool unnormalized_ = false;
};

template <typename Scalar>
struct Unfolding {
  Index mode = 0;
  Matrix<Scalar> matrix;
};

namespace detail {

inline void check_mode(Index order, Index m) {
  if (m < 0 || m >= order) {
    throw Error(ErrorKind::InvalidArgument, "mode " + std::to_string(m + 1) + " out of range 1.." +
                                                std::to_string(order));
  }
}

// Column of multi-index `multi` in the mode-m unfolding: remaining modes in
// ascending order, last one fastest.
inline Index unfolding_column(std::span<const Index> dims, std::span<const Index> multi, Index m) {
  Index col = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (static_cast<Index>(j) == m) continue;
    col = col * dims[j] + multi[j];
  }
  return col;
}

}  // namespace detail

template <typename Scalar>
Unfolding<Scalar> mode_unfold(const PureState<Scalar>& state, Index m) {
  detail::check_mode(state.order(), m);
  const auto& dims = state.dims();
  const Index rows = dims[static_cast<std::size_t>(m)];
  const Index cols = state.size() / rows;

  Unfolding<Scalar> out{m, Matrix<Scalar>(rows, cols)};
  std::vector<Index> multi(dims.size(), 0);
  for (Index lin = 0; lin < state.size(); ++lin) {
    out.matrix(multi[static_cast<std::size_t>(m)], detail::unfolding_column(dims, multi, m)) = state.coeffs()(lin);
    for (std::size_t j = dims.size(); j-- > 0;) {
      if (++multi[j] < dims[j]) break;
      multi[j] = 0;
    }
  }
  return out;
}

template <typename Scalar>
PureState<Scalar> refold(const Unfolding<Scalar>& unfolding, const std::vector<Index>& dims) {
  detail::check_mode(static_cast<Index>(dims.size()), unfolding.mode);
  auto state = PureState<Scalar>::zeros(dims);
  const Index m = unfolding.mode;
  if (unfolding.matrix.rows() != dims[static_cast<std::size_t>(m)] ||
      unfolding.matrix.size() != state.size()) {
    throw Error(ErrorKind::DimensionMismatch, "unfolding shape does not match dimensions");
  }
  std::vector<Index> multi(dims.size(), 0);
  for (Index lin = 0; lin < state.size(); ++lin) {
    state.coeffs()(lin) = unfolding.matrix(multi[static_cast<std::size_t>(m)], detail::unfolding_column(dims, multi, m));
    for (std::size_t j = dims.size(); j-- > 0;) {
      if (++multi[j] < dims[j]) break;
      multi[j] = 0;
    }
  }
  return state;
}

// Exactly Hermitian by construction: the lower triangle mirrors the upper one.
template <typename Derived>
Matrix<typename Derived::Scalar> gram(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  Matrix<Scalar> g(n, n);
  for (Index r = 0; r < n; ++r) {
    g(r, r) = Scalar(a.row(r).squaredNorm());
    for (Index s = r + 1; s < n; ++s) {
      g(r, s) = (a.row(r) * a.row(s).adjoint())(0, 0);
      g(s, r) = Eigen::numext::conj(g(r, s));
    }
  }
  return g;
}

template <typename Scalar>
Matrix<Scalar> mode_gram(const PureState<Scalar>& state, Index m) {
  return gram(mode_unfold(state, m).matrix);
}

template <typename Derived>
RealOf<typename Derived::Scalar> unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  if (u.rows() != u.cols()) return std::numeric_limits<RealOf<Scalar>>::infinity();
  return (u * u.adjoint() - Matrix<Scalar>::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

// Multiplies mode m by an arbitrary matrix (no unitarity requirement).
template <typename Scalar>
PureState<Scalar> apply_mode_operator(const PureState<Scalar>& state, Index m, const Matrix<Scalar>& op) {
  detail::check_mode(state.order(), m);
  if (op.rows() != state.dim(m) || op.cols() != state.dim(m)) {
    throw Error(ErrorKind::DimensionMismatch, "operator on mode " + std::to_string(m + 1) + " has wrong shape");
  }
  Unfolding<Scalar> u = mode_unfold(state, m);
  u.matrix = op * u.matrix;
  PureState<Scalar> out = refold(u, state.dims());
  out.mark_unnormalized(state.is_unnormalized());
  out.set_label(state.label());
  return out;
}

// (U_1 (x) ... (x) U_N)|psi>; each U_m must be unitary within tol_unitary.
template <typename Scalar>
PureState<Scalar> apply_local_unitaries(const PureState<Scalar>& state, std::span<const Matrix<Scalar>> unitaries,
                                        double tol_unitary = 1e-10) {
  if (static_cast<Index>(unitaries.size()) != state.order()) {
    throw Error(ErrorKind::DimensionMismatch, "need one unitary per subsystem");
  }
  PureState<Scalar> out = state;
  for (Index m = 0; m < state.order(); ++m) {
    const auto& u = unitaries[static_cast<std::size_t>(m)];
    if (u.rows() != state.dim(m) || u.cols() != state.dim(m)) {
      throw Error(ErrorKind::DimensionMismatch, "unitary on mode " + std::to_string(m + 1) + " has wrong shape");
    }
    if (unitarity_defect(u) > tol_unitary) {
      throw Error(ErrorKind::InvalidArgument, "matrix on mode " + std::to_string(m + 1) + " is not unitary");
    }
    if (u.isIdentity(0)) continue;
    out = apply_mode_operator(out, m, u);
  }
  return out;
}

template <typename Scalar>
PureState<Scalar> apply_local_unitaries(const PureState<Scalar>& state, const std::vector<Matrix<Scalar>>& unitaries,
                                        double tol_unitary = 1e-10) {
  return apply_local_unitaries(state, std::span<const Matrix<Scalar>>(unitaries), tol_unitary);
}

// <a|b>
template <typename Scalar>
Scalar overlap(const PureState<Scalar>& a, const PureState<Scalar>& b) {
  if (a.dims() != b.dims()) throw Error(ErrorKind::DimensionMismatch, "overlap of states with different dimensions");
  return a.coeffs().dot(b.coeffs());
}

template <typename Scalar>
std::vector<Matrix<Scalar>> identities(const std::vector<Index>& dims) {
  std::vector<Matrix<Scalar>> out;
  out.reserve(dims.size());
  for (Index d : dims) out.push_back(Matrix<Scalar>::Identity(d, d));
  return out;
}

}  // namespace luequiv
