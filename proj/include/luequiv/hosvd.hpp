#pragma once

#include "luequiv/cluster.hpp"
#include "luequiv/direct_group.hpp"
#include "luequiv/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

namespace luequiv {

// Distinct squared m-mode singular values with multiplicities, listed in the
// order they occupy on the diagonal of the HOSVD state's mode Gram.
struct ModeSpectrum {
  Index mode = 0;
  std::vector<double> values;
  std::vector<Index> multiplicities;

  Index count() const noexcept { return static_cast<Index>(values.size()); }

  Index dimension() const { return std::accumulate(multiplicities.begin(), multiplicities.end(), Index{0}); }

  // First diagonal position of cluster k.
  Index offset(Index k) const {
    Index off = 0;
    for (Index s = 0; s < k; ++s) off += multiplicities[static_cast<std::size_t>(s)];
    return off;
  }

  // (value, multiplicity) pairs in descending value order; the comparison
  // view, independent of the diagonal ordering convention.
  std::vector<std::pair<double, Index>> sorted() const {
    std::vector<std::pair<double, Index>> out;
    for (std::size_t k = 0; k < values.size(); ++k) out.emplace_back(values[k], multiplicities[k]);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    return out;
  }

  // Diagonal of the HOSVD Gram: each value repeated by its multiplicity.
  std::vector<double> expanded() const {
    std::vector<double> out;
    for (std::size_t k = 0; k < values.size(); ++k) out.insert(out.end(), static_cast<std::size_t>(multiplicities[k]), values[k]);
    return out;
  }
};

// Partitions `raw` into multiplicity clusters. The input is sorted descending
// first; consecutive gaps <= tol_cluster * max(1, largest) merge.
inline ModeSpectrum cluster_eigenvalues(std::vector<double> raw, double tol_cluster, Index mode = 0) {
  std::sort(raw.begin(), raw.end(), std::greater<>());
  ModeSpectrum out;
  out.mode = mode;
  if (raw.empty()) return out;
  const double abs_tol = tol_cluster * std::max(1.0, std::abs(raw.front()));
  for (const auto& c : cluster_runs(raw, abs_tol)) {
    out.values.push_back(c.value < 0 && c.value >= -abs_tol ? 0.0 : c.value);
    out.multiplicities.push_back(c.size);
  }
  return out;
}

inline DirectGroup symmetry_group(const ModeSpectrum& spectrum) { return DirectGroup(spectrum.multiplicities); }

enum class HosvdOrder {
  // A diagonal Gram whose equal entries already sit together is accepted in
  // its given order (the input is "already HOSVD").
  Preserve,
  // Clusters always descending; used when two states must share one layout.
  Descending,
};

struct HosvdOptions {
  double tol_cluster = 1e-9;
  double tol_diag = 1e-9;
  double tol_norm = 1e-10;
  HosvdOrder order = HosvdOrder::Preserve;
};

template <typename Scalar>
struct HosvdResult {
  PureState<Scalar> state;
  // V_m with (V_1 (x) ... (x) V_N) input = state.
  std::vector<Matrix<Scalar>> transforms;
  std::vector<ModeSpectrum> spectra;
  std::vector<DirectGroup> symmetry;
  std::vector<Matrix<Scalar>> grams;  // mode Grams of the input
  bool already_hosvd = true;

  Index order() const { return state.order(); }
};

namespace detail {

// Unit factor that makes the first clearly nonzero component real positive.
template <typename Derived>
typename Derived::Scalar column_phase_factor(const Eigen::MatrixBase<Derived>& col, double floor = 1e-8) {
  using Scalar = typename Derived::Scalar;
  const double limit = std::max(floor, 1e-3 * static_cast<double>(col.cwiseAbs().maxCoeff()));
  for (Index i = 0; i < col.size(); ++i) {
    const auto mag = std::abs(col(i));
    if (mag > limit) {
      if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
        return std::conj(col(i)) / mag;
      } else {
        return col(i) < 0 ? Scalar(-1) : Scalar(1);
      }
    }
  }
  return Scalar(1);
}

template <typename Derived>
void normalize_column_phase(Eigen::MatrixBase<Derived>& col, double floor = 1e-8) {
  col *= column_phase_factor(col, floor);
}

template <typename Scalar>
Matrix<Scalar> permutation_matrix(const std::vector<Index>& new_to_old) {
  const Index n = static_cast<Index>(new_to_old.size());
  Matrix<Scalar> p = Matrix<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) p(i, new_to_old[static_cast<std::size_t>(i)]) = Scalar(1);
  return p;
}

struct ModePlan {
  bool identity = true;
  std::vector<Index> permutation;  // set when a reorder of a diagonal Gram suffices
  ModeSpectrum spectrum;
};

// Decides how mode m of a state with Gram `g` reaches HOSVD layout without an
// eigensolver, when possible.
template <typename Scalar>
bool plan_diagonal_mode(const Matrix<Scalar>& g, const HosvdOptions& opts, Index mode, ModePlan& plan) {
  const Index n = g.rows();
  Matrix<Scalar> off = g;
  off.diagonal().setZero();
  if (n > 1 && static_cast<double>(off.cwiseAbs().maxCoeff()) > opts.tol_diag) return false;

  std::vector<double> diag(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = static_cast<double>(std::real(g(i, i)));
  const double scale = std::max(1.0, *std::max_element(diag.begin(), diag.end()));
  const double abs_tol = opts.tol_cluster * scale;
  const auto runs = cluster_runs(diag, abs_tol);

  bool grouped = true, descending = true;
  for (std::size_t a = 0; a < runs.size(); ++a) {
    if (a + 1 < runs.size() && runs[a + 1].value > runs[a].value) descending = false;
    for (std::size_t b = a + 2; b < runs.size(); ++b) {
      if (std::abs(runs[a].value - runs[b].value) <= abs_tol) grouped = false;
    }
  }

  if (grouped && (descending || opts.order == HosvdOrder::Preserve)) {
    plan.identity = true;
    plan.spectrum.mode = mode;
    for (const auto& r : runs) {
      plan.spectrum.values.push_back(r.value < 0 && r.value >= -abs_tol ? 0.0 : r.value);
      plan.spectrum.multiplicities.push_back(r.size);
    }
    return true;
  }

  // Reorder descending; stable so equal entries keep their relative order.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return diag[static_cast<std::size_t>(a)] > diag[static_cast<std::size_t>(b)];
  });
  std::vector<double> sorted;
  for (Index i : order) sorted.push_back(diag[static_cast<std::size_t>(i)]);
  plan.identity = false;
  plan.permutation = order;
  plan.spectrum = cluster_eigenvalues(sorted, opts.tol_cluster, mode);
  return true;
}

}  // namespace detail

// Brings `state` to HOSVD form mode by mode. Mode Grams are independent of the
// unitaries applied on other modes, so each V_m is computed from the input.
template <typename Scalar>
HosvdResult<Scalar> to_hosvd(const PureState<Scalar>& state, const HosvdOptions& opts = {}) {
  if (std::abs(static_cast<double>(state.norm()) - 1.0) > opts.tol_norm) {
    throw Error(ErrorKind::Numeric, "state is not normalized (norm " + std::to_string(static_cast<double>(state.norm())) + ")");
  }
  HosvdResult<Scalar> out;
  const Index order = state.order();
  out.transforms.reserve(static_cast<std::size_t>(order));

  for (Index m = 0; m < order; ++m) {
    Matrix<Scalar> g = mode_gram(state, m);
    out.grams.push_back(g);
    const Index n = g.rows();

    detail::ModePlan plan;
    if (detail::plan_diagonal_mode(g, opts, m, plan)) {
      if (plan.identity) {
        out.transforms.push_back(Matrix<Scalar>::Identity(n, n));
      } else {
        out.transforms.push_back(detail::permutation_matrix<Scalar>(plan.permutation));
        out.already_hosvd = false;
      }
      out.spectra.push_back(std::move(plan.spectrum));
      continue;
    }

    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(g);
    if (eig.info() != Eigen::Success) {
      throw Error(ErrorKind::Numeric, "eigensolver failed on the mode-" + std::to_string(m + 1) + " Gram");
    }
    // Ascending from the solver; reverse for descending order.
    Matrix<Scalar> vecs = eig.eigenvectors().rowwise().reverse();
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = static_cast<double>(eig.eigenvalues()(n - 1 - i));
    for (Index j = 0; j < n; ++j) {
      auto col = vecs.col(j);
      detail::normalize_column_phase(col);
    }
    out.transforms.push_back(vecs.adjoint());
    out.spectra.push_back(cluster_eigenvalues(vals, opts.tol_cluster, m));
    out.already_hosvd = false;
  }

  out.state = out.already_hosvd ? state : apply_local_unitaries(state, out.transforms, 1e-9);
  out.state.mark_unnormalized(false);
  for (const auto& s : out.spectra) out.symmetry.push_back(symmetry_group(s));
  return out;
}

// Spectra agree when multiplicities match exactly and values within tol,
// compared in descending order.
inline bool same_spectrum(const ModeSpectrum& a, const ModeSpectrum& b, double tol) {
  const auto sa = a.sorted(), sb = b.sorted();
  if (sa.size() != sb.size()) return false;
  for (std::size_t k = 0; k < sa.size(); ++k) {
    if (sa[k].second != sb[k].second || std::abs(sa[k].first - sb[k].first) > tol) return false;
  }
  return true;
}

}  // namespace luequiv
