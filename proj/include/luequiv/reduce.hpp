#pragma once

#include "luequiv/canon.hpp"
#include "luequiv/hosvd.hpp"
#include "luequiv/tensor.hpp"

#include <string>
#include <utility>
#include <vector>

namespace luequiv {

// The part of a HOSVD state whose mode-i index lies in multiplicity cluster k.
// Kept unnormalized: its squared norm is the cluster's Gram value times its
// multiplicity.
template <typename Scalar>
struct SubStateBlock {
  Index mode = 0;          // purifying mode i
  Index cluster = 0;       // k
  Index index_offset = 0;  // first mode-i index of the cluster
  Index width = 0;         // multiplicity of the cluster
  PureState<Scalar> state;
};

template <typename Scalar>
SubStateBlock<Scalar> extract_substate(const HosvdResult<Scalar>& hosvd, Index i, Index k) {
  detail::check_mode(hosvd.order(), i);
  const ModeSpectrum& spec = hosvd.spectra[static_cast<std::size_t>(i)];
  if (k < 0 || k >= spec.count()) {
    throw Error(ErrorKind::InvalidArgument, "cluster " + std::to_string(k + 1) + " out of range for mode " + std::to_string(i + 1));
  }
  SubStateBlock<Scalar> out;
  out.mode = i;
  out.cluster = k;
  out.index_offset = spec.offset(k);
  out.width = spec.multiplicities[static_cast<std::size_t>(k)];

  const PureState<Scalar>& psi = hosvd.state;
  Vector<Scalar> coeffs = psi.coeffs();
  const Index lo = out.index_offset, hi = out.index_offset + out.width;
  std::vector<Index> multi(psi.dims().size(), 0);
  for (Index lin = 0; lin < psi.size(); ++lin) {
    const Index j = multi[static_cast<std::size_t>(i)];
    if (j < lo || j >= hi) coeffs(lin) = Scalar(0);
    for (std::size_t d = multi.size(); d-- > 0;) {
      if (++multi[d] < psi.dims()[d]) break;
      multi[d] = 0;
    }
  }
  out.state = PureState<Scalar>::unnormalized(psi.dims(), std::move(coeffs));
  return out;
}

// Ordered family M_{psi,m}^{i,k}: i ascending (skipping m), then k ascending.
template <typename Scalar>
struct ModeStack {
  Index mode = 0;
  std::vector<Matrix<Scalar>> blocks;
  std::vector<std::pair<Index, Index>> labels;  // (i, k), 0-based

  Index size() const noexcept { return static_cast<Index>(blocks.size()); }

  // Block-diagonal assembly diag(M^{i,k}, ...).
  Matrix<Scalar> stacked() const {
    if (blocks.empty()) return {};
    const Index n = blocks.front().rows();
    Matrix<Scalar> out = Matrix<Scalar>::Zero(n * size(), n * size());
    for (Index b = 0; b < size(); ++b) out.block(b * n, b * n, n, n) = blocks[static_cast<std::size_t>(b)];
    return out;
  }

  const Matrix<Scalar>& block(Index i, Index k) const {
    for (std::size_t b = 0; b < labels.size(); ++b)
      if (labels[b] == std::pair<Index, Index>{i, k}) return blocks[b];
    throw Error(ErrorKind::InvalidArgument, "no stack block for (i=" + std::to_string(i + 1) + ", k=" + std::to_string(k + 1) + ")");
  }
};

template <typename Scalar>
ModeStack<Scalar> build_mode_stack(const HosvdResult<Scalar>& hosvd, Index m) {
  detail::check_mode(hosvd.order(), m);
  ModeStack<Scalar> out;
  out.mode = m;
  for (Index i = 0; i < hosvd.order(); ++i) {
    if (i == m) continue;
    for (Index k = 0; k < hosvd.spectra[static_cast<std::size_t>(i)].count(); ++k) {
      out.blocks.push_back(mode_gram(extract_substate(hosvd, i, k).state, m));
      out.labels.emplace_back(i, k);
    }
  }
  return out;
}

template <typename Scalar>
struct ReducedForm {
  PureState<Scalar> state;
  // Canonicalizing unitaries, each inside the mode's HOSVD symmetry group.
  std::vector<Matrix<Scalar>> transforms;
  std::vector<DirectGroup> residual;
  std::vector<ModeStack<Scalar>> stacks;
  std::vector<CanonicalReduction<Scalar>> canonical;

  bool residual_is_phases() const {
    for (const auto& g : residual)
      if (!g.is_phase_group()) return false;
    return true;
  }

  Index residual_parameter_count() const {
    Index n = 0;
    for (const auto& g : residual) n += g.dimension();
    return n;
  }

  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (std::size_t m = 0; m < canonical.size(); ++m)
      for (const auto& w : canonical[m].warnings) out.push_back("mode " + std::to_string(m + 1) + ": " + w);
    return out;
  }
};

// Canonicalizes every mode stack as an ordered family under one shared element
// of the mode's symmetry group and applies the canonicalizing unitaries.
// Unitaries on mode m leave every other mode's stack unchanged, so the modes
// are processed independently.
template <typename Scalar>
ReducedForm<Scalar> reduce_state(const HosvdResult<Scalar>& hosvd, double tol_cluster = 1e-9) {
  ReducedForm<Scalar> out;
  for (Index m = 0; m < hosvd.order(); ++m) {
    ModeStack<Scalar> stack = build_mode_stack(hosvd, m);
    HermitianFamily<Scalar> family = stack.blocks;
    CanonicalReduction<Scalar> red = canonicalize(std::move(family), hosvd.symmetry[static_cast<std::size_t>(m)], tol_cluster);
    out.transforms.push_back(red.transform);
    out.residual.push_back(red.residual);
    out.stacks.push_back(std::move(stack));
    out.canonical.push_back(std::move(red));
  }
  out.state = apply_local_unitaries(hosvd.state, out.transforms, 1e-9);
  out.state.mark_unnormalized(false);
  return out;
}

}  // namespace luequiv
