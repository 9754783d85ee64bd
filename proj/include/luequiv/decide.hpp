#pragma once

#include "luequiv/hosvd.hpp"
#include "luequiv/phases.hpp"
#include "luequiv/reduce.hpp"

#include <optional>
#include <string>
#include <vector>

namespace luequiv {

enum class VerdictKind { Equivalent, Inequivalent, Undecided };

// Which invariant separated the states.
enum class FailedInvariant { None, Spectra, CanonicalStacks, ModulusPattern, PhaseSystem };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Equivalent: return "Equivalent";
    case VerdictKind::Inequivalent: return "Inequivalent";
    case VerdictKind::Undecided: return "Undecided";
  }
  return "?";
}

inline const char* to_string(FailedInvariant f) {
  switch (f) {
    case FailedInvariant::None: return "none";
    case FailedInvariant::Spectra: return "spectra";
    case FailedInvariant::CanonicalStacks: return "canonical stacks";
    case FailedInvariant::ModulusPattern: return "modulus pattern";
    case FailedInvariant::PhaseSystem: return "phase system inconsistent";
  }
  return "?";
}

template <typename Scalar>
struct Verdict {
  VerdictKind kind = VerdictKind::Undecided;
  std::optional<std::vector<Matrix<Scalar>>> witness;  // (x) U_m psi = phi up to global phase
  FailedInvariant failed = FailedInvariant::None;
  std::string reason;
  Index failed_mode = -1;  // 0-based mode of a spectra/stack mismatch
  std::vector<DirectGroup> residual_report;
  double witness_residual = -1;
};

struct WitnessCheck {
  bool ok = false;
  double residual = 0;
};

// ||(x) U_m psi - e^{i alpha} phi|| with alpha chosen optimally.
template <typename Scalar>
WitnessCheck validate_witness(const PureState<Scalar>& psi, const PureState<Scalar>& phi,
                              const std::vector<Matrix<Scalar>>& unitaries, double tol) {
  if (psi.dims() != phi.dims()) throw Error(ErrorKind::DimensionMismatch, "witness check on states with different dimensions");
  const PureState<Scalar> moved = apply_local_unitaries(psi, unitaries, 1e-9);
  const Scalar ov = overlap(phi, moved);
  Scalar phase(1);
  if (std::abs(ov) > 0) phase = ov / std::abs(ov);
  WitnessCheck out;
  out.residual = static_cast<double>((moved.coeffs() - phase * phi.coeffs()).norm());
  out.ok = out.residual < tol;
  return out;
}

struct CompareOptions {
  double tol_cluster = 1e-9;
  double tol_match = 1e-8;
  double tol_norm = 1e-10;
};

// Everything the pipeline computed, for reports.
template <typename Scalar>
struct Comparison {
  HosvdResult<Scalar> hosvd_a, hosvd_b;
  std::optional<ReducedForm<Scalar>> reduced_a, reduced_b;
  std::optional<PhaseMatch> phases;
  Verdict<Scalar> verdict;
};

template <typename Scalar>
Comparison<Scalar> compare_detailed(const PureState<Scalar>& psi, const PureState<Scalar>& phi, const CompareOptions& opts = {}) {
  if (psi.dims() != phi.dims()) throw Error(ErrorKind::DimensionMismatch, "states have different dimensions");

  Comparison<Scalar> out;
  Verdict<Scalar>& v = out.verdict;
  HosvdOptions hopts;
  hopts.tol_cluster = opts.tol_cluster;
  hopts.tol_diag = opts.tol_cluster;
  hopts.tol_norm = opts.tol_norm;
  hopts.order = HosvdOrder::Descending;
  out.hosvd_a = to_hosvd(psi, hopts);
  out.hosvd_b = to_hosvd(phi, hopts);

  for (Index m = 0; m < psi.order(); ++m) {
    if (!same_spectrum(out.hosvd_a.spectra[static_cast<std::size_t>(m)], out.hosvd_b.spectra[static_cast<std::size_t>(m)], opts.tol_cluster)) {
      v.kind = VerdictKind::Inequivalent;
      v.failed = FailedInvariant::Spectra;
      v.failed_mode = m;
      v.reason = "mode-" + std::to_string(m + 1) + " spectra differ";
      return out;
    }
  }

  out.reduced_a = reduce_state(out.hosvd_a, opts.tol_cluster);
  out.reduced_b = reduce_state(out.hosvd_b, opts.tol_cluster);
  const ReducedForm<Scalar>& ra = *out.reduced_a;
  const ReducedForm<Scalar>& rb = *out.reduced_b;
  for (Index m = 0; m < psi.order(); ++m) {
    if (!same_canonical(ra.canonical[static_cast<std::size_t>(m)], rb.canonical[static_cast<std::size_t>(m)], opts.tol_match)) {
      v.kind = VerdictKind::Inequivalent;
      v.failed = FailedInvariant::CanonicalStacks;
      v.failed_mode = m;
      v.reason = "mode-" + std::to_string(m + 1) + " canonical stacks differ";
      return out;
    }
  }

  if (!ra.residual_is_phases()) {
    v.kind = VerdictKind::Undecided;
    v.residual_report = ra.residual;
    v.reason = "residual symmetry keeps blocks larger than 1:";
    for (Index m = 0; m < psi.order(); ++m) {
      const auto& g = ra.residual[static_cast<std::size_t>(m)];
      if (!g.is_phase_group()) v.reason += " mode " + std::to_string(m + 1) + " " + g.describe() + ";";
    }
    return out;
  }

  const PhaseMatchOutcome pm = match_phases(ra.state, rb.state, opts.tol_match, &ra.residual);
  if (!pm.match) {
    v.kind = VerdictKind::Inequivalent;
    if (pm.failure == PhaseFailure::Modulus) {
      v.failed = FailedInvariant::ModulusPattern;
      v.reason = "reduced forms differ in modulus at |";
      for (Index j : pm.offending_index) v.reason += std::to_string(j + 1);
      v.reason += ">";
    } else {
      v.failed = FailedInvariant::PhaseSystem;
      v.reason = "no diagonal phases in the residual group map one reduced form to the other";
    }
    return out;
  }
  out.phases = pm.match;

  // U_m = (R_b,m V_b,m)^dagger D_m (R_a,m V_a,m)
  const auto d = pm.match->template unitaries<Scalar>();
  std::vector<Matrix<Scalar>> witness;
  for (Index m = 0; m < psi.order(); ++m) {
    const auto s = static_cast<std::size_t>(m);
    const Matrix<Scalar> ta = ra.transforms[s] * out.hosvd_a.transforms[s];
    const Matrix<Scalar> tb = rb.transforms[s] * out.hosvd_b.transforms[s];
    witness.push_back(tb.adjoint() * d[s] * ta);
  }
  const WitnessCheck check = validate_witness(psi, phi, witness, opts.tol_match);
  v.witness_residual = check.residual;
  if (!check.ok) {
    v.kind = VerdictKind::Undecided;
    v.residual_report = ra.residual;
    v.reason = "phase solution found but the assembled witness failed validation (residual " + std::to_string(check.residual) + ")";
    return out;
  }
  v.kind = VerdictKind::Equivalent;
  v.witness = std::move(witness);
  v.reason = "witness validated";
  return out;
}

template <typename Scalar>
Verdict<Scalar> compare(const PureState<Scalar>& psi, const PureState<Scalar>& phi, const CompareOptions& opts = {}) {
  return compare_detailed(psi, phi, opts).verdict;
}

}  // namespace luequiv
