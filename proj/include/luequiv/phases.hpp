#pragma once

#include "luequiv/direct_group.hpp"
#include "luequiv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace luequiv {

// Linear congruences sum_v c_ev * x_v = rhs_e (mod 2 pi) over real angles with
// small integer coefficients.
struct PhaseSystem {
  Index variable_count = 0;
  std::vector<std::vector<std::int64_t>> coefficients;  // one row per equation
  std::vector<double> rhs;
  std::vector<double> tolerance;  // allowed angular slack per equation

  Index equation_count() const noexcept { return static_cast<Index>(rhs.size()); }

  void add_equation(std::vector<std::int64_t> row, double value, double tol) {
    coefficients.push_back(std::move(row));
    rhs.push_back(value);
    tolerance.push_back(tol);
  }
};

struct PhaseSolveResult {
  bool consistent = false;
  std::vector<double> solution;  // particular solution, free variables at 0
  Index rank = 0;
  Index free_variables = 0;
  double worst_violation = 0;  // largest |wrapped rhs| over eliminated rows
  Index failing_row = -1;
};

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double x) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = std::remainder(x, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

// Echelon form by unimodular integer row operations (swaps and adding integer
// multiples of one row to another), so the reduced system has exactly the
// same solution set modulo 2 pi. A pivot row d*x_p + ... = r is solvable for
// any values of the later variables; a row reduced to zero demands r = 0
// (mod 2 pi) within its accumulated tolerance.
inline PhaseSolveResult solve_phase_system(PhaseSystem system) {
  auto& a = system.coefficients;
  auto& rhs = system.rhs;
  auto& tol = system.tolerance;
  const Index rows = system.equation_count();
  const Index cols = system.variable_count;
  for (const auto& row : a) {
    if (static_cast<Index>(row.size()) != cols) throw Error(ErrorKind::DimensionMismatch, "phase equation has the wrong width");
  }

  auto axpy = [&](Index dst, Index src, std::int64_t q) {
    auto& d = a[static_cast<std::size_t>(dst)];
    const auto& s = a[static_cast<std::size_t>(src)];
    for (Index c = 0; c < cols; ++c) d[static_cast<std::size_t>(c)] -= q * s[static_cast<std::size_t>(c)];
    rhs[static_cast<std::size_t>(dst)] -= static_cast<double>(q) * rhs[static_cast<std::size_t>(src)];
    tol[static_cast<std::size_t>(dst)] += static_cast<double>(q < 0 ? -q : q) * tol[static_cast<std::size_t>(src)];
  };
  auto swap_rows = [&](Index r1, Index r2) {
    std::swap(a[static_cast<std::size_t>(r1)], a[static_cast<std::size_t>(r2)]);
    std::swap(rhs[static_cast<std::size_t>(r1)], rhs[static_cast<std::size_t>(r2)]);
    std::swap(tol[static_cast<std::size_t>(r1)], tol[static_cast<std::size_t>(r2)]);
  };
  auto at = [&](Index r, Index c) -> std::int64_t { return a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]; };

  std::vector<Index> pivot_col;
  Index prow = 0;
  for (Index c = 0; c < cols && prow < rows; ++c) {
    // Euclid on column c among rows >= prow until a single nonzero remains.
    while (true) {
      Index best = -1;
      for (Index r = prow; r < rows; ++r) {
        if (at(r, c) != 0 && (best < 0 || std::llabs(at(r, c)) < std::llabs(at(best, c)))) best = r;
      }
      if (best < 0) break;
      bool others = false;
      for (Index r = prow; r < rows; ++r) {
        if (r == best || at(r, c) == 0) continue;
        axpy(r, best, at(r, c) / at(best, c));
        others = others || at(r, c) != 0;
      }
      if (!others) {
        swap_rows(prow, best);
        break;
      }
    }
    if (prow < rows && at(prow, c) != 0) {
      pivot_col.push_back(c);
      ++prow;
    }
  }

  PhaseSolveResult out;
  out.rank = prow;
  out.free_variables = cols - prow;
  out.consistent = true;
  for (Index r = prow; r < rows; ++r) {
    const double v = std::abs(wrap_angle(rhs[static_cast<std::size_t>(r)]));
    out.worst_violation = std::max(out.worst_violation, v);
    if (v > tol[static_cast<std::size_t>(r)] && out.consistent) {
      out.consistent = false;
      out.failing_row = r;
    }
  }
  if (!out.consistent) return out;

  out.solution.assign(static_cast<std::size_t>(cols), 0.0);
  for (Index r = prow; r-- > 0;) {
    const Index pc = pivot_col[static_cast<std::size_t>(r)];
    double acc = rhs[static_cast<std::size_t>(r)];
    for (Index c = pc + 1; c < cols; ++c) acc -= static_cast<double>(at(r, c)) * out.solution[static_cast<std::size_t>(c)];
    out.solution[static_cast<std::size_t>(pc)] = acc / static_cast<double>(at(r, pc));
  }
  return out;
}

// Per-mode diagonal phases D_m with (D_1 (x) ... (x) D_N) a = b up to a global
// phase (absorbed into mode 1).
struct PhaseMatch {
  std::vector<std::vector<double>> angles;
  Index free_variables = 0;  // gauge freedoms left in the solution
  Index equations = 0;

  template <typename Scalar>
  std::vector<Matrix<Scalar>> unitaries() const {
    std::vector<Matrix<Scalar>> out;
    for (const auto& mode : angles) {
      const Index n = static_cast<Index>(mode.size());
      Matrix<Scalar> d = Matrix<Scalar>::Zero(n, n);
      for (Index j = 0; j < n; ++j) d(j, j) = std::polar(RealOf<Scalar>(1), static_cast<RealOf<Scalar>>(mode[static_cast<std::size_t>(j)]));
      out.push_back(std::move(d));
    }
    return out;
  }
};

enum class PhaseFailure { None, Modulus, Inconsistent };

struct PhaseMatchOutcome {
  std::optional<PhaseMatch> match;
  PhaseFailure failure = PhaseFailure::None;
  std::vector<Index> offending_index;  // multi-index of a modulus mismatch
};

// Builds the angle system for b_j = e^{i sum_m theta^{(m)}_{j_m}} a_j. When
// `links` is given (one phase group per mode), slots linked in a group share a
// single variable.
template <typename Scalar>
PhaseSystem build_phase_system(const PureState<Scalar>& a, const PureState<Scalar>& b, double tol_match,
                               const std::vector<DirectGroup>* links = nullptr) {
  const Index order = a.order();
  std::vector<std::vector<Index>> var_of(static_cast<std::size_t>(order));
  Index next = 0;
  for (Index m = 0; m < order; ++m) {
    auto& slots = var_of[static_cast<std::size_t>(m)];
    slots.assign(static_cast<std::size_t>(a.dim(m)), -1);
    if (links) {
      const DirectGroup& g = (*links)[static_cast<std::size_t>(m)];
      if (g.ambient_size() != a.dim(m) || !g.is_phase_group()) {
        throw Error(ErrorKind::InvalidArgument, "phase links must be size-1 block groups matching the dimensions");
      }
      std::vector<Index> class_var(static_cast<std::size_t>(g.class_count()), -1);
      for (Index j = 0; j < a.dim(m); ++j) {
        auto& v = class_var[static_cast<std::size_t>(g.class_of(j))];
        if (v < 0) v = next++;
        slots[static_cast<std::size_t>(j)] = v;
      }
    } else {
      for (Index j = 0; j < a.dim(m); ++j) slots[static_cast<std::size_t>(j)] = next++;
    }
  }

  // Largest moduli first, so pivots come from the best-conditioned phases.
  std::vector<Index> support;
  for (Index lin = 0; lin < a.size(); ++lin) {
    if (std::abs(a.coeffs()(lin)) > tol_match || std::abs(b.coeffs()(lin)) > tol_match) support.push_back(lin);
  }
  std::stable_sort(support.begin(), support.end(),
                   [&](Index x, Index y) { return std::abs(a.coeffs()(x)) > std::abs(a.coeffs()(y)); });

  PhaseSystem sys;
  sys.variable_count = next;
  for (Index lin : support) {
    const auto multi = a.multi_index(lin);
    std::vector<std::int64_t> row(static_cast<std::size_t>(next), 0);
    for (Index m = 0; m < order; ++m) ++row[static_cast<std::size_t>(var_of[static_cast<std::size_t>(m)][static_cast<std::size_t>(multi[static_cast<std::size_t>(m)])])];
    const Scalar ratio = b.coeffs()(lin) * std::conj(a.coeffs()(lin));
    const double mag = static_cast<double>(std::abs(a.coeffs()(lin)));
    sys.add_equation(std::move(row), static_cast<double>(std::arg(ratio)), std::min(std::numbers::pi, tol_match / mag));
  }
  return sys;
}

template <typename Scalar>
PhaseMatchOutcome match_phases(const PureState<Scalar>& a, const PureState<Scalar>& b, double tol_match = 1e-8,
                               const std::vector<DirectGroup>* links = nullptr) {
  if (a.dims() != b.dims()) throw Error(ErrorKind::DimensionMismatch, "phase matching needs equal dimensions");
  PhaseMatchOutcome out;
  for (Index lin = 0; lin < a.size(); ++lin) {
    if (std::abs(std::abs(a.coeffs()(lin)) - std::abs(b.coeffs()(lin))) > tol_match) {
      out.failure = PhaseFailure::Modulus;
      out.offending_index = a.multi_index(lin);
      return out;
    }
  }
  PhaseSystem sys = build_phase_system(a, b, tol_match, links);
  const Index equations = sys.equation_count();
  const PhaseSolveResult solved = solve_phase_system(std::move(sys));
  if (!solved.consistent) {
    out.failure = PhaseFailure::Inconsistent;
    return out;
  }

  PhaseMatch match;
  match.free_variables = solved.free_variables;
  match.equations = equations;
  // Re-derive the variable layout (same rule as build_phase_system).
  Index next = 0;
  for (Index m = 0; m < a.order(); ++m) {
    std::vector<double> mode(static_cast<std::size_t>(a.dim(m)));
    if (links) {
      const DirectGroup& g = (*links)[static_cast<std::size_t>(m)];
      std::vector<Index> class_var(static_cast<std::size_t>(g.class_count()), -1);
      for (Index j = 0; j < a.dim(m); ++j) {
        auto& v = class_var[static_cast<std::size_t>(g.class_of(j))];
        if (v < 0) v = next++;
        mode[static_cast<std::size_t>(j)] = solved.solution[static_cast<std::size_t>(v)];
      }
    } else {
      for (Index j = 0; j < a.dim(m); ++j) mode[static_cast<std::size_t>(j)] = solved.solution[static_cast<std::size_t>(next++)];
    }
    match.angles.push_back(std::move(mode));
  }
  out.match = std::move(match);
  return out;
}

}  // namespace luequiv
