#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's unfolding, HOSVD or canonicalization code.

#include "luequiv/io.hpp"
#include "luequiv/random.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace testing_support {

using luequiv::Complex;
using luequiv::Index;
using luequiv::MatrixXc;
using luequiv::PureState;

inline std::string data_path(const std::string& name) { return std::string(LUEQUIV_DATA_DIR) + "/" + name; }

inline PureState<Complex> load(const std::string& name) { return luequiv::read_state_file(data_path(name)); }

// Diagonal entries as exact fractions {numerator, denominator}.
using Fractions = std::vector<std::array<int, 2>>;

inline MatrixXc diag_of(const Fractions& f) {
  MatrixXc m = MatrixXc::Zero(static_cast<Index>(f.size()), static_cast<Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = double(f[i][0]) / double(f[i][1]);
  return m;
}

// Example 1 (2x3x3), worked by hand from the six kets.
inline const std::vector<Fractions> kExample1Grams = {
    {{1, 2}, {1, 2}},
    {{7, 24}, {7, 24}, {5, 12}},
    {{5, 24}, {5, 24}, {7, 12}},
};

// Stack blocks keyed by (m, i, k), all 1-based as printed.
using StackTable = std::map<std::array<int, 3>, Fractions>;

inline const StackTable kExample1Stacks = {
    {{1, 2, 1}, {{5, 12}, {1, 6}}},
    {{1, 2, 2}, {{1, 12}, {1, 3}}},
    {{1, 3, 1}, {{1, 4}, {1, 6}}},
    {{1, 3, 2}, {{1, 4}, {1, 3}}},
    {{2, 1, 1}, {{7, 24}, {7, 24}, {5, 12}}},
    {{2, 3, 1}, {{7, 24}, {1, 24}, {1, 12}}},
    {{2, 3, 2}, {{0, 1}, {1, 4}, {1, 3}}},
    {{3, 1, 1}, {{5, 24}, {5, 24}, {7, 12}}},
    {{3, 2, 1}, {{5, 24}, {1, 8}, {1, 4}}},
    {{3, 2, 2}, {{0, 1}, {1, 12}, {1, 3}}},
};

inline const std::vector<Fractions> kExample2Grams = {
    {{11, 30}, {11, 30}, {4, 15}},
    {{2, 5}, {3, 10}, {3, 10}},
    {{1, 3}, {1, 3}, {1, 3}},
};

inline const StackTable kExample2Stacks = {
    {{1, 3, 1}, {{11, 30}, {11, 30}, {4, 15}}},
    {{1, 2, 1}, {{2, 15}, {1, 5}, {1, 15}}},
    {{1, 2, 2}, {{7, 30}, {1, 6}, {1, 5}}},
    {{2, 3, 1}, {{2, 5}, {3, 10}, {3, 10}}},
    {{2, 1, 2}, {{1, 15}, {1, 15}, {2, 15}}},
    {{2, 1, 1}, {{1, 3}, {7, 30}, {1, 6}}},
    {{3, 1, 1}, {{4, 15}, {4, 15}, {1, 5}}},
    {{3, 1, 2}, {{1, 15}, {1, 15}, {2, 15}}},
    {{3, 2, 1}, {{1, 15}, {1, 5}, {2, 15}}},
    {{3, 2, 2}, {{4, 15}, {2, 15}, {1, 5}}},
};

inline double max_abs(const MatrixXc& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Odometer over all multi-indices, last mode fastest.
inline std::vector<std::vector<Index>> all_indices(const std::vector<Index>& dims) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> j(dims.size(), 0);
  while (true) {
    out.push_back(j);
    std::size_t d = dims.size();
    while (d-- > 0) {
      if (++j[d] < dims[d]) break;
      j[d] = 0;
    }
    if (d == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

inline Complex coeff(const PureState<Complex>& s, const std::vector<Index>& j) {
  Index lin = 0;
  for (std::size_t d = 0; d < j.size(); ++d) lin = lin * s.dims()[d] + j[d];
  return s.coeffs()(lin);
}

// Direct sum over index tuples: M(a,b) = sum psi[..a..] conj(psi[..b..]) with
// the mode-i index restricted to [lo, hi).
inline MatrixXc naive_stack_block(const PureState<Complex>& s, Index m, Index i, Index lo, Index hi) {
  const Index n = s.dims()[static_cast<std::size_t>(m)];
  MatrixXc out = MatrixXc::Zero(n, n);
  for (const auto& j : all_indices(s.dims())) {
    const Index ji = j[static_cast<std::size_t>(i)];
    if (ji < lo || ji >= hi) continue;
    for (Index b = 0; b < n; ++b) {
      auto jb = j;
      jb[static_cast<std::size_t>(m)] = b;
      out(j[static_cast<std::size_t>(m)], b) += coeff(s, j) * std::conj(coeff(s, jb));
    }
  }
  return out;
}

inline MatrixXc naive_gram(const PureState<Complex>& s, Index m) {
  return naive_stack_block(s, m, m == 0 ? 1 : 0, 0, s.dims()[m == 0 ? 1 : 0]);
}

// Applies a matrix to one mode by explicit index loops.
inline PureState<Complex> naive_apply(const PureState<Complex>& s, Index m, const MatrixXc& u) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.size());
  const auto idx = all_indices(s.dims());
  for (std::size_t lin = 0; lin < idx.size(); ++lin) {
    for (Index a = 0; a < u.rows(); ++a) {
      auto j = idx[lin];
      const Index src = j[static_cast<std::size_t>(m)];
      j[static_cast<std::size_t>(m)] = a;
      Index dst = 0;
      for (std::size_t d = 0; d < j.size(); ++d) dst = dst * s.dims()[d] + j[d];
      out(dst) += u(a, src) * s.coeffs()(static_cast<Index>(lin));
    }
  }
  return PureState<Complex>::unnormalized(s.dims(), out);
}

inline PureState<Complex> naive_apply_all(PureState<Complex> s, const std::vector<MatrixXc>& us) {
  for (std::size_t m = 0; m < us.size(); ++m) s = naive_apply(s, static_cast<Index>(m), us[m]);
  return s;
}

// min over global phase of ||a - e^{i t} b||. The difference is formed
// explicitly; sqrt(2 - 2|<b,a>|) cannot resolve residuals below ~1e-8.
inline double phase_free_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const Complex ov = b.dot(a);
  const Complex phase = std::abs(ov) > 0 ? ov / std::abs(ov) : Complex(1, 0);
  return (a - phase * b).norm();
}

// Random-restart alternating maximization of |<phi| (x) U_m |psi>|. With the
// other factors fixed the overlap is tr(U_m C), maximized by the polar factor
// of C^dagger. Returns the smallest residual min_t ||(x) U psi - e^{it} phi||.
inline double brute_force_lu_residual(const PureState<Complex>& psi, const PureState<Complex>& phi, int restarts, std::uint64_t seed,
                                      int sweeps = 200) {
  luequiv::Rng rng(seed);
  const Index order = psi.order();
  const auto idx = all_indices(psi.dims());
  double best = 2.0;
  for (int r = 0; r < restarts; ++r) {
    auto us = luequiv::haar_local_unitaries<Complex>(psi.dims(), rng);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      for (Index m = 0; m < order; ++m) {
        auto others = us;
        others[static_cast<std::size_t>(m)] = MatrixXc::Identity(psi.dim(m), psi.dim(m));
        const auto chi = naive_apply_all(psi, others);
        const Index n = psi.dim(m);
        MatrixXc c = MatrixXc::Zero(n, n);  // c(a, b) = sum_rest chi[a, rest] conj(phi[b, rest])
        for (const auto& j : idx) {
          for (Index b = 0; b < n; ++b) {
            auto jb = j;
            jb[static_cast<std::size_t>(m)] = b;
            c(j[static_cast<std::size_t>(m)], b) += coeff(chi, j) * std::conj(coeff(phi, jb));
          }
        }
        Eigen::JacobiSVD<MatrixXc> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
        us[static_cast<std::size_t>(m)] = svd.matrixV() * svd.matrixU().adjoint();
      }
    }
    best = std::min(best, phase_free_distance(naive_apply_all(psi, us).coeffs(), phi.coeffs()));
  }
  return best;
}

// Dense grid over the free angles of diagonal local phases on a 2x2x2 state,
// followed by coordinate polishing. Gauge: the first angle of every mode is
// fixed to 0 (absorbed into the global phase), leaving three free angles.
inline double grid_phase_residual(const PureState<Complex>& a, const PureState<Complex>& b, int steps = 72) {
  auto residual = [&](const std::array<double, 3>& t) {
    std::vector<MatrixXc> d;
    for (int m = 0; m < 3; ++m) {
      MatrixXc u = MatrixXc::Identity(2, 2);
      u(1, 1) = std::polar(1.0, t[static_cast<std::size_t>(m)]);
      d.push_back(u);
    }
    return phase_free_distance(naive_apply_all(a, d).coeffs(), b.coeffs());
  };
  const double h = 2 * std::numbers::pi / steps;
  std::array<double, 3> best_t{};
  double best = 1e9;
  for (int x = 0; x < steps; ++x)
    for (int y = 0; y < steps; ++y)
      for (int z = 0; z < steps; ++z) {
        const std::array<double, 3> t{x * h, y * h, z * h};
        const double r = residual(t);
        if (r < best) {
          best = r;
          best_t = t;
        }
      }
  for (double step = h; step > 1e-10; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t c = 0; c < 3; ++c)
        for (double s : {step, -step}) {
          auto t = best_t;
          t[c] += s;
          const double r = residual(t);
          if (r < best) {
            best = r;
            best_t = t;
            moved = true;
          }
        }
    }
  }
  return best;
}

}  // namespace testing_support
