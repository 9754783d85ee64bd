#pragma once

#include "luequiv/cluster.hpp"
#include "luequiv/direct_group.hpp"
#include "luequiv/hosvd.hpp"

#include <string>
#include <utility>
#include <vector>

namespace luequiv {

// Ordered family of n x n Hermitian matrices; the order is part of the data.
template <typename Scalar>
using HermitianFamily = std::vector<Matrix<Scalar>>;

template <typename Scalar>
struct CanonicalReduction {
  HermitianFamily<Scalar> canonical;
  // U with U A_i U^dagger = canonical_i; an element of the input group.
  Matrix<Scalar> transform;
  // Stabilizer of the canonical family inside the input group.
  DirectGroup residual;
  std::vector<std::string> warnings;
  Index passes = 0;
};

namespace detail {

// Refinement cascade for simultaneous conjugation of a Hermitian family by one
// element of a direct group.
//
// The working group is a list of contiguous blocks, each tagged with an
// equality class; members of a class share a unitary with identical basis
// correspondence. Every step picks the first sub-block (matrix, row block,
// column block) that is not yet in canonical shape and conjugates by a group
// element bringing it there:
//  - diagonal sub-block or a within-class coupling: eigenbasis of a Hermitian
//    matrix, eigenvalues descending, the class splits by eigenvalue clusters;
//  - coupling between two classes: SVD, both classes split by singular value
//    clusters and the pieces sharing a nonzero singular value are linked.
// Each step either splits blocks or merges classes, so the cascade reaches a
// fixed point where every sub-block is a scalar multiple of the identity within
// a class and zero across classes; there the working group stabilizes the
// family.
template <typename Scalar>
class Canonicalizer {
 public:
  using Mat = Matrix<Scalar>;
  using Real = RealOf<Scalar>;

  Canonicalizer(HermitianFamily<Scalar> family, const DirectGroup& group, double tol_cluster)
      : fam_(std::move(family)), n_(group.ambient_size()) {
    static_assert(Eigen::NumTraits<Scalar>::IsComplex, "canonicalization needs a complex scalar type");
    double scale = 1.0;
    for (const auto& a : fam_) {
      if (a.rows() != n_ || a.cols() != n_) {
        throw Error(ErrorKind::DimensionMismatch, "family matrix size does not match the group");
      }
      if (a.size()) scale = std::max(scale, static_cast<double>(a.cwiseAbs().maxCoeff()));
    }
    abs_tol_ = tol_cluster * scale;
    for (const auto& a : fam_) {
      if (a.size() && static_cast<double>((a - a.adjoint()).cwiseAbs().maxCoeff()) > 1e-10 * scale) {
        throw Error(ErrorKind::InvalidArgument, "family matrices must be Hermitian");
      }
    }
    for (auto& a : fam_) a = (a + a.adjoint()) / Real(2);
    u_ = Mat::Identity(n_, n_);
    Index off = 0;
    for (Index b = 0; b < group.block_count(); ++b) {
      blocks_.push_back({off, group.block_size(b), group.class_of(b)});
      off += group.block_size(b);
    }
    next_class_ = static_cast<int>(group.class_count());
  }

  CanonicalReduction<Scalar> run() {
    const Index cap = 4 * std::max<Index>(n_, 1) + 1;
    Index passes = 0;
    while (step()) {
      if (++passes > cap) {
        throw Error(ErrorKind::Numeric, "canonicalization did not reach a fixed point within " + std::to_string(cap) + " passes");
      }
    }
    CanonicalReduction<Scalar> out;
    out.canonical = std::move(fam_);
    out.transform = std::move(u_);
    std::vector<Index> sizes;
    std::vector<int> labels;
    for (const auto& b : blocks_) {
      sizes.push_back(b.size);
      labels.push_back(b.cls);
    }
    out.residual = DirectGroup(sizes, labels);
    out.passes = passes + 1;
    if (near_misses_ > 0) {
      out.warnings.push_back(std::to_string(near_misses_) +
                             " eigenvalue/singular-value gap(s) within 100x tol_cluster; cluster structure may be unstable");
    }
    return out;
  }

 private:
  struct Block {
    Index offset;
    Index size;
    int cls;
  };

  std::vector<Index> members(int cls) const {
    std::vector<Index> out;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (blocks_[b].cls == cls) out.push_back(static_cast<Index>(b));
    return out;
  }

  // Conjugates the family by the group element acting as `p` on every member
  // of each listed class and as the identity elsewhere.
  void apply(const std::vector<std::pair<int, Mat>>& per_class) {
    Mat t = Mat::Identity(n_, n_);
    for (const auto& [cls, p] : per_class) {
      for (Index b : members(cls)) {
        const auto& blk = blocks_[static_cast<std::size_t>(b)];
        t.block(blk.offset, blk.offset, blk.size, blk.size) = p;
      }
    }
    for (auto& a : fam_) {
      Mat c = t * a * t.adjoint();
      a = (c + c.adjoint()) / Real(2);
    }
    u_ = t * u_;
  }

  // Splits every member of `cls` into consecutive pieces; piece k joins class
  // ids[k].
  void split(int cls, const std::vector<Index>& parts, const std::vector<int>& ids) {
    std::vector<Block> next;
    for (const auto& blk : blocks_) {
      if (blk.cls != cls) {
        next.push_back(blk);
        continue;
      }
      Index off = blk.offset;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        next.push_back({off, parts[k], ids[k]});
        off += parts[k];
      }
    }
    blocks_ = std::move(next);
  }

  bool is_sorted_diagonal(const Mat& h) const {
    for (Index i = 0; i < h.rows(); ++i) {
      for (Index j = 0; j < h.cols(); ++j) {
        if (i != j && std::abs(h(i, j)) > abs_tol_) return false;
      }
      if (std::abs(std::imag(h(i, i))) > abs_tol_) return false;
      if (i > 0 && std::real(h(i, i)) > std::real(h(i - 1, i - 1)) + abs_tol_) return false;
    }
    return true;
  }

  bool refine_by_hermitian(int cls, const Mat& h) {
    const Index r = h.rows();
    if (r <= 1) return false;
    std::vector<double> vals(static_cast<std::size_t>(r));
    Mat p;
    if (is_sorted_diagonal(h)) {
      for (Index i = 0; i < r; ++i) vals[static_cast<std::size_t>(i)] = static_cast<double>(std::real(h(i, i)));
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> eig(h);
      if (eig.info() != Eigen::Success) throw Error(ErrorKind::Numeric, "eigensolver failed during canonicalization");
      Mat vecs = eig.eigenvectors().rowwise().reverse();
      for (Index i = 0; i < r; ++i) vals[static_cast<std::size_t>(i)] = static_cast<double>(eig.eigenvalues()(r - 1 - i));
      for (Index j = 0; j < r; ++j) {
        auto col = vecs.col(j);
        normalize_column_phase(col);
      }
      p = vecs.adjoint();
    }
    const auto clusters = cluster_runs(vals, abs_tol_, &near_misses_);
    if (clusters.size() == 1) return false;
    if (p.size()) apply({{cls, p}});
    std::vector<Index> parts;
    std::vector<int> ids;
    for (const auto& c : clusters) {
      parts.push_back(c.size);
      ids.push_back(next_class_++);
    }
    split(cls, parts, ids);
    return true;
  }

  bool is_sorted_rectangular_diagonal(const Mat& x) const {
    for (Index i = 0; i < x.rows(); ++i) {
      for (Index j = 0; j < x.cols(); ++j) {
        if (i != j && std::abs(x(i, j)) > abs_tol_) return false;
      }
    }
    const Index k = std::min(x.rows(), x.cols());
    for (Index i = 0; i < k; ++i) {
      if (std::abs(std::imag(x(i, i))) > abs_tol_ || std::real(x(i, i)) < -abs_tol_) return false;
      if (i > 0 && std::real(x(i, i)) > std::real(x(i - 1, i - 1)) + abs_tol_) return false;
    }
    return true;
  }

  bool refine_by_coupling(int row_cls, int col_cls, const Mat& x) {
    const Index ra = x.rows(), rb = x.cols(), k = std::min(ra, rb);
    std::vector<double> sigma(static_cast<std::size_t>(k));
    Mat p, q;
    if (is_sorted_rectangular_diagonal(x)) {
      for (Index i = 0; i < k; ++i) sigma[static_cast<std::size_t>(i)] = static_cast<double>(std::real(x(i, i)));
    } else {
      Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Mat left = svd.matrixU(), right = svd.matrixV();
      for (Index i = 0; i < k; ++i) {
        sigma[static_cast<std::size_t>(i)] = static_cast<double>(svd.singularValues()(i));
        // Same phase on the right vector keeps L S R^dagger unchanged.
        const Scalar phase = column_phase_factor(left.col(i));
        left.col(i) *= phase;
        right.col(i) *= phase;
      }
      p = left.adjoint();
      q = right.adjoint();
    }
    Index rank = 0;
    while (rank < k && sigma[static_cast<std::size_t>(rank)] > abs_tol_) ++rank;
    if (rank == 0) return false;

    const auto clusters = cluster_runs(std::span<const double>(sigma.data(), static_cast<std::size_t>(rank)), abs_tol_, &near_misses_);
    if (p.size()) apply({{row_cls, p}, {col_cls, q}});

    std::vector<Index> row_parts, col_parts;
    std::vector<int> row_ids, col_ids;
    for (const auto& c : clusters) {
      const int id = next_class_++;
      row_parts.push_back(c.size);
      col_parts.push_back(c.size);
      row_ids.push_back(id);
      col_ids.push_back(id);
    }
    if (ra > rank) {
      row_parts.push_back(ra - rank);
      row_ids.push_back(next_class_++);
    }
    if (rb > rank) {
      col_parts.push_back(rb - rank);
      col_ids.push_back(next_class_++);
    }
    split(row_cls, row_parts, row_ids);
    split(col_cls, col_parts, col_ids);
    return true;
  }

  bool step() {
    const Scalar half_i = Scalar(0, Real(0.5));
    for (const auto& a : fam_) {
      for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        for (std::size_t bj = bi; bj < blocks_.size(); ++bj) {
          const Block row = blocks_[bi], col = blocks_[bj];
          const Mat x = a.block(row.offset, col.offset, row.size, col.size);
          if (bi == bj) {
            if (refine_by_hermitian(row.cls, x)) return true;
          } else if (row.cls == col.cls) {
            const Mat re = (x + x.adjoint()) / Real(2);
            if (refine_by_hermitian(row.cls, re)) return true;
            const Mat im = -half_i * (x - x.adjoint());
            if (refine_by_hermitian(row.cls, im)) return true;
          } else {
            if (refine_by_coupling(row.cls, col.cls, x)) return true;
          }
        }
      }
    }
    return false;
  }

  HermitianFamily<Scalar> fam_;
  Index n_;
  Mat u_;
  std::vector<Block> blocks_;
  int next_class_ = 0;
  double abs_tol_ = 0;
  Index near_misses_ = 0;
};

}  // namespace detail

template <typename Scalar>
CanonicalReduction<Scalar> canonicalize(HermitianFamily<Scalar> family, const DirectGroup& group, double tol_cluster = 1e-9) {
  return detail::Canonicalizer<Scalar>(std::move(family), group, tol_cluster).run();
}

// Same canonical family (entrywise within tol_match) and structurally equal
// residual groups.
template <typename Scalar>
bool same_canonical(const CanonicalReduction<Scalar>& a, const CanonicalReduction<Scalar>& b, double tol_match = 1e-8) {
  if (a.canonical.size() != b.canonical.size()) {
    throw Error(ErrorKind::DimensionMismatch, "families of different lengths");
  }
  if (a.transform.rows() != b.transform.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "families of different matrix sizes");
  }
  if (!(a.residual == b.residual)) return false;
  for (std::size_t i = 0; i < a.canonical.size(); ++i) {
    if (a.canonical[i].size() == 0) continue;
    if (static_cast<double>((a.canonical[i] - b.canonical[i]).cwiseAbs().maxCoeff()) >= tol_match) return false;
  }
  return true;
}

// Largest deviation ||W C_i W^dagger - C_i||_max over the family.
template <typename Scalar>
double stabilizer_defect(const HermitianFamily<Scalar>& family, const Matrix<Scalar>& w) {
  double worst = 0;
  for (const auto& c : family) {
    if (c.size() == 0) continue;
    worst = std::max(worst, static_cast<double>((w * c * w.adjoint() - c).cwiseAbs().maxCoeff()));
  }
  return worst;
}

}  // namespace luequiv
