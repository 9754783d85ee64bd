#pragma once

#include "luequiv/random.hpp"
#include "luequiv/types.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace luequiv {

// Group of block-diagonal unitaries diag(U_1, ..., U_m) with U_i in U(r_i),
// where blocks in one equality class must carry the same unitary.
class DirectGroup {
 public:
  DirectGroup() = default;

  // Every block in its own class.
  explicit DirectGroup(std::vector<Index> block_sizes) : block_sizes_(std::move(block_sizes)) {
    class_of_.resize(block_sizes_.size());
    for (std::size_t b = 0; b < class_of_.size(); ++b) class_of_[b] = static_cast<int>(b);
    validate();
  }

  // class_of[b] is any label; blocks sharing a label are linked. Labels are
  // renumbered by first appearance so equal structures compare equal.
  DirectGroup(std::vector<Index> block_sizes, std::vector<int> class_of)
      : block_sizes_(std::move(block_sizes)), class_of_(std::move(class_of)) {
    if (class_of_.size() != block_sizes_.size()) {
      throw Error(ErrorKind::InvalidArgument, "one equality label per block is required");
    }
    normalize_labels();
    validate();
  }

  // Corollary-style group: `copies` blocks of size n, all forced equal.
  static DirectGroup linked_copies(Index copies, Index n) {
    return DirectGroup(std::vector<Index>(static_cast<std::size_t>(copies), n),
                       std::vector<int>(static_cast<std::size_t>(copies), 0));
  }

  static DirectGroup full(Index n) { return DirectGroup(std::vector<Index>{n}); }

  Index ambient_size() const {
    Index n = 0;
    for (Index r : block_sizes_) n += r;
    return n;
  }

  Index block_count() const noexcept { return static_cast<Index>(block_sizes_.size()); }
  const std::vector<Index>& block_sizes() const noexcept { return block_sizes_; }
  const std::vector<int>& class_labels() const noexcept { return class_of_; }
  Index block_size(Index b) const { return block_sizes_.at(static_cast<std::size_t>(b)); }
  int class_of(Index b) const { return class_of_.at(static_cast<std::size_t>(b)); }

  Index block_offset(Index b) const {
    Index off = 0;
    for (Index i = 0; i < b; ++i) off += block_sizes_[static_cast<std::size_t>(i)];
    return off;
  }

  Index class_count() const {
    return class_of_.empty() ? 0 : *std::max_element(class_of_.begin(), class_of_.end()) + 1;
  }

  std::vector<std::vector<Index>> equality_classes() const {
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(class_count()));
    for (std::size_t b = 0; b < class_of_.size(); ++b) out[static_cast<std::size_t>(class_of_[b])].push_back(static_cast<Index>(b));
    return out;
  }

  Index max_block_size() const {
    return block_sizes_.empty() ? 0 : *std::max_element(block_sizes_.begin(), block_sizes_.end());
  }

  // Only phases remain (possibly linked).
  bool is_phase_group() const { return max_block_size() <= 1; }

  // Number of independent real parameters (sum of r^2 over classes).
  Index dimension() const {
    Index dim = 0;
    for (const auto& cls : equality_classes()) dim += block_size(cls.front()) * block_size(cls.front());
    return dim;
  }

  // True if every block of *this lies inside one block of `coarser` and blocks
  // linked in `coarser` stay linked consistently, i.e. *this is a subgroup
  // descriptor obtained by subdivision and extra links.
  bool refines(const DirectGroup& coarser) const {
    if (ambient_size() != coarser.ambient_size()) return false;
    std::vector<Index> parent;
    Index pos = 0;
    for (Index r : block_sizes_) {
      Index cb = 0;
      while (cb < coarser.block_count() && coarser.block_offset(cb) + coarser.block_size(cb) <= pos) ++cb;
      if (cb == coarser.block_count() || pos + r > coarser.block_offset(cb) + coarser.block_size(cb)) return false;
      parent.push_back(cb);
      pos += r;
    }
    // Links of the coarser group must survive: linked parents are split the
    // same way and corresponding pieces stay linked.
    for (Index a = 0; a < block_count(); ++a) {
      const Index pa = parent[static_cast<std::size_t>(a)];
      const Index rel = block_offset(a) - coarser.block_offset(pa);
      for (Index pb = 0; pb < coarser.block_count(); ++pb) {
        if (pb == pa || coarser.class_of(pb) != coarser.class_of(pa)) continue;
        bool matched = false;
        for (Index b = 0; b < block_count(); ++b) {
          if (parent[static_cast<std::size_t>(b)] != pb) continue;
          if (block_offset(b) - coarser.block_offset(pb) != rel) continue;
          matched = block_size(b) == block_size(a) && class_of(b) == class_of(a);
        }
        if (!matched) return false;
      }
    }
    return true;
  }

  friend bool operator==(const DirectGroup&, const DirectGroup&) = default;

  std::string describe() const {
    std::string out = "blocks [";
    for (std::size_t b = 0; b < block_sizes_.size(); ++b) {
      if (b) out += ",";
      out += std::to_string(block_sizes_[b]);
    }
    out += "] classes {";
    const auto classes = equality_classes();
    for (std::size_t c = 0; c < classes.size(); ++c) {
      if (c) out += ",";
      out += "{";
      for (std::size_t i = 0; i < classes[c].size(); ++i) {
        if (i) out += ",";
        out += std::to_string(classes[c][i] + 1);
      }
      out += "}";
    }
    return out + "}";
  }

 private:
  void normalize_labels() {
    std::map<int, int> relabel;
    for (int& label : class_of_) {
      auto [it, inserted] = relabel.try_emplace(label, static_cast<int>(relabel.size()));
      label = it->second;
    }
  }

  void validate() const {
    for (Index r : block_sizes_) {
      if (r < 1) throw Error(ErrorKind::InvalidArgument, "direct group blocks must be non-empty");
    }
    for (std::size_t a = 0; a < block_sizes_.size(); ++a) {
      for (std::size_t b = a + 1; b < block_sizes_.size(); ++b) {
        if (class_of_[a] == class_of_[b] && block_sizes_[a] != block_sizes_[b]) {
          throw Error(ErrorKind::InvalidArgument, "linked blocks must have equal sizes");
        }
      }
    }
  }

  std::vector<Index> block_sizes_;
  std::vector<int> class_of_;
};

// One Haar unitary per equality class, replicated over the class members.
template <typename Scalar>
Matrix<Scalar> sample_group_element(const DirectGroup& group, Rng& rng) {
  const Index n = group.ambient_size();
  Matrix<Scalar> w = Matrix<Scalar>::Zero(n, n);
  std::vector<Matrix<Scalar>> per_class;
  for (const auto& cls : group.equality_classes()) per_class.push_back(haar_unitary<Scalar>(group.block_size(cls.front()), rng));
  Index off = 0;
  for (Index b = 0; b < group.block_count(); ++b) {
    const Index r = group.block_size(b);
    w.block(off, off, r, r) = per_class[static_cast<std::size_t>(group.class_of(b))];
    off += r;
  }
  return w;
}

template <typename Scalar>
Matrix<Scalar> sample_group_element(const DirectGroup& group, std::uint64_t seed) {
  Rng rng(seed);
  return sample_group_element<Scalar>(group, rng);
}

// Largest violation of membership: entries outside the blocks, unequal
// blocks within a class, and the unitarity defect.
template <typename Scalar>
double membership_defect(const DirectGroup& group, const Matrix<Scalar>& u) {
  const Index n = group.ambient_size();
  if (u.rows() != n || u.cols() != n) return std::numeric_limits<double>::infinity();
  Matrix<Scalar> masked = u;
  std::vector<Index> first_of_class(static_cast<std::size_t>(group.class_count()), -1);
  double defect = static_cast<double>(unitarity_defect(u));
  for (Index b = 0; b < group.block_count(); ++b) {
    const Index off = group.block_offset(b), r = group.block_size(b);
    masked.block(off, off, r, r).setZero();
    auto& first = first_of_class[static_cast<std::size_t>(group.class_of(b))];
    if (first < 0) {
      first = b;
    } else {
      const Index f = group.block_offset(first);
      defect = std::max(defect, static_cast<double>((u.block(off, off, r, r) - u.block(f, f, r, r)).cwiseAbs().maxCoeff()));
    }
  }
  if (masked.size()) defect = std::max(defect, static_cast<double>(masked.cwiseAbs().maxCoeff()));
  return defect;
}

}  // namespace luequiv
