#pragma once

#include "luequiv/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace luequiv {

struct Cluster {
  Index begin = 0;  // first position in the input sequence
  Index size = 0;
  double value = 0;  // mean of the members
};

// Maximal runs of consecutive values whose neighbouring gaps are <= abs_tol.
// `near_misses` counts gaps that split a run but sit within 100x the
// tolerance; those are the places where clustering is fragile.
inline std::vector<Cluster> cluster_runs(std::span<const double> values, double abs_tol, Index* near_misses = nullptr) {
  std::vector<Cluster> out;
  for (Index i = 0; i < static_cast<Index>(values.size()); ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    if (!out.empty()) {
      const double gap = std::abs(v - values[static_cast<std::size_t>(i - 1)]);
      if (gap <= abs_tol) {
        auto& c = out.back();
        c.value = (c.value * static_cast<double>(c.size) + v) / static_cast<double>(c.size + 1);
        ++c.size;
        continue;
      }
      if (near_misses && gap <= 100 * abs_tol) ++*near_misses;
    }
    out.push_back({i, 1, v});
  }
  return out;
}

}  // namespace luequiv
