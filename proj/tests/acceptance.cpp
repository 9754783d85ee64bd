// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "support.hpp"

#include "luequiv/decide.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace luequiv;
namespace ts = testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

bool is_phase_group_of(const DirectGroup& g, Index n) { return g.is_phase_group() && g.ambient_size() == n; }

HosvdOptions descending() {
  HosvdOptions o;
  o.order = HosvdOrder::Descending;
  return o;
}

const std::vector<std::vector<Index>> kScrambleDims = {{2, 2, 2}, {2, 3, 3}, {3, 3, 3}, {2, 2, 2, 2}};

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto psi = ts::load("example1.state");
  const auto h = to_hosvd(psi);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0;
  for (Index m = 0; m < 3; ++m) worst = std::max(worst, ts::max_abs(h.grams[m] - ts::diag_of(ts::kExample1Grams[m])));
  o.require(worst < 1e-12, "Gram error " + fmt(worst));
  o.require(h.symmetry[0].block_sizes() == std::vector<Index>{2}, "S(1) blocks");
  o.require(h.symmetry[1].block_sizes() == std::vector<Index>{2, 1}, "S(2) blocks");
  o.require(h.symmetry[2].block_sizes() == std::vector<Index>{2, 1}, "S(3) blocks");
  o.require(h.already_hosvd, "not reported as already HOSVD");
  o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = "max Gram error " + fmt(worst) + ", S blocks [2] [2,1] [2,1], " + fmt(secs) + " s";
  return o;
}

double stack_error(const HosvdResult<Complex>& h, const ts::StackTable& table, Outcome& o) {
  double worst = 0;
  std::size_t seen = 0;
  for (Index m = 0; m < h.order(); ++m) {
    const auto stack = build_mode_stack(h, m);
    for (std::size_t b = 0; b < stack.blocks.size(); ++b) {
      const auto [i, k] = stack.labels[b];
      const auto it = table.find({int(m + 1), int(i + 1), int(k + 1)});
      if (it == table.end()) {
        o.require(false, "unexpected block label");
        continue;
      }
      worst = std::max(worst, ts::max_abs(stack.blocks[b] - ts::diag_of(it->second)));
      ++seen;
    }
  }
  o.require(seen == table.size(), "block count " + std::to_string(seen) + " vs " + std::to_string(table.size()));
  return worst;
}

Outcome criterion2() {
  Outcome o;
  const auto h = to_hosvd(ts::load("example1.state"));
  const double worst = stack_error(h, ts::kExample1Stacks, o);
  o.require(worst < 1e-12, "stack error " + fmt(worst));
  const auto r = reduce_state(h);
  for (Index m = 0; m < 3; ++m) {
    o.require(r.transforms[m] == MatrixXc::Identity(h.state.dim(m), h.state.dim(m)), "non-identity transform");
  }
  o.require(is_phase_group_of(r.residual[0], 2) && is_phase_group_of(r.residual[1], 3) && is_phase_group_of(r.residual[2], 3),
            "residual groups are not phase groups of sizes (2,3,3)");
  o.require(r.residual_parameter_count() == 8, "residual angles " + std::to_string(r.residual_parameter_count()));
  if (o.pass) o.detail = "max stack error " + fmt(worst) + ", identity transforms, residual (2,3,3) = 8 angles";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto h = to_hosvd(ts::load("example2.state"));
  double gram = 0;
  for (Index m = 0; m < 3; ++m) gram = std::max(gram, ts::max_abs(h.grams[m] - ts::diag_of(ts::kExample2Grams[m])));
  o.require(gram < 1e-12, "Gram error " + fmt(gram));
  const double worst = stack_error(h, ts::kExample2Stacks, o);
  o.require(worst < 1e-12, "stack error " + fmt(worst));
  const auto r = reduce_state(h);
  o.require(r.residual_is_phases(), "residual not diagonal");
  o.require(r.residual_parameter_count() == 9, "residual angles " + std::to_string(r.residual_parameter_count()));
  if (o.pass) o.detail = "max Gram error " + fmt(gram) + ", max stack error " + fmt(worst) + ", residual 9 phases";
  return o;
}

// sum_j |j>|pi(j)>|chi_j> / sqrt(d): flat spectra on the first two modes, so
// their symmetry groups are large.
PureState<Complex> degenerate_state(const std::vector<Index>& dims, Rng& rng) {
  const Index d = std::min(dims[0], dims[1]);
  VectorXc c = VectorXc::Zero(dims[0] * dims[1] * dims[2]);
  const MatrixXc chi = haar_unitary<Complex>(dims[2], rng);
  const Index shift = rng.below(d);
  for (Index j = 0; j < d; ++j) {
    const Index p = (j + shift) % d;
    for (Index x = 0; x < dims[2]; ++x) c((j * dims[1] + p) * dims[2] + x) = chi(x, j % dims[2]) / std::sqrt(double(d));
  }
  return PureState<Complex>(dims, c);
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(404);
  double worst = 0;
  Index nontrivial = 0;
  for (int t = 0; t < 100; ++t) {
    const std::vector<Index> dims = {2 + rng.below(2), 2 + rng.below(2), 2 + rng.below(2)};
    const auto psi = t % 2 ? random_state<Complex>(dims, rng) : degenerate_state(dims, rng);
    const auto h = to_hosvd(psi, descending());
    std::vector<MatrixXc> w;
    for (const auto& g : h.symmetry) {
      w.push_back(sample_group_element<Complex>(g, rng));
      if (!g.is_phase_group()) ++nontrivial;
    }
    HosvdResult<Complex> moved = h;
    moved.state = ts::naive_apply_all(h.state, w);
    for (Index m = 0; m < 3; ++m) {
      const auto a = build_mode_stack(h, m);
      const auto b = build_mode_stack(moved, m);
      for (std::size_t x = 0; x < a.blocks.size(); ++x) worst = std::max(worst, ts::max_abs(w[m] * a.blocks[x] * w[m].adjoint() - b.blocks[x]));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(worst < 1e-9, "max deviation " + fmt(worst));
  o.require(secs < 30, "runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = "max deviation " + fmt(worst) + " over 100 trials (" + std::to_string(nontrivial) + " non-abelian groups), " + fmt(secs) + " s";
  return o;
}

DirectGroup random_group(Index n, Rng& rng) {
  std::vector<Index> sizes;
  for (Index left = n; left > 0;) {
    const Index r = 1 + rng.below(left);
    sizes.push_back(r);
    left -= r;
  }
  std::vector<int> labels(sizes.size());
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    labels[b] = static_cast<int>(b);
    for (std::size_t c = 0; c < b; ++c)
      if (sizes[c] == sizes[b] && rng.below(2) == 0) {
        labels[b] = labels[c];
        break;
      }
  }
  return DirectGroup(sizes, labels);
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(505);
  double agree = 0, stab = 0;
  Index nontrivial = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + rng.below(6);
    const DirectGroup g = random_group(n, rng);
    const Index count = 1 + rng.below(4);
    HermitianFamily<Complex> fam;
    for (Index i = 0; i < count; ++i) {
      if (t % 3 == 0) {
        // low-rank members with repeated eigenvalues keep part of the group
        const MatrixXc v = haar_unitary<Complex>(n, rng);
        Eigen::VectorXd d(n);
        for (Index j = 0; j < n; ++j) d(j) = static_cast<double>(rng.below(2));
        fam.push_back(i == 0 ? MatrixXc(v * d.cast<Complex>().asDiagonal() * v.adjoint()) : MatrixXc(d.cast<Complex>().asDiagonal()));
      } else {
        fam.push_back(random_hermitian<Complex>(n, rng));
      }
    }
    const MatrixXc w = sample_group_element<Complex>(g, rng);
    HermitianFamily<Complex> moved;
    for (const auto& a : fam) moved.push_back(w * a * w.adjoint());

    const auto ra = canonicalize(fam, g);
    const auto rb = canonicalize(moved, g);
    o.require(ra.residual == rb.residual, "residual groups differ in trial " + std::to_string(t));
    for (std::size_t i = 0; i < fam.size(); ++i) agree = std::max(agree, ts::max_abs(ra.canonical[i] - rb.canonical[i]));
    if (!ra.residual.is_phase_group()) ++nontrivial;
    for (int s = 0; s < 3; ++s) stab = std::max(stab, stabilizer_defect(ra.canonical, sample_group_element<Complex>(ra.residual, rng)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(agree < 1e-9, "canonical disagreement " + fmt(agree));
  o.require(stab < 1e-8, "stabilizer defect " + fmt(stab));
  o.require(secs < 60, "runtime " + fmt(secs) + " s");
  if (o.pass) {
    o.detail = "agreement " + fmt(agree) + ", stabilizer defect " + fmt(stab) + " (" + std::to_string(nontrivial) + " non-abelian residuals), " + fmt(secs) + " s";
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  Rng rng(606);
  int equivalent = 0, undecided = 0, inequivalent = 0;
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const auto& dims = kScrambleDims[static_cast<std::size_t>(t) % kScrambleDims.size()];
    const auto psi = random_state<Complex>(dims, rng);
    const auto phi = apply_local_unitaries(psi, haar_local_unitaries<Complex>(dims, rng));
    const auto v = compare(psi, phi);
    if (v.kind == VerdictKind::Inequivalent) ++inequivalent;
    if (v.kind == VerdictKind::Undecided) ++undecided;
    if (v.kind == VerdictKind::Equivalent) {
      ++equivalent;
      if (!v.witness) {
        o.require(false, "Equivalent without witness");
        continue;
      }
      worst = std::max(worst, ts::phase_free_distance(ts::naive_apply_all(psi, *v.witness).coeffs(), phi.coeffs()));
    }
  }
  o.require(inequivalent == 0, std::to_string(inequivalent) + " Inequivalent verdicts");
  o.require(worst < 1e-8, "witness residual " + fmt(worst));
  o.require(undecided < 20, "Undecided rate " + std::to_string(undecided) + "%");
  if (o.pass) {
    o.detail = std::to_string(equivalent) + " Equivalent, " + std::to_string(undecided) + "% Undecided, 0 Inequivalent, max witness residual " + fmt(worst);
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  Rng rng(707);
  int inequivalent = 0;
  for (int t = 0; t < 100; ++t) {
    const auto& dims = kScrambleDims[static_cast<std::size_t>(t) % kScrambleDims.size()];
    const auto a = random_state<Complex>(dims, rng);
    const auto b = random_state<Complex>(dims, rng);
    const auto v = compare(a, b);
    if (v.kind == VerdictKind::Inequivalent && (v.failed == FailedInvariant::Spectra || v.failed == FailedInvariant::CanonicalStacks)) ++inequivalent;
  }
  o.require(inequivalent == 100, std::to_string(inequivalent) + "/100 Inequivalent by spectra or stacks");

  double closest = 2;
  for (int t = 0; t < 20; ++t) {
    const auto a = random_state<Complex>({2, 2, 2}, rng);
    const auto b = random_state<Complex>({2, 2, 2}, rng);
    if (compare(a, b).kind != VerdictKind::Inequivalent) {
      o.require(false, "2x2x2 pair not Inequivalent");
      continue;
    }
    closest = std::min(closest, ts::brute_force_lu_residual(a, b, 8, 9000 + static_cast<std::uint64_t>(t)));
  }
  o.require(closest >= 1e-3, "brute force reached " + fmt(closest));
  if (o.pass) o.detail = "100/100 Inequivalent, closest brute-force residual on 20 pairs " + fmt(closest);
  return o;
}

Outcome criterion8() {
  Outcome o;
  Rng rng(808);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const auto& dims = kScrambleDims[static_cast<std::size_t>(t) % kScrambleDims.size()];
    const auto a = random_state<Complex>(dims, rng);
    const auto planted = random_local_phases<Complex>(dims, rng);
    const auto moved = ts::naive_apply_all(a, planted);
    const PureState<Complex> b(dims, moved.coeffs() * std::polar(1.0, rng.angle()));
    const auto out = match_phases(a, b);
    if (!out.match) {
      o.require(false, "planted phases not recovered in trial " + std::to_string(t));
      continue;
    }
    // gauge-free check: the recovered phases map a onto b exactly
    worst = std::max(worst, (ts::naive_apply_all(a, out.match->unitaries<Complex>()).coeffs() - b.coeffs()).norm());
  }
  o.require(worst < 1e-9, "recovery residual " + fmt(worst));

  int rejected = 0;
  double grid_min = 2;
  for (int t = 0; t < 10; ++t) {
    const auto a = random_state<Complex>({2, 2, 2}, rng);
    VectorXc c = ts::naive_apply_all(a, random_local_phases<Complex>(a.dims(), rng)).coeffs();
    // one extra phase on a single coefficient breaks every cycle through it
    c(1 + rng.below(7)) *= std::polar(1.0, 0.5 + 2.0 * rng.uniform());
    const PureState<Complex> b(a.dims(), c);
    grid_min = std::min(grid_min, ts::grid_phase_residual(a, b, 48));
    const auto out = match_phases(a, b);
    if (!out.match && out.failure == PhaseFailure::Inconsistent) ++rejected;
  }
  o.require(grid_min > 1e-3, "grid search found residual " + fmt(grid_min));
  o.require(rejected == 10, std::to_string(rejected) + "/10 inconsistent instances rejected");
  if (o.pass) o.detail = "max recovery residual " + fmt(worst) + ", 10/10 cycle-inconsistent rejected (grid minimum " + fmt(grid_min) + ")";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 Example 1 Grams and symmetry groups", criterion1},
      {"2 Example 1 stacks and reduction", criterion2},
      {"3 Example 2 Grams, stacks and reduction", criterion3},
      {"4 stack conjugation under symmetry groups", criterion4},
      {"5 canonicalization invariance and stabilizers", criterion5},
      {"6 Haar scramble recognized", criterion6},
      {"7 independent pairs rejected", criterion7},
      {"8 phase plant-and-recover", criterion8},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
