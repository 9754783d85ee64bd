#include "luequiv/decide.hpp"
#include "luequiv/io.hpp"
#include "luequiv/random.hpp"
#include "luequiv/report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace luequiv;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitNumeric = 65;
constexpr int kExitNoInput = 66;

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

Failure classify(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse: return {kExitUsage, "parse", e.what()};
    case ErrorKind::DimensionMismatch: return {kExitUsage, "dimension_mismatch", e.what()};
    case ErrorKind::InvalidArgument: return {kExitUsage, "invalid_argument", e.what()};
    case ErrorKind::Numeric: return {kExitNumeric, "numeric", e.what()};
  }
  return {kExitNumeric, "numeric", e.what()};
}

struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PureState<Complex> load(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw MissingFile("cannot open " + path.string());
  return read_state_file(path);
}

struct Options {
  double tol_cluster = 1e-9;
  double tol_match = 1e-8;
  std::string format = "text";
  std::optional<std::uint64_t> seed;

  ReportSettings settings() const { return {tol_cluster, tol_match, seed}; }
  bool json() const { return format == "json"; }
};

std::string render(const Report& r, const Options& o) { return o.json() ? r.to_json() : r.to_text(); }

std::string render_error(const Failure& f, const Options& o) {
  if (o.json()) return error_json(f.kind, f.message).dump(2) + "\n";
  return "error (" + f.kind + "): " + f.message + "\n";
}

// Runs body, turning library errors into structured output and an exit code.
template <typename Body>
int guarded(const Options& o, std::string& out, std::string& err, Body&& body) {
  try {
    return body(out);
  } catch (const MissingFile& e) {
    err = render_error({kExitNoInput, "missing_file", e.what()}, o);
    return kExitNoInput;
  } catch (const Error& e) {
    const Failure f = classify(e);
    err = render_error(f, o);
    return f.code;
  } catch (const std::exception& e) {
    err = render_error({kExitNumeric, "numeric", e.what()}, o);
    return kExitNumeric;
  }
}

int verdict_code(VerdictKind k) {
  switch (k) {
    case VerdictKind::Equivalent: return 0;
    case VerdictKind::Inequivalent: return 1;
    case VerdictKind::Undecided: return 2;
  }
  return 2;
}

int compare_pair(const fs::path& a, const fs::path& b, const Options& o, std::string& out) {
  const auto psi = load(a);
  const auto phi = load(b);
  CompareOptions copts;
  copts.tol_cluster = o.tol_cluster;
  copts.tol_match = o.tol_match;
  const auto cmp = compare_detailed(psi, phi, copts);
  out = render(compare_report(psi, phi, cmp, o.settings()), o);
  return verdict_code(cmp.verdict.kind);
}

std::vector<std::pair<fs::path, fs::path>> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path.string());
  const fs::path base = path.parent_path();
  std::vector<std::pair<fs::path, fs::path>> pairs;
  Index line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!(ss >> a >> b) || (ss >> extra)) {
      throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": expected 'fileA fileB'");
    }
    pairs.emplace_back(base / a, base / b);
  }
  return pairs;
}

int run_batch(const fs::path& manifest, const Options& o) {
  std::string out, err;
  std::vector<std::pair<fs::path, fs::path>> pairs;
  const int code = guarded(o, out, err, [&](std::string&) {
    pairs = read_manifest(manifest);
    return 0;
  });
  if (code != 0) {
    (o.json() ? std::cout : std::cerr) << err;
    return code;
  }

  const std::size_t n = pairs.size();
  std::vector<std::string> outputs(n), errors(n);
  std::vector<int> codes(n, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      codes[i] = guarded(o, outputs[i], errors[i], [&](std::string& s) { return compare_pair(pairs[i].first, pairs[i].second, o, s); });
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int worst = 0;
  if (o.json()) {
    Json all = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
      Json entry = Json::parse(codes[i] <= 2 ? outputs[i] : errors[i]);
      entry["pair"] = Json::array({pairs[i].first.string(), pairs[i].second.string()});
      entry["exit_code"] = codes[i];
      all.push_back(std::move(entry));
    }
    std::cout << all.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::cout << "== pair " << i + 1 << ": " << pairs[i].first.string() << " " << pairs[i].second.string() << " (exit " << codes[i] << ")\n";
      std::cout << (codes[i] <= 2 ? outputs[i] : errors[i]);
    }
  }
  for (int c : codes) worst = std::max(worst, c);
  return worst;
}

std::vector<Index> parse_dims(const std::string& text) {
  std::vector<Index> dims;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    std::size_t used = 0;
    long long d = 0;
    try {
      d = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || d < 1) throw Error(ErrorKind::InvalidArgument, "invalid dimension '" + tok + "' in --dims");
    dims.push_back(static_cast<Index>(d));
  }
  return dims;
}

void emit_state(const std::string& path, const PureState<Complex>& s, const std::string& comment) {
  if (path.empty() || path == "-") {
    write_state(std::cout, s, comment);
  } else {
    write_state_file(path, s, comment);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-unitary equivalence of multipartite pure states"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--tol-cluster", o.tol_cluster, "Eigenvalue / singular value clustering tolerance")->capture_default_str();
  app.add_option("--tol-match", o.tol_match, "Matching tolerance for invariants and witnesses")->capture_default_str();
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_option("--seed", o.seed, "Seed for randomized commands");

  std::string file_a, file_b, batch, dims_text, output, sidecar;
  bool phases_only = false, block_respecting = false, haar = false;

  auto* hosvd_cmd = app.add_subcommand("hosvd", "Mode Grams, spectra and symmetry groups of a state");
  hosvd_cmd->add_option("file", file_a, "State file")->required();

  auto* reduce_cmd = app.add_subcommand("reduce", "Mode stacks, canonical forms and the reduced state");
  reduce_cmd->add_option("file", file_a, "State file")->required();

  auto* compare_cmd = app.add_subcommand("compare", "Decide whether two states are LU equivalent");
  compare_cmd->add_option("fileA", file_a, "First state file");
  compare_cmd->add_option("fileB", file_b, "Second state file");
  compare_cmd->add_option("--batch", batch, "Manifest with one 'fileA fileB' pair per line");

  auto* gen_cmd = app.add_subcommand("gen", "Emit a Haar-random normalized state");
  gen_cmd->add_option("--dims", dims_text, "Comma separated subsystem dimensions, e.g. 2,2,2")->required();
  gen_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  auto* scramble_cmd = app.add_subcommand("scramble", "Apply seeded local unitaries to a state");
  scramble_cmd->add_option("file", file_a, "State file")->required();
  auto* g1 = scramble_cmd->add_flag("--phases-only", phases_only, "Diagonal phase unitaries");
  auto* g2 = scramble_cmd->add_flag("--block-respecting", block_respecting, "Unitaries from the HOSVD symmetry groups");
  auto* g3 = scramble_cmd->add_flag("--haar", haar, "Haar-random unitaries (default)");
  g1->excludes(g2)->excludes(g3);
  g2->excludes(g3);
  scramble_cmd->add_option("-o,--output", output, "Output file (default stdout)");
  scramble_cmd->add_option("--sidecar", sidecar, "Write the applied unitaries as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return e.get_exit_code() == 0 ? rc : kExitUsage;
  }

  std::string out, err;
  int code = 0;

  if (*hosvd_cmd) {
    code = guarded(o, out, err, [&](std::string& s) {
      const auto psi = load(file_a);
      HosvdOptions h;
      h.tol_cluster = o.tol_cluster;
      h.tol_diag = o.tol_cluster;
      s = render(hosvd_report(psi, to_hosvd(psi, h), o.settings()), o);
      return 0;
    });
  } else if (*reduce_cmd) {
    code = guarded(o, out, err, [&](std::string& s) {
      const auto psi = load(file_a);
      HosvdOptions h;
      h.tol_cluster = o.tol_cluster;
      h.tol_diag = o.tol_cluster;
      const auto hosvd = to_hosvd(psi, h);
      s = render(reduce_report(psi, hosvd, reduce_state(hosvd, o.tol_cluster), o.settings()), o);
      return 0;
    });
  } else if (*compare_cmd) {
    if (!batch.empty()) {
      if (!file_a.empty()) {
        std::cerr << render_error({kExitUsage, "usage", "--batch does not take positional files"}, o);
        return kExitUsage;
      }
      return run_batch(batch, o);
    }
    if (file_a.empty() || file_b.empty()) {
      std::cerr << render_error({kExitUsage, "usage", "compare needs two state files or --batch"}, o);
      return kExitUsage;
    }
    code = guarded(o, out, err, [&](std::string& s) { return compare_pair(file_a, file_b, o, s); });
  } else if (*gen_cmd) {
    if (!o.seed) {
      std::cerr << render_error({kExitUsage, "usage", "gen requires --seed"}, o);
      return kExitUsage;
    }
    code = guarded(o, out, err, [&](std::string&) {
      Rng rng(*o.seed);
      const auto psi = random_state<Complex>(parse_dims(dims_text), rng);
      emit_state(output, psi, "luequiv gen --dims " + dims_text + " --seed " + std::to_string(*o.seed));
      return 0;
    });
  } else if (*scramble_cmd) {
    if (!o.seed) {
      std::cerr << render_error({kExitUsage, "usage", "scramble requires --seed"}, o);
      return kExitUsage;
    }
    code = guarded(o, out, err, [&](std::string&) {
      const auto psi = load(file_a);
      Rng rng(*o.seed);
      std::vector<MatrixXc> u;
      std::string mode = "haar";
      if (phases_only) {
        mode = "phases-only";
        u = random_local_phases<Complex>(psi.dims(), rng);
      } else if (block_respecting) {
        // W_m in S^(m) acts on the HOSVD basis: U_m = V_m^dagger W_m V_m.
        mode = "block-respecting";
        HosvdOptions h;
        h.tol_cluster = o.tol_cluster;
        h.tol_diag = o.tol_cluster;
        const auto hosvd = to_hosvd(psi, h);
        for (std::size_t m = 0; m < hosvd.transforms.size(); ++m) {
          const MatrixXc& v = hosvd.transforms[m];
          u.push_back(v.adjoint() * sample_group_element<Complex>(hosvd.symmetry[m], rng) * v);
        }
      } else {
        u = haar_local_unitaries<Complex>(psi.dims(), rng);
      }
      const auto phi = apply_local_unitaries(psi, u, 1e-9);
      emit_state(output, phi, "luequiv scramble --" + mode + " --seed " + std::to_string(*o.seed) + " " + file_a);
      if (!sidecar.empty()) {
        Json j;
        j["mode"] = mode;
        j["seed"] = *o.seed;
        j["input"] = file_a;
        Json mats = Json::array();
        for (const auto& m : u) mats.push_back(matrix_to_json(m));
        j["unitaries"] = std::move(mats);
        std::ofstream f(sidecar);
        if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + sidecar);
        f << j.dump(2) << "\n";
      }
      return 0;
    });
  }

  std::cout << out;
  // JSON consumers read one document from stdout, errors included.
  (o.json() ? std::cout : std::cerr) << err;
  return code;
}
