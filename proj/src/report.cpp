#include "luequiv/report.hpp"

#include "luequiv/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace luequiv {

namespace {

Json state_to_json(const PureState<Complex>& s) {
  Json j;
  j["dims"] = s.dims();
  Json terms = Json::array();
  for (Index lin = 0; lin < s.size(); ++lin) {
    const Complex c = s.coeffs()(lin);
    if (c == Complex(0, 0)) continue;
    Json idx = Json::array();
    for (Index x : s.multi_index(lin)) idx.push_back(x + 1);
    terms.push_back(Json{{"index", idx}, {"re", c.real()}, {"im", c.imag()}});
  }
  j["coefficients"] = std::move(terms);
  return j;
}

Json settings_to_json(const ReportSettings& s) {
  Json j;
  j["tol_cluster"] = s.tol_cluster;
  j["tol_match"] = s.tol_match;
  if (s.seed) j["seed"] = *s.seed;
  return j;
}

Json stack_to_json(const ModeStack<Complex>& stack) {
  Json blocks = Json::array();
  for (std::size_t b = 0; b < stack.blocks.size(); ++b) {
    blocks.push_back(Json{{"i", stack.labels[b].first + 1}, {"k", stack.labels[b].second + 1}, {"matrix", matrix_to_json(stack.blocks[b])}});
  }
  return blocks;
}

Json modes_json(const HosvdResult<Complex>& hosvd) {
  Json modes = Json::array();
  for (Index m = 0; m < hosvd.order(); ++m) {
    const auto s = static_cast<std::size_t>(m);
    modes.push_back(Json{{"mode", m + 1},
                         {"gram", matrix_to_json(hosvd.grams[s])},
                         {"spectrum", spectrum_to_json(hosvd.spectra[s])},
                         {"symmetry", group_to_json(hosvd.symmetry[s])},
                         {"transform", matrix_to_json(hosvd.transforms[s])}});
  }
  return modes;
}

Json reduced_json(const ReducedForm<Complex>& reduced) {
  Json modes = Json::array();
  for (std::size_t m = 0; m < reduced.transforms.size(); ++m) {
    Json canonical = Json::array();
    for (const auto& c : reduced.canonical[m].canonical) canonical.push_back(matrix_to_json(c));
    modes.push_back(Json{{"mode", m + 1},
                         {"stack", stack_to_json(reduced.stacks[m])},
                         {"canonical_stack", std::move(canonical)},
                         {"transform", matrix_to_json(reduced.transforms[m])},
                         {"residual", group_to_json(reduced.residual[m])}});
  }
  Json j;
  j["modes"] = std::move(modes);
  j["residual_parameters"] = reduced.residual_parameter_count();
  j["residual_is_phases"] = reduced.residual_is_phases();
  j["reduced_state"] = state_to_json(reduced.state);
  j["warnings"] = reduced.warnings();
  return j;
}

bool is_matrix(const Json& j) {
  return j.is_object() && j.size() == 4 && j.contains("rows") && j.contains("cols") && j.contains("re") && j.contains("im");
}

std::string format_complex(double re, double im) {
  std::string out = format_real(re);
  if (im != 0.0) out += (im < 0 || std::signbit(im) ? " - " : " + ") + format_real(std::abs(im)) + "i";
  return out;
}

bool is_inline(const Json& j) {
  if (j.is_primitive()) return true;
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& x) { return is_inline(x); });
}

std::string inline_text(const Json& j) {
  if (j.is_boolean()) return j.get<bool>() ? "yes" : "no";
  if (j.is_number_float()) return format_real(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  if (!j.is_array()) return j.dump();
  std::string out = "[";
  for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + inline_text(j[i]);
  return out + "]";
}

std::string key_text(const std::string& key) {
  if (key == "already_hosvd") return "already HOSVD";
  std::string out = key;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

void render(std::ostringstream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (is_matrix(j)) {
    const auto m = matrix_from_json(j);
    for (Index r = 0; r < m.rows(); ++r) {
      out << pad << "[";
      for (Index c = 0; c < m.cols(); ++c) out << (c ? ", " : " ") << format_complex(m(r, c).real(), m(r, c).imag());
      out << " ]\n";
    }
    return;
  }
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (is_inline(value)) {
        out << pad << key_text(key) << ": " << inline_text(value) << "\n";
      } else {
        out << pad << key_text(key) << ":\n";
        render(out, value, indent + 2);
      }
    }
    return;
  }
  if (j.is_array()) {
    for (const auto& x : j) {
      if (is_inline(x)) {
        out << pad << "- " << inline_text(x) << "\n";
      } else {
        out << pad << "-\n";
        render(out, x, indent + 2);
      }
    }
    return;
  }
  out << pad << inline_text(j) << "\n";
}

}  // namespace

Json matrix_to_json(const MatrixXc& m) {
  Json re = Json::array(), im = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

MatrixXc matrix_from_json(const Json& j) {
  const Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Index>(re.size()) != rows * cols || static_cast<Index>(im.size()) != rows * cols) {
    throw Error(ErrorKind::Parse, "matrix entry count does not match its shape");
  }
  MatrixXc m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const auto i = static_cast<std::size_t>(r * cols + c);
      m(r, c) = Complex(re[i].get<double>(), im[i].get<double>());
    }
  return m;
}

Json group_to_json(const DirectGroup& g) {
  Json classes = Json::array();
  for (const auto& cls : g.equality_classes()) {
    Json c = Json::array();
    for (Index b : cls) c.push_back(b + 1);
    classes.push_back(std::move(c));
  }
  return Json{{"blocks", g.block_sizes()}, {"classes", std::move(classes)}};
}

DirectGroup group_from_json(const Json& j) {
  const auto blocks = j.at("blocks").get<std::vector<Index>>();
  std::vector<int> labels(blocks.size(), -1);
  int next = 0;
  for (const auto& cls : j.at("classes")) {
    for (const auto& b : cls) labels.at(b.get<std::size_t>() - 1) = next;
    ++next;
  }
  return DirectGroup(blocks, labels);
}

Json spectrum_to_json(const ModeSpectrum& s) {
  return Json{{"values", s.values}, {"multiplicities", s.multiplicities}};
}

std::string Report::to_json() const { return tree_.dump(2) + "\n"; }

Report Report::from_json(const std::string& text) { return Report(Json::parse(text)); }

std::string Report::to_text() const {
  std::ostringstream out;
  render(out, tree_, 0);
  return out.str();
}

Report hosvd_report(const PureState<Complex>& input, const HosvdResult<Complex>& hosvd, const ReportSettings& settings) {
  Json j;
  j["command"] = "hosvd";
  j["input"] = input.label();
  j["dims"] = input.dims();
  j["already_hosvd"] = hosvd.already_hosvd;
  j["modes"] = modes_json(hosvd);
  j["hosvd_state"] = state_to_json(hosvd.state);
  j["settings"] = settings_to_json(settings);
  return Report(std::move(j));
}

Report reduce_report(const PureState<Complex>& input, const HosvdResult<Complex>& hosvd, const ReducedForm<Complex>& reduced,
                     const ReportSettings& settings) {
  Json j;
  j["command"] = "reduce";
  j["input"] = input.label();
  j["dims"] = input.dims();
  j["already_hosvd"] = hosvd.already_hosvd;
  j["hosvd"] = modes_json(hosvd);
  j["reduction"] = reduced_json(reduced);
  j["settings"] = settings_to_json(settings);
  return Report(std::move(j));
}

Report compare_report(const PureState<Complex>& a, const PureState<Complex>& b, const Comparison<Complex>& cmp,
                      const ReportSettings& settings) {
  const auto& v = cmp.verdict;
  Json j;
  j["command"] = "compare";
  j["inputs"] = Json::array({a.label(), b.label()});
  j["dims"] = a.dims();

  Json verdict;
  verdict["kind"] = to_string(v.kind);
  verdict["reason"] = v.reason;
  if (v.failed != FailedInvariant::None) verdict["failed_invariant"] = to_string(v.failed);
  if (v.failed_mode >= 0) verdict["failed_mode"] = v.failed_mode + 1;
  if (v.witness_residual >= 0) verdict["witness_residual"] = v.witness_residual;
  if (v.witness) {
    Json w = Json::array();
    for (const auto& u : *v.witness) w.push_back(matrix_to_json(u));
    verdict["witness"] = std::move(w);
  }
  if (!v.residual_report.empty()) {
    Json r = Json::array();
    for (const auto& g : v.residual_report) r.push_back(group_to_json(g));
    verdict["residual_groups"] = std::move(r);
  }
  j["verdict"] = std::move(verdict);

  Json spectra = Json::array();
  for (Index m = 0; m < a.order(); ++m) {
    const auto s = static_cast<std::size_t>(m);
    spectra.push_back(Json{{"mode", m + 1},
                           {"a", spectrum_to_json(cmp.hosvd_a.spectra[s])},
                           {"b", spectrum_to_json(cmp.hosvd_b.spectra[s])},
                           {"symmetry", group_to_json(cmp.hosvd_a.symmetry[s])}});
  }
  j["spectra"] = std::move(spectra);
  if (cmp.reduced_a) j["reduction_a"] = reduced_json(*cmp.reduced_a);
  if (cmp.reduced_b) j["reduction_b"] = reduced_json(*cmp.reduced_b);
  if (cmp.phases) {
    j["phases"] = Json{{"angles", cmp.phases->angles}, {"free_variables", cmp.phases->free_variables}, {"equations", cmp.phases->equations}};
  }
  j["settings"] = settings_to_json(settings);
  return Report(std::move(j));
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", Json{{"kind", kind}, {"message", message}}}};
}

}  // namespace luequiv
