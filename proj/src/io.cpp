#include "luequiv/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

namespace luequiv {

namespace {

[[noreturn]] void parse_fail(const std::string& source, Index line, const std::string& what) {
  throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
bool parse_number(const std::string& tok, T& value) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

PureState<Complex> parse_state(std::istream& in, const std::string& source, double tol_norm) {
  std::vector<Index> dims;
  std::vector<Complex> coeffs;
  std::set<Index> seen;
  Index line_no = 0;
  bool have_header = false;

  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tokens = tokenize(line);

    if (!have_header) {
      if (tokens.front() != "dims:") parse_fail(source, line_no, "expected 'dims:' header before coefficients");
      if (tokens.size() < 3) parse_fail(source, line_no, "need at least two subsystem dimensions");
      Index total = 1;
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        Index d = 0;
        if (!parse_number(tokens[t], d) || d < 1) parse_fail(source, line_no, "invalid dimension '" + tokens[t] + "'");
        if (total > kMaxCoefficients / d) parse_fail(source, line_no, "dimension product exceeds the dense coefficient cap");
        total *= d;
        dims.push_back(d);
      }
      coeffs.assign(static_cast<std::size_t>(total), Complex(0, 0));
      have_header = true;
      continue;
    }

    if (tokens.front() == "dims:") parse_fail(source, line_no, "duplicate 'dims:' header");
    if (tokens.size() != dims.size() + 2) {
      parse_fail(source, line_no, "expected " + std::to_string(dims.size()) + " indices followed by 're im'");
    }
    Index lin = 0;
    for (std::size_t m = 0; m < dims.size(); ++m) {
      Index j = 0;
      if (!parse_number(tokens[m], j)) parse_fail(source, line_no, "invalid index '" + tokens[m] + "'");
      if (j < 1 || j > dims[m]) {
        parse_fail(source, line_no, "index " + tokens[m] + " outside 1.." + std::to_string(dims[m]) + " for subsystem " + std::to_string(m + 1));
      }
      lin = lin * dims[m] + (j - 1);
    }
    double re = 0, im = 0;
    if (!parse_number(tokens[dims.size()], re) || !std::isfinite(re)) parse_fail(source, line_no, "invalid real part '" + tokens[dims.size()] + "'");
    if (!parse_number(tokens[dims.size() + 1], im) || !std::isfinite(im)) parse_fail(source, line_no, "invalid imaginary part '" + tokens[dims.size() + 1] + "'");
    if (!seen.insert(lin).second) parse_fail(source, line_no, "duplicate multi-index");
    coeffs[static_cast<std::size_t>(lin)] = Complex(re, im);
  }
  if (!have_header) parse_fail(source, line_no, "missing 'dims:' header");

  VectorXc vec = Eigen::Map<const VectorXc>(coeffs.data(), static_cast<Index>(coeffs.size()));
  PureState<Complex> state(dims, std::move(vec), source);
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > tol_norm) {
    throw Error(ErrorKind::Numeric, source + ": state norm " + format_real(norm) + " differs from 1 by more than " + format_real(tol_norm));
  }
  return state;
}

PureState<Complex> read_state_file(const std::filesystem::path& path, double tol_norm) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string());
  return parse_state(in, path.string(), tol_norm);
}

void write_state(std::ostream& out, const PureState<Complex>& state, const std::string& comment) {
  if (!comment.empty()) {
    std::istringstream lines(comment);
    for (std::string line; std::getline(lines, line);) out << "# " << line << "\n";
  }
  out << "dims:";
  for (Index d : state.dims()) out << ' ' << d;
  out << '\n';
  for (Index lin = 0; lin < state.size(); ++lin) {
    const Complex c = state.coeffs()(lin);
    if (c == Complex(0, 0)) continue;
    const auto multi = state.multi_index(lin);
    for (Index j : multi) out << j + 1 << ' ';
    out << ' ' << format_real(c.real()) << ' ' << format_real(c.imag()) << '\n';
  }
}

void write_state_file(const std::filesystem::path& path, const PureState<Complex>& state, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  write_state(out, state, comment);
}

}  // namespace luequiv
