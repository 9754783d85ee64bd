#pragma once

#include "luequiv/tensor.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace luequiv {

// State file grammar (whitespace separated tokens):
//
//   # comment lines start with '#'
//   dims: I_1 I_2 ... I_N
//   j_1 j_2 ... j_N  re im      (1-based indices, one coefficient per line)
//
// The dims header is the first non-comment line. Unlisted coefficients are
// zero; repeated multi-indices are rejected. The parsed state must have unit
// norm within tol_norm.
PureState<Complex> parse_state(std::istream& in, const std::string& source = "<input>", double tol_norm = 1e-10);

PureState<Complex> read_state_file(const std::filesystem::path& path, double tol_norm = 1e-10);

// Writes every nonzero coefficient with 17 significant digits, so parsing the
// output reproduces the coefficients bit for bit.
void write_state(std::ostream& out, const PureState<Complex>& state, const std::string& comment = {});

void write_state_file(const std::filesystem::path& path, const PureState<Complex>& state, const std::string& comment = {});

// Shortest-roundtrip-safe decimal rendering (%.17g).
std::string format_real(double value);

}  // namespace luequiv
