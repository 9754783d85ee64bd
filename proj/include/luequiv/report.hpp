#pragma once

#include "luequiv/decide.hpp"
#include "luequiv/hosvd.hpp"
#include "luequiv/reduce.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace luequiv {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const MatrixXc& m);
MatrixXc matrix_from_json(const Json& j);
Json group_to_json(const DirectGroup& g);
DirectGroup group_from_json(const Json& j);
Json spectrum_to_json(const ModeSpectrum& s);

struct ReportSettings {
  double tol_cluster = 1e-9;
  double tol_match = 1e-8;
  std::optional<std::uint64_t> seed;
};

// Structured command output: a JSON tree that renders either as JSON (exact
// doubles) or as indented plain text (17 significant digits).
class Report {
 public:
  Report() = default;
  explicit Report(Json tree) : tree_(std::move(tree)) {}

  const Json& tree() const noexcept { return tree_; }
  Json& tree() noexcept { return tree_; }

  std::string to_json() const;
  static Report from_json(const std::string& text);
  std::string to_text() const;

  friend bool operator==(const Report& a, const Report& b) { return a.tree_ == b.tree_; }

 private:
  Json tree_ = Json::object();
};

Report hosvd_report(const PureState<Complex>& input, const HosvdResult<Complex>& hosvd, const ReportSettings& settings);

Report reduce_report(const PureState<Complex>& input, const HosvdResult<Complex>& hosvd, const ReducedForm<Complex>& reduced,
                     const ReportSettings& settings);

Report compare_report(const PureState<Complex>& a, const PureState<Complex>& b, const Comparison<Complex>& cmp,
                      const ReportSettings& settings);

Json error_json(const std::string& kind, const std::string& message);

}  // namespace luequiv
