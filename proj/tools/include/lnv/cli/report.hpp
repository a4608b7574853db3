#pragma once

// Per-component summary rows, hypothesis verdicts and seeds, rendered as JSON
// and as a fixed-width text table from the same data.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lnv/cli/archive.hpp"

namespace lnv::cli {

struct ReportRow {
  int dim = 0;
  std::size_t degree = 0;
  std::size_t count = 0;
  std::optional<Complex> loss;
  std::string contains_origin = "-";
  std::optional<int> zero_eig_count;
  std::string classification = "-";
  std::vector<std::string> ids;
};

struct Report {
  std::string arch;
  std::vector<ReportRow> rows;  // dim desc, degree, first id
  std::vector<HypothesisReport> hypotheses;
  std::uint64_t seed = 0;
  std::uint64_t data_seed = 0;
  bool provisional = false;
  double half_output_energy = 0.0;
  std::vector<std::pair<std::string, double>> timings;
};

/// Components agreeing in every column (losses within 1e-6 relative) share
/// a row.
Report make_report(const Archive& a);

nlohmann::ordered_json report_to_json(const Report& r);
std::string render_table(const Report& r);

}  // namespace lnv::cli
