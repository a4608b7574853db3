#pragma once

// Versioned JSON archives of decompositions and landscape analyses. Complex
// numbers are stored as "re,im" strings with 17 significant digits; run-local
// values (threads, output directory, timings) are kept out so that a rerun
// with the same seed produces identical bytes.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lnv/cli/config.hpp"
#include "lnv/landscape.hpp"

namespace lnv::cli {

inline constexpr int kFormatVersion = 1;

class ArchiveError : public Error {
 public:
  using Error::Error;
};

struct Archive {
  std::string kind;  // "decomposition" or "analysis"
  RunConfig config;
  NetProblem problem;
  Decomposition decomposition;
  std::optional<LandscapeAnalysis> analysis;
  int samples = 0;                  // per component, analysis archives only
  std::uint64_t analysis_seed = 0;  // analysis archives only
};

nlohmann::ordered_json complex_vector_to_json(std::span<const Complex> v);
CVector complex_vector_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json cmatrix_to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json hypothesis_to_json(const HypothesisReport& r);

nlohmann::ordered_json archive_to_json(const Archive& a);
/// Sample quantities are recomputed from the stored points, so edited
/// points show up in later checks. Throws ArchiveError.
Archive archive_from_json(const nlohmann::ordered_json& j);

void write_json(const std::string& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json(const std::string& path);

void save_archive(const std::string& path, const Archive& a);
Archive load_archive(const std::string& path);

}  // namespace lnv::cli
