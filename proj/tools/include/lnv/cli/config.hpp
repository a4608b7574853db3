#pragma once

// Run configuration: network, training data, tracker settings and the
// decomposition/analysis knobs, read from YAML.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "lnv/nid.hpp"
#include "lnv/netsys.hpp"

namespace lnv::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class DataMode { realizable, explicit_values };

struct DataSpec {
  DataMode mode = DataMode::realizable;
  std::size_t m = 2;       // realizable: sample count
  std::uint64_t seed = 7;  // realizable: generator seed
  RealMatrix x;            // explicit: d_x x m
  RealMatrix y;            // explicit: d_y x m
};

struct RunConfig {
  Architecture arch;
  DataSpec data;
  TrackSettings settings;
  StartStrategy start = StartStrategy::automatic;
  int min_dim = 0;
  int max_dim = -1;  // negative: n - 1
  int samples = 5;
  int max_loops = 20;
  std::uint64_t seed = 1;
  bool allow_large = false;
  // run-local, never archived
  unsigned threads = 1;
  std::string out = "lnv-out";

  /// Throws ConfigError.
  void validate() const;
};

RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

TrainingSet resolve_data(const RunConfig& cfg);
NetProblem build_problem(const RunConfig& cfg);
DecomposeOptions decompose_options(const RunConfig& cfg);

/// Archived fields only: threads and the output directory are left out so
/// that archives do not depend on them.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json settings_to_json(const TrackSettings& s);
TrackSettings settings_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json matrix_to_json(const RealMatrix& m);
RealMatrix matrix_from_json(const nlohmann::ordered_json& j);

}  // namespace lnv::cli
