#include "lnv/cli/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace lnv::cli {

using json = nlohmann::ordered_json;

void RunConfig::validate() const {
  try {
    arch.validate(allow_large);
  } catch (const Error& e) {
    throw ConfigError(std::string("architecture: ") + e.what());
  }
  const int n = static_cast<int>(arch.nvars());
  if (min_dim < 0 || min_dim > n - 1) throw ConfigError("min_dim must lie in [0, " + std::to_string(n - 1) + "]");
  if (max_dim >= n) throw ConfigError("max_dim must be below the variable count " + std::to_string(n));
  if (max_dim >= 0 && max_dim < min_dim) throw ConfigError("max_dim is below min_dim");
  if (samples < 3) throw ConfigError("samples must be at least 3");
  if (max_loops < 1) throw ConfigError("max_loops must be positive");
  if (threads < 1) throw ConfigError("threads must be positive");
  try {
    settings.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("tracker: ") + e.what());
  }
  if (data.mode == DataMode::realizable) {
    if (data.m < 1) throw ConfigError("data.m must be positive");
  } else {
    TrainingSet t{data.x, data.y};
    try {
      check_conforms(arch, t);
    } catch (const Error& e) {
      throw ConfigError(std::string("data: ") + e.what());
    }
  }
}

namespace {

RealMatrix yaml_matrix(const YAML::Node& node, const char* what) {
  if (!node || !node.IsSequence() || node.size() == 0) throw ConfigError(std::string(what) + " must be a nonempty list of rows");
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].size();
  RealMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!node[r].IsSequence() || node[r].size() != cols) throw ConfigError(std::string(what) + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = node[r][c].as<double>();
  }
  return m;
}

template <typename T>
void read_opt(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) out = node[key].as<T>();
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  RunConfig cfg;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  try {
    if (!root["dims"] || !root["dims"].IsSequence()) throw ConfigError("dims is required, e.g. dims: [2, 2, 2]");
    cfg.arch.dims = root["dims"].as<std::vector<int>>();
    read_opt(root, "residual", cfg.arch.residual);
    read_opt(root, "allow_large", cfg.allow_large);

    if (const auto d = root["data"]) {
      const std::string mode = d["mode"] ? d["mode"].as<std::string>() : "realizable";
      if (mode == "realizable") {
        cfg.data.mode = DataMode::realizable;
        read_opt(d, "m", cfg.data.m);
        read_opt(d, "seed", cfg.data.seed);
      } else if (mode == "explicit") {
        cfg.data.mode = DataMode::explicit_values;
        cfg.data.x = yaml_matrix(d["X"], "data.X");
        cfg.data.y = yaml_matrix(d["Y"], "data.Y");
      } else {
        throw ConfigError("data.mode must be realizable or explicit");
      }
    }

    read_opt(root, "seed", cfg.seed);
    read_opt(root, "min_dim", cfg.min_dim);
    read_opt(root, "max_dim", cfg.max_dim);
    read_opt(root, "samples", cfg.samples);
    read_opt(root, "max_loops", cfg.max_loops);
    read_opt(root, "threads", cfg.threads);
    read_opt(root, "out", cfg.out);
    if (root["start"]) cfg.start = parse_start_strategy(root["start"].as<std::string>());

    if (const auto t = root["tracker"]) {
      read_opt(t, "step_init", cfg.settings.step_init);
      read_opt(t, "step_min", cfg.settings.step_min);
      read_opt(t, "step_max", cfg.settings.step_max);
      read_opt(t, "corrector_tol", cfg.settings.corrector_tol);
      read_opt(t, "final_tol", cfg.settings.final_tol);
      read_opt(t, "divergence_bound", cfg.settings.divergence_bound);
      read_opt(t, "max_steps", cfg.settings.max_steps);
      read_opt(t, "max_corrector_iterations", cfg.settings.max_corrector_iterations);
      read_opt(t, "end_zone", cfg.settings.end_zone);
      read_opt(t, "singular_condition", cfg.settings.singular_condition);
      read_opt(t, "projective", cfg.settings.projective);
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

TrainingSet resolve_data(const RunConfig& cfg) {
  if (cfg.data.mode == DataMode::explicit_values) return TrainingSet{cfg.data.x, cfg.data.y};
  return generate_realizable_data(cfg.arch, cfg.data.m, cfg.data.seed).data;
}

NetProblem build_problem(const RunConfig& cfg) { return make_problem(cfg.arch, resolve_data(cfg)); }

DecomposeOptions decompose_options(const RunConfig& cfg) {
  DecomposeOptions o;
  o.witness.settings = cfg.settings;
  o.witness.strategy = cfg.start;
  o.witness.groups = cfg.arch.layer_groups();
  o.witness.threads = cfg.threads;
  o.min_dim = cfg.min_dim;
  o.max_dim = cfg.max_dim;
  o.max_loops = cfg.max_loops;
  o.seed = cfg.seed;
  return o;
}

json matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nonempty list of rows");
  RealMatrix m(j.size(), j[0].size());
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (j[r].size() != m.cols) throw ConfigError("matrix rows must have equal length");
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json settings_to_json(const TrackSettings& s) {
  return json{{"step_init", s.step_init},
              {"step_min", s.step_min},
              {"step_max", s.step_max},
              {"corrector_tol", s.corrector_tol},
              {"final_tol", s.final_tol},
              {"divergence_bound", s.divergence_bound},
              {"max_steps", s.max_steps},
              {"max_corrector_iterations", s.max_corrector_iterations},
              {"end_zone", s.end_zone},
              {"singular_condition", s.singular_condition},
              {"projective", s.projective}};
}

TrackSettings settings_from_json(const json& j) {
  TrackSettings s;
  s.step_init = j.at("step_init").get<double>();
  s.step_min = j.at("step_min").get<double>();
  s.step_max = j.at("step_max").get<double>();
  s.corrector_tol = j.at("corrector_tol").get<double>();
  s.final_tol = j.at("final_tol").get<double>();
  s.divergence_bound = j.at("divergence_bound").get<double>();
  s.max_steps = j.at("max_steps").get<int>();
  s.max_corrector_iterations = j.at("max_corrector_iterations").get<int>();
  s.end_zone = j.at("end_zone").get<double>();
  s.singular_condition = j.at("singular_condition").get<double>();
  s.projective = j.at("projective").get<bool>();
  return s;
}

json config_to_json(const RunConfig& cfg) {
  json data;
  if (cfg.data.mode == DataMode::realizable) {
    data = json{{"mode", "realizable"}, {"m", cfg.data.m}, {"seed", cfg.data.seed}};
  } else {
    data = json{{"mode", "explicit"}, {"X", matrix_to_json(cfg.data.x)}, {"Y", matrix_to_json(cfg.data.y)}};
  }
  return json{{"dims", cfg.arch.dims},
              {"residual", cfg.arch.residual},
              {"allow_large", cfg.allow_large},
              {"data", std::move(data)},
              {"seed", cfg.seed},
              {"min_dim", cfg.min_dim},
              {"max_dim", cfg.max_dim},
              {"samples", cfg.samples},
              {"max_loops", cfg.max_loops},
              {"start", to_string(cfg.start)},
              {"tracker", settings_to_json(cfg.settings)}};
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  try {
    cfg.arch.dims = j.at("dims").get<std::vector<int>>();
    cfg.arch.residual = j.at("residual").get<bool>();
    cfg.allow_large = j.value("allow_large", false);
    const json& d = j.at("data");
    if (d.at("mode") == "realizable") {
      cfg.data.mode = DataMode::realizable;
      cfg.data.m = d.at("m").get<std::size_t>();
      cfg.data.seed = d.at("seed").get<std::uint64_t>();
    } else {
      cfg.data.mode = DataMode::explicit_values;
      cfg.data.x = matrix_from_json(d.at("X"));
      cfg.data.y = matrix_from_json(d.at("Y"));
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.min_dim = j.at("min_dim").get<int>();
    cfg.max_dim = j.at("max_dim").get<int>();
    cfg.samples = j.at("samples").get<int>();
    cfg.max_loops = j.at("max_loops").get<int>();
    cfg.start = parse_start_strategy(j.at("start").get<std::string>());
    cfg.settings = settings_from_json(j.at("tracker"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("archived config is incomplete: ") + e.what());
  }
  return cfg;
}

}  // namespace lnv::cli
