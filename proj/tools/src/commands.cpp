#include "lnv/cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lnv/cli/report.hpp"
#include "lnv/rng.hpp"

namespace lnv::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kAnalysisStream = 0xA7A1;
constexpr std::uint64_t kStrataStream = 0x57A7;
constexpr std::uint64_t kResidualStream = 0x7E5;
constexpr std::uint64_t kMemberStream = 0x3E3B;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path out_dir(const Overrides& o, const std::string& fallback) {
  fs::path dir = o.out.value_or(fallback);
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

Archive load_or_usage(const std::string& path) {
  try {
    return load_archive(path);
  } catch (const ArchiveError& e) {
    throw UsageError(e.what());
  } catch (const ConfigError& e) {
    throw UsageError(std::string("archived config: ") + e.what());
  }
}

void merge_timing(const fs::path& dir, const std::string& key, double seconds) {
  const fs::path p = dir / "timings.json";
  json t = json::object();
  if (fs::exists(p)) {
    try {
      t = read_json(p.string());
    } catch (const Error&) {
      t = json::object();
    }
  }
  t[key] = seconds;
  write_json(p.string(), t);
}

void write_report(const fs::path& dir, Report r, std::ostream& log) {
  const fs::path p = dir / "timings.json";
  if (fs::exists(p)) {
    try {
      const json t = read_json(p.string());
      for (const auto& [k, v] : t.items())
        if (v.is_number()) r.timings.emplace_back(k, v.get<double>());
    } catch (const Error&) {
    }
  }
  write_json((dir / "report.json").string(), report_to_json(r));
  const std::string table = render_table(r);
  std::ofstream((dir / "report.txt").string()) << table;
  log << table;
}

std::uint64_t analysis_seed(const Archive& a, const Overrides& o) {
  return derive_seed(o.seed.value_or(a.config.seed), kAnalysisStream);
}

/// Runs the landscape analysis in place unless the archive already has one.
void ensure_analysis(Archive& a, const Overrides& o) {
  if (a.analysis) return;
  const int samples = o.samples.value_or(a.config.samples);
  a.samples = samples;
  a.analysis_seed = analysis_seed(a, o);
  a.analysis = analyze(a.decomposition, a.problem, samples, a.analysis_seed, a.config.settings);
  annotate(a.decomposition, *a.analysis);
  a.kind = "analysis";
}

bool analysis_failed(const LandscapeAnalysis& an) {
  for (const auto& c : an.components)
    if (!c.ok()) return true;
  return false;
}

HypothesisReport run_h1(Archive& a, const Overrides& o, std::ostream& log) {
  ensure_analysis(a, o);
  const std::uint64_t seed = derive_seed(o.seed.value_or(a.config.seed), kStrataStream);
  DecomposeOptions opts = decompose_options(a.config);
  if (o.threads) opts.witness.threads = *o.threads;
  log << "computing rank strata for " << a.problem.arch.label() << "\n";
  const auto t0 = Clock::now();
  const auto strata = compute_strata(a.problem, opts, a.samples, seed);
  log << "strata done in " << seconds_since(t0) << " s\n";
  return verify_h1(a.problem, a.decomposition, *a.analysis, strata, a.config.settings, seed);
}

HypothesisReport run_res(Archive& x, Archive& y, const Overrides& o) {
  Archive* plain = &x;
  Archive* resid = &y;
  if (plain->problem.arch.residual) std::swap(plain, resid);
  if (plain->problem.arch.residual || !resid->problem.arch.residual)
    throw UsageError("res needs one plain and one residual archive");
  if (plain->problem.arch.dims != resid->problem.arch.dims || !(plain->problem.data == resid->problem.data))
    throw UsageError("res archives must share dims and data");
  const int samples = o.samples.value_or(plain->config.samples);
  return verify_residual(plain->problem, plain->decomposition, resid->problem, resid->decomposition, samples,
                         plain->config.settings, derive_seed(o.seed.value_or(plain->config.seed), kResidualStream));
}

void print_verdicts(const std::vector<HypothesisReport>& reports, std::ostream& log) {
  for (const auto& r : reports) {
    log << r.id << ": " << to_string(r.verdict);
    if (!r.stage.empty()) log << " (" << r.stage << ")";
    log << "\n";
    for (const auto& e : r.evidence)
      if (!e.pass) log << "  failed: " << e.subject << ": " << e.check << " value " << e.value << " bound " << e.bound << "\n";
  }
}

}  // namespace

void apply(const Overrides& o, RunConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.min_dim) cfg.min_dim = *o.min_dim;
  if (o.max_dim) cfg.max_dim = *o.max_dim;
  if (o.start) {
    try {
      cfg.start = parse_start_strategy(*o.start);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (o.samples) cfg.samples = *o.samples;
  if (o.corrector_tol) cfg.settings.corrector_tol = *o.corrector_tol;
  if (o.final_tol) cfg.settings.final_tol = *o.final_tol;
  if (o.out) cfg.out = *o.out;
}

int exit_code(const std::vector<HypothesisReport>& reports) {
  bool unsure = false;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::violated) return kExitViolated;
    if (r.verdict == Verdict::indeterminate) unsure = true;
  }
  return unsure ? kExitIndeterminate : kExitOk;
}

int cmd_decompose(const std::string& config_path, const Overrides& o, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    apply(o, cfg);
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = out_dir(o, cfg.out);
  Archive a;
  a.kind = "decomposition";
  a.config = cfg;
  a.problem = build_problem(cfg);
  log << "decomposing " << a.problem.arch.label() << " (" << a.problem.arch.nvars() << " variables)\n";
  const auto t0 = Clock::now();
  a.decomposition = decompose(a.problem.gradient, decompose_options(cfg));
  const double secs = seconds_since(t0);
  save_archive((dir / "decomposition.json").string(), a);
  merge_timing(dir, "decompose", secs);
  write_report(dir, make_report(a), log);
  for (const auto& d : a.decomposition.dimensions)
    if (!d.error.empty()) log << "dimension " << d.dim << ": " << d.error << "\n";
  log << "archive " << (dir / "decomposition.json").string() << "\n";
  return a.decomposition.provisional ? kExitFailure : kExitOk;
}

int cmd_analyze(const std::string& archive_path, const Overrides& o, std::ostream& log) {
  Archive a = load_or_usage(archive_path);
  if (o.samples && *o.samples < 3) throw UsageError("--samples must be at least 3");
  if (o.threads) a.config.threads = *o.threads;
  const fs::path dir = out_dir(o, fs::path(archive_path).parent_path().string());
  a.analysis.reset();
  const auto t0 = Clock::now();
  ensure_analysis(a, o);
  merge_timing(dir, "analyze", seconds_since(t0));
  save_archive((dir / "analysis.json").string(), a);
  Report r = make_report(a);
  r.hypotheses = {verify_h2(*a.analysis), verify_h3(*a.analysis)};
  write_report(dir, std::move(r), log);
  log << "archive " << (dir / "analysis.json").string() << "\n";
  return analysis_failed(*a.analysis) || a.decomposition.provisional ? kExitFailure : kExitOk;
}

int cmd_verify(const std::string& which, const std::vector<std::string>& archives, const Overrides& o,
               std::ostream& log) {
  if (which != "h1" && which != "h2" && which != "h3" && which != "res" && which != "all")
    throw UsageError("verify expects one of h1, h2, h3, res, all");
  if (archives.empty() || archives.size() > 2) throw UsageError("verify takes one or two archives");
  if (which == "res" && archives.size() != 2) throw UsageError("verify res needs a plain and a residual archive");
  if (which != "res" && which != "all" && archives.size() != 1)
    throw UsageError("verify " + which + " takes one archive");

  std::vector<Archive> loaded;
  for (const auto& p : archives) loaded.push_back(load_or_usage(p));
  const fs::path dir = out_dir(o, fs::path(archives.front()).parent_path().string());

  std::vector<HypothesisReport> reports;
  const auto tag = [&](HypothesisReport r, const Archive& a) {
    if (loaded.size() > 1) r.id += " " + a.problem.arch.label();
    reports.push_back(std::move(r));
  };
  try {
    for (auto& a : loaded) {
      if (which == "h2" || which == "h3" || which == "all") {
        ensure_analysis(a, o);
        if (which != "h3") tag(verify_h2(*a.analysis), a);
        if (which != "h2") tag(verify_h3(*a.analysis), a);
      }
      // the rank ordering is checked on the plain network of a pair
      if (which == "h1" || (which == "all" && !(loaded.size() == 2 && a.problem.arch.residual)))
        tag(run_h1(a, o, log), a);
    }
    if (which == "res" || (which == "all" && loaded.size() == 2)) reports.push_back(run_res(loaded[0], loaded[1], o));
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    HypothesisReport r;
    r.id = which;
    r.verdict = Verdict::indeterminate;
    r.stage = e.what();
    reports.push_back(std::move(r));
  }

  json out{{"format_version", kFormatVersion}, {"archives", archives}, {"hypotheses", json::array()}};
  for (const auto& r : reports) out["hypotheses"].push_back(hypothesis_to_json(r));
  write_json((dir / "verify.json").string(), out);
  print_verdicts(reports, log);
  return exit_code(reports);
}

CVector read_point_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read point file " + path);
  CVector p;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      try {
        p.push_back(tok.find(',') == std::string::npos ? parse_complex(tok + ",0") : parse_complex(tok));
      } catch (const Error& e) {
        throw UsageError("malformed coordinate '" + tok + "' in " + path);
      }
    }
    if (!p.empty()) break;
  }
  if (p.empty()) throw UsageError("point file " + path + " has no coordinates");
  return p;
}

int cmd_member(const std::string& archive_path, const std::string& id, const std::string& point_file,
               const Overrides& o, std::ostream& log) {
  const Archive a = load_or_usage(archive_path);
  const IrreducibleComponent* comp = a.decomposition.find(id);
  if (!comp) throw UsageError("unknown component id " + id);
  const CVector p = read_point_file(point_file);
  if (p.size() != a.problem.arch.nvars())
    throw UsageError("point has " + std::to_string(p.size()) + " coordinates, expected " +
                     std::to_string(a.problem.arch.nvars()));
  const Membership m =
      membership_test(p, *comp, a.config.settings, derive_seed(o.seed.value_or(a.config.seed), kMemberStream));
  log << to_string(m) << "\n";
  switch (m) {
    case Membership::member: return kExitOk;
    case Membership::not_member: return kExitViolated;
    case Membership::indeterminate: return kExitIndeterminate;
  }
  return kExitIndeterminate;
}

int cmd_sample(const std::string& archive_path, const std::string& id, int count, const Overrides& o,
               std::ostream& log) {
  if (count < 0) throw UsageError("--count must be nonnegative");
  const Archive a = load_or_usage(archive_path);
  const IrreducibleComponent* comp = a.decomposition.find(id);
  if (!comp) throw UsageError("unknown component id " + id);
  const fs::path dir = out_dir(o, fs::path(archive_path).parent_path().string());
  const fs::path file = dir / ("samples-" + id + ".txt");
  const std::uint64_t seed = o.seed.value_or(a.config.seed);
  std::ostringstream body;
  int status = kExitOk;
  for (int k = 0; k < count; ++k) {
    try {
      const CVector p = sample_point(*comp, derive_seed(seed, static_cast<std::uint64_t>(k)), a.config.settings);
      body << "# sample " << k << " gradient residual " << scaled_residual(a.problem.gradient, p) << "\n";
      for (std::size_t i = 0; i < p.size(); ++i) body << (i ? " " : "") << format_complex(p[i]);
      body << "\n";
    } catch (const Error& e) {
      body << "# sample " << k << " failed: " << e.what() << "\n";
      status = kExitFailure;
    }
  }
  std::ofstream(file.string(), std::ios::binary | std::ios::trunc) << body.str();
  log << count << " samples of " << id << " written to " << file.string() << "\n";
  return status;
}

int cmd_report(const std::string& archive_path, const Overrides& o, std::ostream& log) {
  const Archive a = load_or_usage(archive_path);
  const fs::path dir = out_dir(o, fs::path(archive_path).parent_path().string());
  Report r = make_report(a);
  if (a.analysis) r.hypotheses = {verify_h2(*a.analysis), verify_h3(*a.analysis)};
  write_report(dir, std::move(r), log);
  return kExitOk;
}

int cmd_paper_suite(bool stretch, const Overrides& o, std::ostream& log) {
  struct Net {
    std::vector<int> dims;
    bool residual = false;
    bool h1 = false;
    std::optional<StartStrategy> start;
  };
  std::vector<Net> nets = {{{1, 1, 1, 1, 1}, false, false, std::nullopt},
                           {{2, 1, 2}, false, false, std::nullopt},
                           {{2, 2, 2}, false, true, std::nullopt},
                           {{2, 2, 2}, true, false, std::nullopt}};
  if (stretch) {
    nets.push_back({{2, 2, 3}, false, false, std::nullopt});
    nets.push_back({{2, 2, 2, 1}, false, false, StartStrategy::multihom});
  }
  const fs::path root = out_dir(o, "lnv-paper-suite");
  int worst = kExitOk;
  const auto note = [&](int code) {
    // failures outrank verdicts; among verdicts violated outranks indeterminate
    const auto rank = [](int c) { return c == kExitFailure ? 3 : c == kExitViolated ? 2 : c == kExitIndeterminate ? 1 : 0; };
    if (rank(code) > rank(worst)) worst = code;
  };
  std::vector<Archive> pair;
  for (const auto& net : nets) {
    RunConfig cfg;
    cfg.arch.dims = net.dims;
    cfg.arch.residual = net.residual;
    if (net.start) cfg.start = *net.start;
    apply(o, cfg);
    std::string name;
    for (int d : cfg.arch.dims) name += (name.empty() ? "" : "-") + std::to_string(d);
    if (cfg.arch.residual) name += "-residual";
    const fs::path dir = root / name;
    fs::create_directories(dir);
    cfg.out = dir.string();
    cfg.validate();
    Archive a;
    a.kind = "decomposition";
    a.config = cfg;
    a.problem = build_problem(cfg);
    log << "== " << a.problem.arch.label() << "\n";
    auto t0 = Clock::now();
    a.decomposition = decompose(a.problem.gradient, decompose_options(cfg));
    merge_timing(dir, "decompose", seconds_since(t0));
    save_archive((dir / "decomposition.json").string(), a);
    if (a.decomposition.provisional) note(kExitFailure);
    t0 = Clock::now();
    Overrides local = o;
    local.out = dir.string();
    ensure_analysis(a, local);
    merge_timing(dir, "analyze", seconds_since(t0));
    save_archive((dir / "analysis.json").string(), a);
    if (analysis_failed(*a.analysis)) note(kExitFailure);
    Report r = make_report(a);
    r.hypotheses = {verify_h2(*a.analysis), verify_h3(*a.analysis)};
    if (net.h1) {
      t0 = Clock::now();
      try {
        r.hypotheses.push_back(run_h1(a, local, log));
      } catch (const Error& e) {
        r.hypotheses.push_back({"H1", Verdict::indeterminate, {}, e.what()});
      }
      merge_timing(dir, "h1", seconds_since(t0));
    }
    note(exit_code(r.hypotheses));
    write_report(dir, std::move(r), log);
    if (net.dims == std::vector<int>{2, 2, 2}) pair.push_back(std::move(a));
  }
  if (pair.size() == 2) {
    log << "== residual equivalence 2-2-2\n";
    HypothesisReport res;
    try {
      res = run_res(pair[0], pair[1], o);
    } catch (const Error& e) {
      res = {"RES", Verdict::indeterminate, {}, e.what()};
    }
    print_verdicts({res}, log);
    write_json((root / "residual-equivalence.json").string(), hypothesis_to_json(res));
    note(exit_code({res}));
  }
  return worst;
}

}  // namespace lnv::cli
