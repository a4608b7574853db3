#pragma once

// The lnv subcommands. Each returns a process exit code; usage problems
// (bad config, unreadable archive, unknown component, malformed point file)
// surface as UsageError so the caller can map them to kExitUsage.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lnv/cli/archive.hpp"

namespace lnv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitFailure = 2;
inline constexpr int kExitIndeterminate = 3;
inline constexpr int kExitUsage = 64;

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<int> min_dim;
  std::optional<int> max_dim;
  std::optional<std::string> start;
  std::optional<int> samples;
  std::optional<double> corrector_tol;
  std::optional<double> final_tol;
  std::optional<std::string> out;
};

void apply(const Overrides& o, RunConfig& cfg);

int cmd_decompose(const std::string& config_path, const Overrides& o, std::ostream& log);
int cmd_analyze(const std::string& archive_path, const Overrides& o, std::ostream& log);
/// which: h1, h2, h3, res or all. res needs a plain and a residual archive.
int cmd_verify(const std::string& which, const std::vector<std::string>& archives, const Overrides& o,
               std::ostream& log);
int cmd_member(const std::string& archive_path, const std::string& id, const std::string& point_file,
               const Overrides& o, std::ostream& log);
int cmd_sample(const std::string& archive_path, const std::string& id, int count, const Overrides& o,
               std::ostream& log);
int cmd_report(const std::string& archive_path, const Overrides& o, std::ostream& log);
/// Decompose, analyze and verify the standard nets (and the stretch nets).
int cmd_paper_suite(bool stretch, const Overrides& o, std::ostream& log);

/// Whitespace-separated coordinates, each "re,im" or a real number; lines
/// starting with '#' are comments. Throws UsageError.
CVector read_point_file(const std::string& path);

/// Worst exit code of a set of verdicts: violated > indeterminate > verified.
int exit_code(const std::vector<HypothesisReport>& reports);

}  // namespace lnv::cli
