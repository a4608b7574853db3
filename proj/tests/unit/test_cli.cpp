#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "lnv/cli/archive.hpp"
#include "lnv/cli/commands.hpp"
#include "lnv/cli/config.hpp"
#include "lnv/cli/report.hpp"

using namespace lnv;
using namespace lnv::cli;
namespace fs = std::filesystem;

namespace {

const char* kOneOneOne = R"(
dims: [1, 1, 1]
data: {mode: explicit, X: [[1]], Y: [[1]]}
seed: 4
samples: 3
)";

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lnv-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Archive decompose_archive(const RunConfig& cfg) {
  Archive a;
  a.kind = "decomposition";
  a.config = cfg;
  a.problem = build_problem(cfg);
  a.decomposition = decompose(a.problem.gradient, decompose_options(cfg));
  return a;
}

}  // namespace

TEST(Config, ParsesAndValidates) {
  RunConfig c = parse_config(kOneOneOne);
  EXPECT_EQ(c.arch.dims, (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(c.data.mode, DataMode::explicit_values);
  EXPECT_EQ(c.seed, 4u);
  EXPECT_NO_THROW(c.validate());

  RunConfig r = parse_config("dims: [2, 2, 2]\nresidual: true\ntracker: {final_tol: 1e-10}\nstart: total\n");
  EXPECT_TRUE(r.arch.residual);
  EXPECT_EQ(r.data.mode, DataMode::realizable);
  EXPECT_DOUBLE_EQ(r.settings.final_tol, 1e-10);
  EXPECT_EQ(r.start, StartStrategy::total);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("residual: true"), ConfigError);
  EXPECT_THROW(parse_config("dims: [2, 2, 2]\ndata: {mode: bogus}"), ConfigError);
  EXPECT_THROW(parse_config("dims: [2, 2"), ConfigError);
  EXPECT_THROW(parse_config("dims: [2, 2, 2]\nstart: sideways"), ConfigError);
  RunConfig c = parse_config("dims: [2, 2, 2]\nmin_dim: 9");
  EXPECT_THROW(c.validate(), ConfigError);
  RunConfig d = parse_config("dims: [2, 2, 2]\ndata: {mode: explicit, X: [[1, 2]], Y: [[1, 2], [3, 4]]}");
  EXPECT_THROW(d.validate(), ConfigError);
}

TEST(Config, OverridesApply) {
  RunConfig c = parse_config(kOneOneOne);
  Overrides o;
  o.seed = 9;
  o.start = "multihom";
  o.final_tol = 1e-9;
  apply(o, c);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.start, StartStrategy::multihom);
  EXPECT_DOUBLE_EQ(c.settings.final_tol, 1e-9);
  o.start = "nowhere";
  EXPECT_THROW(apply(o, c), UsageError);
}

TEST(Config, JsonRoundTripLeavesOutRunLocalFields) {
  RunConfig c = parse_config(kOneOneOne);
  c.threads = 8;
  c.out = "/somewhere";
  const auto j = config_to_json(c);
  EXPECT_FALSE(j.contains("threads"));
  EXPECT_FALSE(j.contains("out"));
  const RunConfig back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
}

TEST(Archive, RoundTripIsByteIdentical) {
  const RunConfig cfg = parse_config(kOneOneOne);
  Archive a = decompose_archive(cfg);
  const std::string first = archive_to_json(a).dump(1);
  const Archive b = archive_from_json(nlohmann::ordered_json::parse(first));
  EXPECT_EQ(archive_to_json(b).dump(1), first);
  ASSERT_EQ(b.decomposition.components.size(), 2u);
  EXPECT_EQ(b.decomposition.components[0].witness.points, a.decomposition.components[0].witness.points);
}

TEST(Archive, AnalysisIsRecomputedFromPoints) {
  const RunConfig cfg = parse_config(kOneOneOne);
  Archive a = decompose_archive(cfg);
  a.analysis = analyze(a.decomposition, a.problem, 3, 1, cfg.settings);
  a.samples = 3;
  a.kind = "analysis";
  auto j = archive_to_json(a);
  const Archive b = archive_from_json(j);
  ASSERT_TRUE(b.analysis);
  EXPECT_EQ(verify_h2(*b.analysis).verdict, Verdict::verified);
  j["analysis"]["components"][0]["samples"][0]["point"] = {"2,0", "2,0"};
  const Archive c = archive_from_json(j);
  EXPECT_EQ(verify_h2(*c.analysis).verdict, Verdict::violated);
}

TEST(Archive, RejectsTampering) {
  const RunConfig cfg = parse_config(kOneOneOne);
  auto j = archive_to_json(decompose_archive(cfg));
  auto bad_version = j;
  bad_version["format_version"] = 99;
  EXPECT_THROW(archive_from_json(bad_version), ArchiveError);
  auto bad_system = j;
  bad_system["system"]["equations"][0][0] = "5,0 : 1 2";
  EXPECT_THROW(archive_from_json(bad_system), ArchiveError);
  auto bad_index = j;
  bad_index["components"][0]["witness_indices"] = {7};
  EXPECT_THROW(archive_from_json(bad_index), ArchiveError);
  auto missing = j;
  missing.erase("dimensions");
  EXPECT_THROW(archive_from_json(missing), ArchiveError);
}

TEST(Report, RowsGroupAndSort) {
  RunConfig cfg = parse_config("dims: [1, 1, 1, 1]\ndata: {mode: explicit, X: [[1]], Y: [[2]]}\n");
  Archive a = decompose_archive(cfg);
  a.analysis = analyze(a.decomposition, a.problem, 3, 1, cfg.settings);
  const Report r = make_report(a);
  // dim 2 deg 3 minimum, then three coordinate lines through the origin
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].dim, 2);
  EXPECT_EQ(r.rows[0].degree, 3u);
  EXPECT_EQ(r.rows[0].classification, "global_minimum");
  EXPECT_EQ(r.rows[1].dim, 1);
  EXPECT_EQ(r.rows[1].count, 3u);
  EXPECT_EQ(r.rows[1].contains_origin, "true");
  const auto j = report_to_json(r);
  EXPECT_EQ(j["components"].size(), 2u);
  EXPECT_NE(render_table(r).find("global_minimum"), std::string::npos);
}

TEST(PointFile, ParsesRealAndComplexTokens) {
  const auto dir = temp_dir("points");
  std::ofstream(dir / "p.txt") << "# comment\n1.5 0,2 -1e-3,4\n";
  const CVector p = read_point_file((dir / "p.txt").string());
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], Complex(1.5));
  EXPECT_EQ(p[1], Complex(0, 2));
  std::ofstream(dir / "bad.txt") << "1 two\n";
  EXPECT_THROW(read_point_file((dir / "bad.txt").string()), UsageError);
  std::ofstream(dir / "empty.txt") << "# nothing\n";
  EXPECT_THROW(read_point_file((dir / "empty.txt").string()), UsageError);
}

TEST(Commands, VerdictExitCodes) {
  HypothesisReport ok{"H2", Verdict::verified, {}, ""};
  HypothesisReport unsure{"H3", Verdict::indeterminate, {}, "x"};
  HypothesisReport bad{"H1", Verdict::violated, {}, ""};
  EXPECT_EQ(exit_code({ok}), kExitOk);
  EXPECT_EQ(exit_code({ok, unsure}), kExitIndeterminate);
  EXPECT_EQ(exit_code({unsure, bad}), kExitViolated);
}

TEST(Commands, DecomposeIsIdempotent) {
  const auto dir = temp_dir("idem");
  std::ofstream(dir / "c.yaml") << kOneOneOne;
  std::ostringstream log;
  Overrides o;
  o.out = (dir / "a").string();
  ASSERT_EQ(cmd_decompose((dir / "c.yaml").string(), o, log), kExitOk);
  o.out = (dir / "b").string();
  o.threads = 4;
  ASSERT_EQ(cmd_decompose((dir / "c.yaml").string(), o, log), kExitOk);
  std::ifstream fa(dir / "a" / "decomposition.json"), fb(dir / "b" / "decomposition.json");
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_TRUE(fs::exists(dir / "a" / "timings.json"));
  EXPECT_TRUE(fs::exists(dir / "a" / "report.json"));
}
