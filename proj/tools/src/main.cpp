#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lnv/cli/commands.hpp"

using namespace lnv::cli;

int main(int argc, char** argv) {
  CLI::App app{"lnv: loss landscapes of linear networks by numerical irreducible decomposition"};
  app.require_subcommand(0, 1);

  Overrides o;
  std::string config_path;
  bool paper_suite = false;
  bool stretch = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--threads", o.threads, "Tracker worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--samples", o.samples, "Samples per component")->check(CLI::Range(3, 1000));
    cmd->add_option("--out", o.out, "Output directory");
  };
  add_common(&app);
  app.add_flag("--paper-suite", paper_suite, "Decompose, analyze and verify the standard nets");
  app.add_flag("--stretch", stretch, "With --paper-suite: also run 2-2-3 and 2-2-2-1");
  app.add_option("--max-dim", o.max_dim, "Highest dimension to examine");
  app.add_option("--min-dim", o.min_dim, "Lowest dimension to examine");
  app.add_option("--start", o.start, "Start system")->check(CLI::IsMember({"total", "multihom", "auto"}));
  app.add_option("--corrector-tol", o.corrector_tol, "Newton corrector tolerance");
  app.add_option("--final-tol", o.final_tol, "Endpoint tolerance");

  auto* decompose = app.add_subcommand("decompose", "Witness sets and irreducible components of a network");
  decompose->add_option("--config", config_path, "YAML run configuration")->required();
  add_common(decompose);
  decompose->add_option("--max-dim", o.max_dim, "Highest dimension to examine");
  decompose->add_option("--min-dim", o.min_dim, "Lowest dimension to examine");
  decompose->add_option("--start", o.start, "Start system")->check(CLI::IsMember({"total", "multihom", "auto"}));
  decompose->add_option("--corrector-tol", o.corrector_tol, "Newton corrector tolerance");
  decompose->add_option("--final-tol", o.final_tol, "Endpoint tolerance");

  std::string archive;
  std::vector<std::string> archives;
  auto* analyze = app.add_subcommand("analyze", "Loss, Hessian and origin membership per component");
  analyze->add_option("archive", archive, "Decomposition archive")->required();
  add_common(analyze);

  std::string which;
  auto* verify = app.add_subcommand("verify", "Check h1, h2, h3, res or all; exit 0 verified, 1 violated, 3 indeterminate");
  verify->add_option("which", which, "h1|h2|h3|res|all")->required();
  verify->add_option("archives", archives, "One archive, or a plain and a residual archive")->required();
  add_common(verify);

  std::string id;
  std::string point_file;
  auto* member = app.add_subcommand("member", "Test whether a point lies on a component");
  member->add_option("archive", archive, "Archive")->required();
  member->add_option("id", id, "Component id")->required();
  member->add_option("point", point_file, "Point file")->required();
  add_common(member);

  int count = 1;
  auto* sample = app.add_subcommand("sample", "Generic points of a component");
  sample->add_option("archive", archive, "Archive")->required();
  sample->add_option("id", id, "Component id")->required();
  sample->add_option("--count", count, "Number of samples")->check(CLI::NonNegativeNumber);
  add_common(sample);

  auto* report = app.add_subcommand("report", "Table of components from an archive");
  report->add_option("archive", archive, "Archive")->required();
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*decompose) return cmd_decompose(config_path, o, std::cout);
    if (*analyze) return cmd_analyze(archive, o, std::cout);
    if (*verify) return cmd_verify(which, archives, o, std::cout);
    if (*member) return cmd_member(archive, id, point_file, o, std::cout);
    if (*sample) return cmd_sample(archive, id, count, o, std::cout);
    if (*report) return cmd_report(archive, o, std::cout);
    if (paper_suite) return cmd_paper_suite(stretch, o, std::cout);
    if (stretch) {
      std::cerr << "--stretch needs --paper-suite\n";
      return kExitUsage;
    }
    std::cerr << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "lnv: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "lnv: " << e.what() << "\n";
    return kExitFailure;
  }
}
