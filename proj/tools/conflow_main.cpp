#include "conflow/scenario.hpp"
#include "conflow/version.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Conical potential flow on the unit sphere: solver and comparison checks"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = ".";
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run a JSON scenario");
  run->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--quiet", quiet, "Suppress progress output");

  auto* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (version->parsed()) {
    std::cout << "conflow " << conflow::kVersion << '\n';
    return 0;
  }
  conflow::RunOptions opts;
  opts.out_dir = out_dir;
  opts.quiet = quiet;
  return conflow::run_scenario(scenario, opts, std::cout, std::cerr);
}
