// Command-line driver: wqr <verb> [--config PATH] [--tree PATH] [--out DIR] [--seed N]
#include "wqr/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Weakly quasiregular radial-stretch constructions: build, analyse, export"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wqr::kToolVersion);

  wqr::CommandOptions opts;
  const std::pair<const char*, const char*> verbs[] = {
      {"build", "build the packing tree and write tree.json, nodes.csv, build_summary.json"},
      {"energy", "per-generation energies and the criticality sweep"},
      {"degree", "boundary degree against interior Jacobian signs"},
      {"dimension", "branching, contraction and box-count dimension of the spine"},
      {"blowup", "averages of |F| on shrinking balls along a path"},
      {"slice", "P5 graymap of |F| or log|DF| on an axis-aligned plane"},
      {"report", "build, energy, degree, blowup and dimension in one run"},
  };
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "JSON config; defaults apply when omitted")
        ->check(CLI::ExistingFile);
    if (std::string(name) != "build") {
      sub->add_option("--tree", opts.tree_path, "tree.json from a previous build")
          ->check(CLI::ExistingFile);
    }
    sub->add_option("--out", opts.out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", opts.seed, "seed (overrides the config)");
    sub->callback([&opts, name = std::string(name)] { opts.verb = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wqr::kExitConfig;
  }
  return wqr::run_command(opts, std::cout, std::cerr);
}
