#include <iostream>

#include <CLI11.hpp>

#include "ccmin/catalog.hpp"
#include "ccmin/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ccmin: constrained minimization experiments"};
  ccmin::cli::RunOptions opts;
  bool list = false;
  std::uint64_t seed = 0;
  app.add_option("--config", opts.config_path, "TOML or JSON experiment file");
  app.add_option("--out", opts.out_dir, "output directory (overrides `output`)");
  app.add_option("--set", opts.overrides, "dotted.key=value override (repeatable)");
  app.add_option("--threads", opts.threads, "worker threads for multistart solves");
  auto* seed_opt = app.add_option("--seed", seed, "solver seed (overrides solver.seed)");
  app.add_flag("--list", list, "print the built-in catalog and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ccmin::cli::kExitConfig;
  }
  if (list) {
    std::cout << ccmin::list_catalog();
    return ccmin::cli::kExitOk;
  }
  if (seed_opt->count() > 0) opts.seed = seed;
  return ccmin::cli::run(opts, std::cout, std::cerr);
}
