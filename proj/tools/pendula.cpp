#include <iostream>

#include "CLI11.hpp"
#include "app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coupled pendula as a driven two-level system"};
  app.require_subcommand(1, 1);

  pendula::Options opt;
  std::string config;
  std::string engine;
  int threads = 0;
  app.add_option("--config", config, "configuration file (omit for defaults)");
  app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  app.add_option("--engine", engine, "newton-nonlinear, newton-linear or schrodinger");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", opt.quiet, "no summary on stdout");
  app.fallthrough();

  const char* help[] = {
      "integrate one run and write the trajectory and populations",
      "Rabi scan over the pendulum splitting",
      "single Landau-Zener passage",
      "LZSM interference fan over (eps0, A)",
      "spectra, peaks and Husimi map",
      "Newton vs two-level eigenvalues",
  };
  for (std::size_t i = 0; i < pendula::kSubcommands.size(); ++i) {
    app.add_subcommand(pendula::kSubcommands[i], help[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pendula::config_error;
  }

  opt.subcommand = app.get_subcommands().front()->get_name();
  if (!config.empty()) opt.config_path = config;
  if (!engine.empty()) opt.engine = engine;
  if (app.count("--threads") > 0) opt.threads = threads;
  return pendula::dispatch(opt, std::cout, std::cerr);
}
