#pragma once

// The pendula front end minus argv handling, so tests can drive it directly.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pq/config.hpp"

namespace pendula {

inline const std::vector<std::string> kSubcommands = {"simulate", "rabi", "lz", "lzsm-fan", "spectra", "eigencheck"};

struct Options {
  std::string subcommand;
  std::optional<std::string> config_path;  // none = all defaults
  std::string out_dir = ".";
  std::optional<std::string> engine;
  std::optional<int> threads;
  bool quiet = false;
};

enum ExitCode : int { ok = 0, config_error = 1, numerical_error = 2, io_error = 3 };

int exit_code(const pq::Error& e);

// Config with command-line overrides and [signal] settings folded into the
// runner sections. Throws ConfigError.
pq::Config resolve(const Options& opt, pq::Config config);

// Runs the subcommand and writes its CSV files plus manifest.txt into
// opt.out_dir. Errors are reported on `err` and mapped to an exit code.
int dispatch(const Options& opt, std::ostream& out, std::ostream& err);

}  // namespace pendula
