#pragma once

// Sectioned "key = value unit" configuration files.
//
//   [apparatus]
//   L = 454 mm
//   f1 = 0.53365 Hz
//
// Dimensional keys require a unit; values are converted once to SI with
// angular frequencies in rad/s. serialize() writes canonical units with
// shortest round-trip numbers, so parse(serialize(c)) == c.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pq/experiments.hpp"
#include "pq/model.hpp"

namespace pq {

struct RunSettings {
  int threads = 0;  // 0 = hardware concurrency

  bool operator==(const RunSettings&) const = default;
};

struct SignalSettings {
  std::optional<double> lowpass_sigma;  // s, default 10 / omega0
  std::optional<double> husimi_sigma;   // s
  double peak_threshold = kDefaultPeakThreshold;

  bool operator==(const SignalSettings&) const = default;
};

struct Config {
  ApparatusParams apparatus;
  RunSettings run;
  SimulateSettings simulate;
  RabiSettings rabi;
  LzSettings lz;
  FanSettings fan;
  SpectraSettings spectra;
  EigencheckSettings eigencheck;
  SignalSettings signal;

  bool operator==(const Config&) const = default;
};

// `source` names the input in diagnostics ("<file>:<line>: [section] key: ...").
// Throws ConfigError for syntax, unknown keys, unit problems and values
// outside their domain.
Config parse_config(std::istream& in, const std::string& source = "<config>");
Config parse_config_string(const std::string& text, const std::string& source = "<config>");
// Throws IoError if the file cannot be read.
Config parse_config_file(const std::string& path);

std::string serialize(const Config& config);

// Checks every section; throws ConfigError naming the key.
void validate(const Config& config);

// Grids implied by the configuration.
std::vector<double> fan_eps0_grid(const FanSettings& s);
std::vector<double> fan_A_grid(const FanSettings& s);
std::vector<double> eigencheck_eps_grid(const EigencheckSettings& s, double omega0);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace pq
