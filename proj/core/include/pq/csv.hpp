#pragma once

// CSV artifacts ('.' decimal, ',' separator, LF, header row, shortest
// round-trip numbers) and the per-run manifest.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pq/experiments.hpp"

namespace pq {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws IoError if the column is missing.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
};

std::string to_csv_string(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
// Throws IoError on ragged rows, quoting or an unreadable file.
CsvTable parse_csv(std::istream& in, const std::string& source = "<csv>");
CsvTable read_csv(const std::string& path);

CsvTable trajectory_table(const Trajectory& traj);
Trajectory read_trajectory(const CsvTable& table);

CsvTable envelope_table(const EnvelopeTrajectory& traj);
EnvelopeTrajectory read_envelope(const CsvTable& table);

// Columns t, P1, P2 (individual) or t, P_plus, P_minus (modes).
CsvTable populations_table(const PopulationRun& run);
PopulationRun read_populations(const CsvTable& table);

CsvTable rabi_table(const RabiScan& scan);
std::vector<RabiPoint> read_rabi(const CsvTable& table);

// One row per cell, eps0 fastest. Unstable cells carry P_bar = -1.
CsvTable fan_table(const FanDiagram& fan);
FanDiagram read_fan(const CsvTable& table);

// Long format over runs and channels; peaks are not included.
CsvTable spectra_table(const std::vector<ChannelSpectrum>& channels);
std::vector<ChannelSpectrum> read_spectra(const CsvTable& table);

struct PeakRecord {
  std::string run;
  std::string channel;
  PeakRow peak;
};
CsvTable peaks_table(const std::vector<ChannelSpectrum>& channels);
std::vector<PeakRecord> read_peaks(const CsvTable& table);

CsvTable husimi_table(const HusimiMap& map);
HusimiMap read_husimi(const CsvTable& table);

CsvTable eigen_table(const EigenTable& table);
EigenTable read_eigen(const CsvTable& table);

struct RunManifest {
  std::string subcommand;
  std::string engine;
  std::string version;
  double elapsed_seconds = 0.0;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;  // summary lines
  std::string config;              // serialized, fully resolved
};

// Plain text. Timing lives here and nowhere in the CSV files.
void write_manifest(const std::string& path, const RunManifest& manifest);
std::string manifest_string(const RunManifest& manifest);

}  // namespace pq
