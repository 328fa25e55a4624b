#include "pq/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "pq/config.hpp"

namespace pq {

namespace {

std::string num(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Uniform grid parameters from a time column.
std::pair<double, double> grid_of(const CsvTable& t, std::size_t col) {
  if (t.rows.empty()) throw IoError("CSV has no data rows");
  const double t0 = t.number(0, col);
  const double dt = t.rows.size() > 1 ? t.number(1, col) - t0 : 0.0;
  return {t0, dt};
}

void require_header(const CsvTable& t, const std::vector<std::string>& expected) {
  if (t.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw IoError("unexpected CSV header (want " + want + ")");
  }
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("CSV column '" + std::string(name) + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw IoError("CSV row " + std::to_string(row + 2) + ": invalid number '" + s + "' in column " + header.at(col));
  }
  return v;
}

std::string to_csv_string(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << to_csv_string(table);
  if (!out) throw IoError("write failed for '" + path + "'");
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.find('"') != std::string::npos) throw IoError(source + ":" + std::to_string(n) + ": quoted fields are not supported");
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw IoError(source + ":" + std::to_string(n) + ": expected " + std::to_string(t.header.size()) + " fields, got " +
                    std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw IoError(source + ": missing header row");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

// ---------------------------------------------------------------------------

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t{{"t", "phi1", "phi2", "dphi1", "dphi2", "frame"}, {}};
  t.rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.samples[i];
    t.rows.push_back({num(traj.time(i)), num(s.phi1), num(s.phi2), num(s.dphi1), num(s.dphi2),
                      std::string(to_string(s.frame))});
  }
  return t;
}

Trajectory read_trajectory(const CsvTable& t) {
  require_header(t, {"t", "phi1", "phi2", "dphi1", "dphi2", "frame"});
  auto [t0, dt] = grid_of(t, 0);
  Trajectory traj{t0, dt, {}};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    NewtonState s{t.number(i, 1), t.number(i, 2), t.number(i, 3), t.number(i, 4), frame_from_string(t.rows[i][5])};
    traj.samples.push_back(s);
  }
  return traj;
}

CsvTable envelope_table(const EnvelopeTrajectory& traj) {
  CsvTable t{{"t", "re_a", "im_a", "re_b", "im_b", "basis"}, {}};
  t.rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.samples[i];
    t.rows.push_back({num(traj.time(i)), num(s.a.real()), num(s.a.imag()), num(s.b.real()), num(s.b.imag()),
                      std::string(to_string(s.basis))});
  }
  return t;
}

EnvelopeTrajectory read_envelope(const CsvTable& t) {
  require_header(t, {"t", "re_a", "im_a", "re_b", "im_b", "basis"});
  auto [t0, dt] = grid_of(t, 0);
  EnvelopeTrajectory traj{t0, dt, {}};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    traj.samples.push_back({cplx(t.number(i, 1), t.number(i, 2)), cplx(t.number(i, 3), t.number(i, 4)),
                            basis_from_string(t.rows[i][5])});
  }
  return traj;
}

CsvTable populations_table(const PopulationRun& run) {
  const bool modes = run.basis == Basis::modes;
  CsvTable t{{"t", modes ? "P_plus" : "P1", modes ? "P_minus" : "P2"}, {}};
  require_same_grid(run.P_a, run.P_b);
  for (std::size_t i = 0; i < run.P_a.size(); ++i) {
    t.rows.push_back({num(run.P_a.time(i)), num(run.P_a.values[i]), num(run.P_b.values[i])});
  }
  return t;
}

PopulationRun read_populations(const CsvTable& t) {
  PopulationRun run;
  if (t.header == std::vector<std::string>{"t", "P_plus", "P_minus"}) {
    run.basis = Basis::modes;
  } else {
    require_header(t, {"t", "P1", "P2"});
    run.basis = Basis::individual;
  }
  auto [t0, dt] = grid_of(t, 0);
  run.P_a = {t0, dt, {}};
  run.P_b = {t0, dt, {}};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    run.P_a.values.push_back(t.number(i, 1));
    run.P_b.values.push_back(t.number(i, 2));
  }
  return run;
}

CsvTable rabi_table(const RabiScan& scan) {
  CsvTable t{{"delta", "omega_eff", "visibility", "omega_eff_model", "visibility_model"}, {}};
  for (const auto& p : scan.points) {
    t.rows.push_back({num(p.Delta), num(p.Omega_eff), num(p.visibility), num(p.Omega_eff_model),
                      num(p.visibility_model)});
  }
  return t;
}

std::vector<RabiPoint> read_rabi(const CsvTable& t) {
  require_header(t, {"delta", "omega_eff", "visibility", "omega_eff_model", "visibility_model"});
  std::vector<RabiPoint> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({t.number(i, 0), t.number(i, 1), t.number(i, 2), t.number(i, 3), t.number(i, 4)});
  }
  return out;
}

CsvTable fan_table(const FanDiagram& fan) {
  CsvTable t{{"eps0", "A", "P_bar", "P_initial", "unstable"}, {}};
  for (std::size_t ia = 0; ia < fan.A.size(); ++ia) {
    for (std::size_t ie = 0; ie < fan.eps0.size(); ++ie) {
      const std::size_t c = ia * fan.eps0.size() + ie;
      t.rows.push_back({num(fan.eps0[ie]), num(fan.A[ia]), num(fan.P[c]), num(fan.P_initial[c]),
                        fan.unstable[c] ? "1" : "0"});
    }
  }
  return t;
}

FanDiagram read_fan(const CsvTable& t) {
  require_header(t, {"eps0", "A", "P_bar", "P_initial", "unstable"});
  FanDiagram fan;
  // eps0 runs fastest, so the grid ends where eps0 first repeats.
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double e = t.number(i, 0);
    if (!fan.eps0.empty() && e == fan.eps0.front()) break;
    fan.eps0.push_back(e);
  }
  if (fan.eps0.empty() || t.rows.size() % fan.eps0.size() != 0) throw IoError("fan CSV is not a full grid");
  for (std::size_t i = 0; i < t.rows.size(); i += fan.eps0.size()) fan.A.push_back(t.number(i, 1));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    fan.P.push_back(t.number(i, 2));
    fan.P_initial.push_back(t.number(i, 3));
    fan.unstable.push_back(t.rows[i][4] == "1" ? 1 : 0);
  }
  return fan;
}

CsvTable spectra_table(const std::vector<ChannelSpectrum>& channels) {
  CsvTable t{{"run", "channel", "freq_hz", "magnitude", "smoothed"}, {}};
  for (const auto& ch : channels) {
    const auto& s = ch.spectrum;
    for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
      t.rows.push_back({ch.run, ch.channel, num(s.frequencies[i]), num(s.magnitudes[i]), num(s.smoothed[i])});
    }
  }
  return t;
}

std::vector<ChannelSpectrum> read_spectra(const CsvTable& t) {
  require_header(t, {"run", "channel", "freq_hz", "magnitude", "smoothed"});
  std::vector<ChannelSpectrum> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    if (out.empty() || out.back().run != r[0] || out.back().channel != r[1]) {
      out.push_back({r[0], r[1], {}, {}});
    }
    auto& s = out.back().spectrum;
    s.frequencies.push_back(t.number(i, 2));
    s.magnitudes.push_back(t.number(i, 3));
    s.smoothed.push_back(t.number(i, 4));
  }
  return out;
}

CsvTable peaks_table(const std::vector<ChannelSpectrum>& channels) {
  CsvTable t{{"run", "channel", "freq_hz", "magnitude", "lambda", "eps_inferred"}, {}};
  for (const auto& ch : channels) {
    for (const auto& p : ch.peaks) {
      t.rows.push_back({ch.run, ch.channel, num(p.frequency), num(p.magnitude), num(p.lambda), num(p.eps_inferred)});
    }
  }
  return t;
}

std::vector<PeakRecord> read_peaks(const CsvTable& t) {
  require_header(t, {"run", "channel", "freq_hz", "magnitude", "lambda", "eps_inferred"});
  std::vector<PeakRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out.push_back({t.rows[i][0], t.rows[i][1], {t.number(i, 2), t.number(i, 3), t.number(i, 4), t.number(i, 5)}});
  }
  return out;
}

CsvTable husimi_table(const HusimiMap& map) {
  CsvTable t{{"t", "omega", "Q"}, {}};
  t.rows.reserve(map.Q.size());
  for (std::size_t i = 0; i < map.t.size(); ++i) {
    for (std::size_t j = 0; j < map.omega.size(); ++j) {
      t.rows.push_back({num(map.t[i]), num(map.omega[j]), num(map.at(i, j))});
    }
  }
  return t;
}

HusimiMap read_husimi(const CsvTable& t) {
  require_header(t, {"t", "omega", "Q"});
  HusimiMap map;
  if (t.rows.empty()) throw IoError("Husimi CSV has no data rows");
  const double t_first = t.number(0, 0);
  for (std::size_t i = 0; i < t.rows.size() && t.number(i, 0) == t_first; ++i) map.omega.push_back(t.number(i, 1));
  if (t.rows.size() % map.omega.size() != 0) throw IoError("Husimi CSV is not a full grid");
  for (std::size_t i = 0; i < t.rows.size(); i += map.omega.size()) map.t.push_back(t.number(i, 0));
  for (std::size_t i = 0; i < t.rows.size(); ++i) map.Q.push_back(t.number(i, 2));
  return map;
}

CsvTable eigen_table(const EigenTable& table) {
  CsvTable t{{"eps", "newton_hi_re", "newton_hi_im", "newton_lo_re", "newton_lo_im", "tls_plus", "tls_minus",
              "deviation", "unstable"},
             {}};
  for (const auto& r : table.rows) {
    t.rows.push_back({num(r.eps), num(r.newton_hi.real()), num(r.newton_hi.imag()), num(r.newton_lo.real()),
                      num(r.newton_lo.imag()), num(r.tls_plus), num(r.tls_minus), num(r.deviation),
                      r.unstable ? "1" : "0"});
  }
  return t;
}

EigenTable read_eigen(const CsvTable& t) {
  require_header(t, {"eps", "newton_hi_re", "newton_hi_im", "newton_lo_re", "newton_lo_im", "tls_plus", "tls_minus",
                     "deviation", "unstable"});
  EigenTable table;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EigenRow r;
    r.eps = t.number(i, 0);
    r.newton_hi = {t.number(i, 1), t.number(i, 2)};
    r.newton_lo = {t.number(i, 3), t.number(i, 4)};
    r.tls_plus = t.number(i, 5);
    r.tls_minus = t.number(i, 6);
    r.deviation = t.number(i, 7);
    r.unstable = t.rows[i][8] == "1";
    table.max_deviation = std::max(table.max_deviation, r.deviation);
    table.rows.push_back(r);
  }
  return table;
}

// ---------------------------------------------------------------------------

std::string manifest_string(const RunManifest& m) {
  std::ostringstream out;
  out << "# pendula run manifest\n";
  out << "subcommand: " << m.subcommand << '\n';
  out << "engine: " << m.engine << '\n';
  out << "version: " << m.version << '\n';
  out << "determinism: no random numbers; identical config gives byte-identical CSV output\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", m.elapsed_seconds);
  out << "elapsed_s: " << buf << '\n';
  out << "outputs:\n";
  for (const auto& o : m.outputs) out << "  " << o << '\n';
  if (!m.notes.empty()) {
    out << "summary:\n";
    for (const auto& n : m.notes) out << "  " << n << '\n';
  }
  out << "config:\n";
  std::istringstream cfg(m.config);
  std::string line;
  while (std::getline(cfg, line)) out << "  " << line << '\n';
  return out.str();
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << manifest_string(manifest);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace pq
