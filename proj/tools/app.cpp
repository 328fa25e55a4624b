#include "app.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "pq/csv.hpp"
#include "pq/error.hpp"
#include "pq/experiments.hpp"
#include "pq/units.hpp"

namespace pendula {

namespace fs = std::filesystem;
using namespace pq;

namespace {

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Run {
  std::vector<std::pair<std::string, CsvTable>> files;
  std::vector<std::string> notes;
  std::string engine;
};

Run simulate(const Config& c, unsigned) {
  const Simulation sim = run_simulation(c.apparatus, c.simulate, c.signal.lowpass_sigma);
  Run r;
  r.engine = std::string(to_string(sim.engine));
  if (sim.newton) r.files.emplace_back("trajectory.csv", trajectory_table(*sim.newton));
  if (sim.envelope) r.files.emplace_back("envelope.csv", envelope_table(*sim.envelope));
  r.files.emplace_back("populations.csv", populations_table(sim.populations));
  r.notes.push_back(fmt("omega0 = %.6g rad/s", sim.omega0));
  r.notes.push_back(fmt("Delta = %.6g rad/s", sim.tls.Delta));
  r.notes.push_back(fmt("eps0 = %.6g rad/s", sim.tls.eps0) + fmt(", A = %.6g rad/s", sim.tls.A) +
                    fmt(", Omega = %.6g rad/s", sim.tls.Omega));
  return r;
}

Run rabi(const Config& c, unsigned threads) {
  const RabiSettings& s = c.rabi;
  const double Omega = s.Omega.value_or(c.apparatus.magnets.Omega);
  const double Omega_R = s.Omega_R ? *s.Omega_R : rabi_frequency(c.apparatus);
  const RabiScan scan = run_rabi_scan(c.apparatus, s, rabi_delta_grid(Omega, Omega_R, s.detuning_span, s.points), threads);
  double sq = 0.0;
  double vis = 0.0;
  for (const auto& p : scan.points) {
    sq += std::pow(p.Omega_eff / p.Omega_eff_model - 1.0, 2);
    vis = std::max(vis, std::abs(p.visibility - p.visibility_model));
  }
  Run r;
  r.engine = std::string(to_string(s.engine));
  r.files.emplace_back("rabi.csv", rabi_table(scan));
  r.notes.push_back(fmt("Omega_R/2pi = %.4g mHz", rad_to_hz(scan.Omega_R) * 1e3));
  r.notes.push_back(fmt("Omega/2pi = %.4g mHz", rad_to_hz(scan.Omega) * 1e3));
  r.notes.push_back(fmt("Omega_eff rms relative deviation from model %.4f", std::sqrt(sq / scan.points.size())));
  r.notes.push_back(fmt("max |visibility - model| %.4f", vis));
  return r;
}

Run lz(const Config& c, unsigned threads) {
  const LzPassage p = run_lz_passage(c.apparatus, c.lz, threads);
  Run r;
  r.engine = std::string(to_string(c.lz.engine));
  r.files.emplace_back("populations.csv", populations_table(p.run));
  r.notes.push_back(fmt("A = %.6g rad/s", p.tls.A));
  r.notes.push_back(fmt("P_LZ = %.4f", p.P_LZ) + fmt(", 1 - P_LZ = %.4f", p.one_minus_P_LZ));
  r.notes.push_back(fmt("initial P_plus = %.4f", p.initial_P_plus));
  r.notes.push_back(fmt("window %.1f s", p.window.center) + fmt(" +- %.1f s", p.window.half_width));
  r.notes.push_back(fmt("mean P_plus in window = %.4f", p.P_bar));
  if (p.band) r.notes.push_back(fmt("phase-scan band [%.4f", p.band->first) + fmt(", %.4f]", p.band->second));
  return r;
}

Run fan(const Config& c, unsigned threads) {
  const FanDiagram f = run_lzsm_fan(c.apparatus, c.fan, fan_eps0_grid(c.fan), fan_A_grid(c.fan), threads);
  std::size_t unstable = 0;
  for (char u : f.unstable) unstable += u != 0;
  Run r;
  r.engine = std::string(to_string(f.engine));
  r.files.emplace_back("fan.csv", fan_table(f));
  r.notes.push_back(std::to_string(f.eps0.size()) + " x " + std::to_string(f.A.size()) + " cells, " +
                    std::to_string(unstable) + " unstable");
  r.notes.push_back("periods averaged: " + std::to_string(f.periods_averaged));
  return r;
}

Run spectra(const Config& c, unsigned threads) {
  const SpectraBundle b = run_spectra_comparison(c.apparatus, c.spectra, threads);
  Run r;
  r.engine = std::string(to_string(c.spectra.engine));
  r.files.emplace_back("spectra.csv", spectra_table(b.channels));
  r.files.emplace_back("peaks.csv", peaks_table(b.channels));
  if (b.husimi) r.files.emplace_back("husimi.csv", husimi_table(*b.husimi));
  r.notes.push_back("regime: " + std::string(to_string(b.regime)));
  r.notes.push_back(fmt("Delta = %.6g rad/s", b.tls.Delta) + fmt(", eps0 = %.6g rad/s", b.tls.eps0) +
                    fmt(", A = %.6g rad/s", b.tls.A));
  r.notes.push_back(fmt("duration %.1f s", b.duration));
  for (const auto& ch : b.channels) {
    std::string line = ch.run + " " + ch.channel + ":";
    for (const auto& pk : ch.peaks) line += fmt(" %.5g Hz", pk.frequency);
    r.notes.push_back(line);
  }
  return r;
}

Run eigencheck(const Config& c, unsigned) {
  const ApparatusParams ap = eigencheck_apparatus(c.apparatus, c.eigencheck.f_split);
  const EigenTable t = run_eigenvalue_consistency(ap, eigencheck_eps_grid(c.eigencheck, ap.omega0()));
  Run r;
  r.engine = "newton-linear vs schrodinger";
  r.files.emplace_back("eigen.csv", eigen_table(t));
  r.notes.push_back(fmt("omega0 = %.6g rad/s", t.omega0) + fmt(", Delta = %.6g rad/s", t.Delta));
  r.notes.push_back(fmt("max deviation = %.3e omega0", t.max_deviation / t.omega0));
  return r;
}

}  // namespace

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::config: return config_error;
    case Error::Category::numerical: return numerical_error;
    case Error::Category::io: return io_error;
  }
  return config_error;
}

Config resolve(const Options& opt, Config c) {
  if (opt.threads) {
    if (*opt.threads < 0) throw ConfigError("--threads must be >= 0");
    c.run.threads = *opt.threads;
  }
  if (opt.engine) {
    Engine e;
    try {
      e = engine_from_string(*opt.engine);
    } catch (const DomainError& ex) {
      throw ConfigError(std::string("--engine: ") + ex.what());
    }
    const std::string& sub = opt.subcommand;
    if (sub == "simulate") c.simulate.engine = e;
    else if (sub == "rabi") c.rabi.engine = e;
    else if (sub == "lz") c.lz.engine = e;
    else if (sub == "lzsm-fan") c.fan.engine = e;
    else if (sub == "spectra") c.spectra.engine = e;
    else throw ConfigError("--engine does not apply to " + sub);
  }
  if (c.signal.lowpass_sigma) {
    c.rabi.lowpass_sigma = *c.signal.lowpass_sigma;
    c.lz.lowpass_sigma = *c.signal.lowpass_sigma;
    c.fan.lowpass_sigma = *c.signal.lowpass_sigma;
  }
  if (c.signal.husimi_sigma) c.spectra.husimi_sigma = c.signal.husimi_sigma;
  c.spectra.peak_threshold = c.signal.peak_threshold;
  validate(c);
  return c;
}

int dispatch(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    Run (*runner)(const Config&, unsigned) = nullptr;
    if (opt.subcommand == "simulate") runner = simulate;
    else if (opt.subcommand == "rabi") runner = rabi;
    else if (opt.subcommand == "lz") runner = lz;
    else if (opt.subcommand == "lzsm-fan") runner = fan;
    else if (opt.subcommand == "spectra") runner = spectra;
    else if (opt.subcommand == "eigencheck") runner = eigencheck;
    else throw ConfigError("unknown subcommand '" + opt.subcommand + "'");

    const Config config = resolve(opt, opt.config_path ? parse_config_file(*opt.config_path) : Config{});
    const Run run = runner(config, static_cast<unsigned>(config.run.threads));

    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create '" + opt.out_dir + "': " + ec.message());

    RunManifest m;
    m.subcommand = opt.subcommand;
    m.engine = run.engine;
    m.version = PQ_VERSION;
    m.notes = run.notes;
    m.config = serialize(config);
    for (const auto& [name, table] : run.files) {
      write_csv((fs::path(opt.out_dir) / name).string(), table);
      m.outputs.push_back(name);
    }
    m.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.outputs.push_back("manifest.txt");
    write_manifest((fs::path(opt.out_dir) / "manifest.txt").string(), m);

    if (!opt.quiet) {
      out << opt.subcommand << " (" << run.engine << ")\n";
      for (const auto& n : run.notes) out << "  " << n << '\n';
      out << "  wrote";
      for (const auto& o : m.outputs) out << ' ' << o;
      out << " to " << opt.out_dir << '\n';
    }
    return ok;
  } catch (const Error& e) {
    err << "pendula " << opt.subcommand << ": " << e.what() << '\n';
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    err << "pendula " << opt.subcommand << ": " << e.what() << '\n';
    return io_error;
  }
}

}  // namespace pendula
