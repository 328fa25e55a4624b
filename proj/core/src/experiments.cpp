#include "pq/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "pq/parallel.hpp"

namespace pq {

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::newton_nonlinear: return "newton-nonlinear";
    case Engine::newton_linear: return "newton-linear";
    case Engine::schrodinger: return "schrodinger";
  }
  return "?";
}

Engine engine_from_string(std::string_view s) {
  if (s == "newton-nonlinear") return Engine::newton_nonlinear;
  if (s == "newton-linear") return Engine::newton_linear;
  if (s == "schrodinger") return Engine::schrodinger;
  throw DomainError("unknown engine '" + std::string(s) + "' (newton-nonlinear, newton-linear, schrodinger)");
}

std::string_view to_string(InitialCondition::Kind k) {
  return k == InitialCondition::Kind::single_pendulum ? "single" : "out-of-phase";
}

InitialCondition::Kind init_kind_from_string(std::string_view s) {
  if (s == "single") return InitialCondition::Kind::single_pendulum;
  if (s == "out-of-phase") return InitialCondition::Kind::out_of_phase;
  throw DomainError("unknown initial condition '" + std::string(s) + "' (single, out-of-phase)");
}

InitialCondition init_single_pendulum(double amplitude) {
  return {InitialCondition::Kind::single_pendulum, amplitude, 0.0};
}

InitialCondition init_out_of_phase(double amplitude, double relative_phase) {
  return {InitialCondition::Kind::out_of_phase, amplitude, relative_phase};
}

double out_of_phase_admixture(double eps, double Delta) {
  const double E = std::hypot(Delta, eps);
  if (E == 0.0) return 0.0;
  return 0.5 * (1.0 - std::abs(eps) / E);
}

EnvelopeState envelope_state(const InitialCondition& init, double eps_start, double Delta) {
  if (init.kind == InitialCondition::Kind::single_pendulum) {
    return {cplx(1.0, 0.0), cplx(0.0, 0.0), Basis::individual};
  }
  // Eigenvector of [[0, D/2], [D/2, -eps]] nearest Psi_-; a = D b / (2 w).
  const double p0 = out_of_phase_admixture(eps_start, Delta);
  const double w = eps_start < 0.0 ? adiabatic_eigenvalues(eps_start, Delta).w_plus
                                   : adiabatic_eigenvalues(eps_start, Delta).w_minus;
  const double sign = (Delta == 0.0 || w == 0.0) ? 1.0 : ((Delta / w) > 0.0 ? 1.0 : -1.0);
  return {sign * std::sqrt(p0) * std::polar(1.0, init.relative_phase), cplx(std::sqrt(1.0 - p0), 0.0),
          Basis::modes};
}

NewtonState newton_state(const EnvelopeState& psi, double amplitude, double omega0, Frame frame) {
  const EnvelopeState ind = to_individual(psi);
  const double m = std::max(std::abs(ind.a), std::abs(ind.b));
  NewtonState s;
  s.frame = frame;
  if (m == 0.0) return s;
  const double scale = amplitude / (2.0 * m);
  s.phi1 = 2.0 * scale * ind.a.real();
  s.phi2 = 2.0 * scale * ind.b.real();
  s.dphi1 = 2.0 * scale * omega0 * ind.a.imag();
  s.dphi2 = 2.0 * scale * omega0 * ind.b.imag();
  return s;
}

double default_lowpass_sigma(double omega0) { return 10.0 / omega0; }

namespace {

double sigma_of(const EngineSetup& setup) {
  return setup.lowpass_sigma > 0.0 ? setup.lowpass_sigma : default_lowpass_sigma(setup.omega0);
}

// Number of steps of size <= dt_max that fit a whole number of times into
// sample_dt.
std::size_t substeps(double sample_dt, double dt_max) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(sample_dt / dt_max - 1e-9)));
}

std::size_t sample_count(double t0, double t1, double sample_dt) {
  if (!(sample_dt > 0.0)) throw DomainError("sample step must be positive");
  if (!(t1 > t0)) throw DomainError("run span must be positive");
  return static_cast<std::size_t>(std::llround((t1 - t0) / sample_dt));
}

double eps_at(const EngineSetup& setup, double t) {
  if (setup.engine == Engine::newton_nonlinear) return effective_coupling(t, setup.apparatus);
  return setup.drive(t);
}

double delta_of(const EngineSetup& setup) {
  return setup.engine == Engine::newton_nonlinear ? setup.apparatus.Delta() : setup.Delta;
}

double omega0_of(const EngineSetup& setup) {
  return setup.engine == Engine::newton_nonlinear ? setup.apparatus.omega0() : setup.omega0;
}

Trajectory integrate_newton(const EngineSetup& setup, const InitialCondition& init, double t0, double t1,
                            double dt) {
  const double w0 = omega0_of(setup);
  const EnvelopeState psi = envelope_state(init, eps_at(setup, t0), delta_of(setup));
  if (setup.engine == Engine::newton_linear) {
    const double w1 = setup.omega0 + 0.5 * setup.Delta;
    const double w2 = setup.omega0 - 0.5 * setup.Delta;
    const auto& drive = setup.drive;
    auto rhs = [&](const NewtonState& s, double t) { return linear_rhs(s, drive(t), w1, w2); };
    return integrate(rhs, newton_state(psi, init.amplitude, w0, Frame::quasistatic_relative), t0, t1, dt);
  }
  if (setup.engine == Engine::newton_nonlinear) {
    const ApparatusParams& p = setup.apparatus;
    p.validate();
    const NewtonState rel = newton_state(psi, init.amplitude, w0, Frame::quasistatic_relative);
    auto rhs = [&](const NewtonState& s, double t) { return nonlinear_rhs(s, t, p); };
    return integrate(rhs, to_lab(rel, t0, p), t0, t1, dt);
  }
  throw DomainError("run_newton needs a Newton engine");
}

TimeSeries component(const Trajectory& traj, int k) {
  TimeSeries s{traj.t0, traj.dt, std::vector<double>(traj.size())};
  for (std::size_t i = 0; i < traj.size(); ++i) s.values[i] = k == 0 ? traj.samples[i].phi1 : traj.samples[i].phi2;
  return s;
}

TimeSeries decimate(const TimeSeries& s, std::size_t stride) {
  TimeSeries out{s.t0, s.dt * static_cast<double>(stride), {}};
  out.values.reserve(s.size() / stride + 1);
  for (std::size_t i = 0; i < s.size(); i += stride) out.values.push_back(s.values[i]);
  return out;
}

// Fast parts of phi1 and phi2; the lab frame still carries the quasistatic
// deflection, which the slow lowpass removes.
std::pair<TimeSeries, TimeSeries> fast_deflections(const Trajectory& traj, double sigma) {
  TimeSeries a = component(traj, 0);
  TimeSeries b = component(traj, 1);
  if (!traj.samples.empty() && traj.samples.front().frame == Frame::lab) {
    a = split_timescales(a, sigma).phi_fast;
    b = split_timescales(b, sigma).phi_fast;
  }
  return {std::move(a), std::move(b)};
}

}  // namespace

Trajectory run_newton(const EngineSetup& setup, const InitialCondition& init, double t0, double t1) {
  return integrate_newton(setup, init, t0, t1, setup.newton_dt);
}

PopulationRun newton_populations(const Trajectory& traj, Basis basis, double sigma, std::size_t stride) {
  auto [a, b] = fast_deflections(traj, sigma);
  if (basis == Basis::modes) {
    auto modes = mode_transform(a, b);
    a = std::move(modes.plus);
    b = std::move(modes.minus);
  }
  auto pops = populations({envelope_sq(a, sigma), envelope_sq(b, sigma)});
  return {decimate(pops[0], stride), decimate(pops[1], stride), basis};
}

PopulationRun envelope_populations(const EnvelopeTrajectory& traj, Basis basis, std::size_t stride) {
  PopulationRun run{{traj.t0, traj.dt * static_cast<double>(stride), {}}, {traj.t0, traj.dt * static_cast<double>(stride), {}}, basis};
  for (std::size_t i = 0; i < traj.size(); i += stride) {
    const EnvelopeState s = basis == Basis::modes ? to_modes(traj.samples[i]) : to_individual(traj.samples[i]);
    run.P_a.values.push_back(s.population_a());
    run.P_b.values.push_back(s.population_b());
  }
  return run;
}

EnvelopeTrajectory run_envelope(const EngineSetup& setup, const InitialCondition& init, double t0, double t1) {
  if (setup.engine == Engine::newton_nonlinear) throw DomainError("the envelope engine needs a TLS drive");
  const TlsHamiltonian H{setup.basis, setup.Delta, setup.drive, Gauge::as_written};
  setup.drive.require_coverage(t0, t1);
  const double dt_max = setup.tls_dt > 0.0 ? setup.tls_dt : default_tls_step(setup.Delta, setup.drive);
  const std::size_t n = substeps(t1 - t0, dt_max);
  EnvelopeState psi = envelope_state(init, setup.drive(t0), setup.Delta);
  psi = setup.basis == Basis::modes ? to_modes(psi) : to_individual(psi);
  return evolve(psi, H, t0, t1, (t1 - t0) / static_cast<double>(n));
}

PopulationRun run_populations(const EngineSetup& setup, const InitialCondition& init, double t0, double t1,
                              double sample_dt) {
  const std::size_t samples = sample_count(t0, t1, sample_dt);
  const double t_end = t0 + sample_dt * static_cast<double>(samples);

  if (setup.engine == Engine::schrodinger) {
    const TlsHamiltonian H{setup.basis, setup.Delta, setup.drive, Gauge::as_written};
    setup.drive.require_coverage(t0, t_end);
    const double dt_max = setup.tls_dt > 0.0 ? setup.tls_dt : default_tls_step(setup.Delta, setup.drive);
    const std::size_t stride = substeps(sample_dt, dt_max);
    EnvelopeState psi = envelope_state(init, setup.drive(t0), setup.Delta);
    psi = setup.basis == Basis::modes ? to_modes(psi) : to_individual(psi);

    PopulationRun run{{t0, sample_dt, {}}, {t0, sample_dt, {}}, setup.basis};
    run.P_a.values.reserve(samples + 1);
    run.P_b.values.reserve(samples + 1);
    std::size_t count = 0;
    propagate(psi, H, t0, t_end, sample_dt / static_cast<double>(stride), [&](double, const EnvelopeState& s) {
      if (count++ % stride != 0) return;
      run.P_a.values.push_back(s.population_a());
      run.P_b.values.push_back(s.population_b());
    });
    return run;
  }

  const std::size_t stride = substeps(sample_dt, setup.newton_dt);
  const Trajectory traj = integrate_newton(setup, init, t0, t_end, sample_dt / static_cast<double>(stride));
  return newton_populations(traj, setup.basis, sigma_of(setup), stride);
}

std::pair<TimeSeries, TimeSeries> reconstruct_deflections(const EnvelopeTrajectory& traj, double omega0) {
  TimeSeries a{traj.t0, traj.dt, std::vector<double>(traj.size())};
  TimeSeries b{traj.t0, traj.dt, std::vector<double>(traj.size())};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const EnvelopeState s = to_individual(traj.samples[i]);
    const cplx carrier = std::polar(1.0, -omega0 * traj.time(i));
    a.values[i] = 2.0 * (s.a * carrier).real();
    b.values[i] = 2.0 * (s.b * carrier).real();
  }
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------

std::vector<double> rabi_delta_grid(double Omega, double Omega_R, double span, int points) {
  if (points < 1) throw DomainError("rabi scan needs at least one point");
  if (points == 1) return {Omega};
  return linspace(Omega - span * Omega_R, Omega + span * Omega_R, static_cast<std::size_t>(points));
}

RabiScan run_rabi_scan(const ApparatusParams& apparatus, const RabiSettings& s, const std::vector<double>& Delta_grid,
                       unsigned threads) {
  apparatus.validate();
  RabiScan scan;
  scan.Omega = s.Omega.value_or(apparatus.magnets.Omega);
  scan.Omega_R = s.Omega_R ? *s.Omega_R : rabi_frequency(apparatus);
  if (!(scan.Omega > 0.0)) throw DomainError("rabi scan needs a rotating magnet (Omega > 0)");
  if (!(scan.Omega_R > 0.0)) throw DomainError("rabi scan needs Omega_R > 0");
  if (!(s.rabi_periods > 0.0)) throw DomainError("rabi_periods must be positive");

  const double duration = s.rabi_periods * kTwoPi / scan.Omega_R;
  const double sample_dt = kTwoPi / scan.Omega / 16.0;
  const double f_lo = 0.25 / duration;
  const double f_hi = 0.6 * rad_to_hz(scan.Omega);

  scan.points.resize(Delta_grid.size());
  parallel_for(Delta_grid.size(), threads, [&](std::size_t i) {
    const double Delta = Delta_grid[i];
    EngineSetup setup;
    setup.engine = s.engine;
    setup.omega0 = apparatus.omega0();
    setup.Delta = Delta;
    setup.drive = DriveWaveform::harmonic(s.eps0, 2.0 * scan.Omega_R, scan.Omega);
    setup.apparatus = apparatus;
    setup.apparatus.pendula.omega1 = setup.omega0 + 0.5 * Delta;
    setup.apparatus.pendula.omega2 = setup.omega0 - 0.5 * Delta;
    setup.apparatus.magnets.Omega = scan.Omega;
    setup.newton_dt = s.newton_dt;
    setup.lowpass_sigma = s.lowpass_sigma;
    setup.basis = Basis::individual;

    const auto run = run_populations(setup, init_single_pendulum(0.01), 0.0, duration, sample_dt);
    const auto [lo, hi] = std::minmax_element(run.P_b.values.begin(), run.P_b.values.end());
    const auto model = effective_rabi(Delta, scan.Omega, scan.Omega_R);
    scan.points[i] = {Delta, kTwoPi * dominant_frequency(run.P_a, f_lo, f_hi), *hi - *lo, model.Omega_eff,
                      model.visibility};
  });
  return scan;
}

// ---------------------------------------------------------------------------

double amplitude_for_lz_probability(double Delta, double Omega, double eps0, double P) {
  if (!(P > 0.0 && P < 1.0)) throw DomainError("target P_LZ must lie in (0, 1)");
  if (!(Omega > 0.0)) throw DomainError("LZ passage needs Omega > 0");
  const double v = kPi * Delta * Delta / (2.0 * std::log(1.0 / P));
  return std::hypot(v / Omega, eps0);
}

LzWindow default_lz_window(double eps0, double A, double Omega) {
  if (A < std::abs(eps0)) throw NoCrossingError("drive never crosses eps = 0 (A < |eps0|)");
  const double T = kTwoPi / Omega;
  const double t1 = std::acos(std::clamp(-eps0 / A, -1.0, 1.0)) / Omega;
  const double t2 = T - t1;
  return {0.5 * T, 0.25 * (t2 - t1)};
}

LzPassage run_lz_passage(const ApparatusParams& apparatus, const LzSettings& s, unsigned threads) {
  LzPassage out;
  const double A = s.A ? *s.A : amplitude_for_lz_probability(s.Delta, s.Omega, s.eps0, s.target_P_LZ);
  out.tls = {s.Delta, s.eps0, A, s.Omega};
  out.omega0 = s.omega0.value_or(apparatus.omega0());
  if (!(s.Omega > 0.0)) throw DomainError("LZ passage needs Omega > 0");
  const double v = sweep_velocity(s.Omega, A, s.eps0);
  out.P_LZ = lz_probability(s.Delta, v);
  out.one_minus_P_LZ = 1.0 - out.P_LZ;
  out.window = default_lz_window(s.eps0, A, s.Omega);
  if (s.window_half_width) out.window.half_width = *s.window_half_width;

  EngineSetup setup;
  setup.engine = s.engine;
  setup.omega0 = out.omega0;
  setup.Delta = s.Delta;
  setup.drive = DriveWaveform::harmonic(out.tls);
  setup.apparatus = apparatus;
  setup.newton_dt = s.newton_dt;
  setup.lowpass_sigma = s.lowpass_sigma;
  setup.basis = Basis::modes;
  if (s.engine == Engine::newton_nonlinear) throw DomainError("the LZ passage runs on newton-linear or schrodinger");

  const double T = kTwoPi / s.Omega;
  out.initial_P_plus = out_of_phase_admixture(setup.drive(0.0), s.Delta);
  out.run = run_populations(setup, init_out_of_phase(s.amplitude, s.relative_phase), 0.0, T, s.sample_dt);
  out.P_bar = window_average(out.run.P_a, out.window.center, out.window.half_width);

  if (s.phase_scan > 0) {
    std::vector<double> bars(static_cast<std::size_t>(s.phase_scan));
    parallel_for(bars.size(), threads, [&](std::size_t k) {
      const double chi = kTwoPi * static_cast<double>(k) / static_cast<double>(bars.size());
      const auto run = run_populations(setup, init_out_of_phase(s.amplitude, chi), 0.0, T, s.sample_dt);
      bars[k] = window_average(run.P_a, out.window.center, out.window.half_width);
    });
    const auto [lo, hi] = std::minmax_element(bars.begin(), bars.end());
    out.band = std::make_pair(*lo, *hi);
  }
  return out;
}

// ---------------------------------------------------------------------------

bool linear_newton_unstable(double eps0, double A, double omega0, double Delta) {
  const double w1 = omega0 + 0.5 * Delta;
  const double w2 = omega0 - 0.5 * Delta;
  const double a = std::abs(A);
  return linearized_eigenfrequencies(eps0 - a, 1.0, 1.0, w1, w2).unstable ||
         linearized_eigenfrequencies(eps0 + a, 1.0, 1.0, w1, w2).unstable;
}

FanDiagram run_lzsm_fan(const ApparatusParams& apparatus, const FanSettings& s, const std::vector<double>& eps0_grid,
                        const std::vector<double>& A_grid, unsigned threads) {
  if (eps0_grid.empty() || A_grid.empty()) throw DomainError("fan grids must not be empty");
  if (s.engine == Engine::newton_nonlinear) throw DomainError("the fan runs on newton-linear or schrodinger");
  if (!(s.Omega > 0.0)) throw DomainError("fan needs Omega > 0");
  if (s.periods < 1) throw DomainError("fan needs at least one period");

  FanDiagram fan;
  fan.eps0 = eps0_grid;
  fan.A = A_grid;
  fan.periods_averaged = s.periods;
  fan.engine = s.engine;
  const std::size_t ne = eps0_grid.size();
  const std::size_t cells = ne * A_grid.size();
  fan.P.assign(cells, 0.0);
  fan.unstable.assign(cells, 0);
  fan.P_initial.assign(cells, 0.0);

  const double omega0 = s.omega0.value_or(apparatus.omega0());
  const double span = s.periods * kTwoPi / s.Omega;
  const double sample_dt = 0.5;

  parallel_for(cells, threads, [&](std::size_t c) {
    const double eps0 = eps0_grid[c % ne];
    const double A = A_grid[c / ne];
    fan.P_initial[c] = out_of_phase_admixture(eps0 + A, s.Delta);
    if (s.engine == Engine::newton_linear && linear_newton_unstable(eps0, A, omega0, s.Delta)) {
      fan.unstable[c] = 1;
      fan.P[c] = kUnstableCell;
      return;
    }
    EngineSetup setup;
    setup.engine = s.engine;
    setup.omega0 = omega0;
    setup.Delta = s.Delta;
    setup.drive = DriveWaveform::harmonic(eps0, A, s.Omega);
    setup.newton_dt = s.newton_dt;
    setup.lowpass_sigma = s.lowpass_sigma;
    setup.basis = Basis::modes;
    const auto run = run_populations(setup, init_out_of_phase(s.amplitude, s.relative_phase), 0.0, span, sample_dt);
    const auto& v = run.P_a.values;
    fan.P[c] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  });
  return fan;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SpectraRegime r) { return r == SpectraRegime::rabi ? "rabi" : "lzsm"; }

SpectraRegime spectra_regime_from_string(std::string_view s) {
  if (s == "rabi") return SpectraRegime::rabi;
  if (s == "lzsm") return SpectraRegime::lzsm;
  throw DomainError("unknown spectra regime '" + std::string(s) + "' (rabi, lzsm)");
}

double eps_from_eigenvalue(double lambda, double Delta) {
  if (lambda == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (Delta * Delta - 4.0 * lambda * lambda) / (4.0 * lambda);
}

SpectraBundle run_spectra_comparison(const ApparatusParams& apparatus, const SpectraSettings& s, unsigned threads) {
  if (s.engine == Engine::newton_nonlinear) {
    throw DomainError("spectra runs on newton-linear or schrodinger (static repulsive coupling needs a TLS drive)");
  }
  SpectraBundle out;
  out.regime = s.regime;
  out.omega0 = s.omega0.value_or(apparatus.omega0());
  TlsParams& tls = out.tls;
  double smoothing = 0.0;
  if (s.regime == SpectraRegime::rabi) {
    ApparatusParams lower_only = apparatus;
    lower_only.magnets.upper_present = false;
    tls.Delta = s.Delta.value_or(apparatus.Delta());
    tls.Omega = s.Omega.value_or(tls.Delta);
    tls.eps0 = s.eps0.value_or(0.0);
    tls.A = s.A ? *s.A : 2.0 * rabi_frequency(lower_only);
    out.duration = s.duration.value_or(2700.0);
    smoothing = s.smoothing_sigma.value_or(1e-3);
  } else {
    tls.Delta = s.Delta.value_or(hz_to_rad(6.2e-3));
    tls.Omega = s.Omega.value_or(hz_to_rad(2.27e-3));
    tls.eps0 = s.eps0.value_or(0.1);
    tls.A = s.A.value_or(0.25);
    out.duration = s.duration.value_or(5.0 * kTwoPi / tls.Omega);
    smoothing = s.smoothing_sigma.value_or(0.025);
  }
  if (!(out.duration > 0.0)) throw DomainError("spectra duration must be positive");

  struct Case {
    const char* name;
    DriveWaveform drive;
  };
  const std::vector<Case> cases = {
      {"static-attractive", DriveWaveform::harmonic(tls.eps0 + tls.A, 0.0, 0.0)},
      {"static-repulsive", DriveWaveform::harmonic(tls.eps0 - tls.A, 0.0, 0.0)},
      {"driven", DriveWaveform::harmonic(tls)},
  };
  const bool modes = s.regime == SpectraRegime::lzsm;
  std::vector<std::array<ChannelSpectrum, 2>> results(cases.size());
  std::optional<HusimiMap> husimi_map;

  parallel_for(cases.size(), threads, [&](std::size_t i) {
    EngineSetup setup;
    setup.engine = s.engine;
    setup.omega0 = out.omega0;
    setup.Delta = tls.Delta;
    setup.drive = cases[i].drive;
    setup.newton_dt = s.newton_dt;
    setup.basis = Basis::individual;
    // The driven LZSM run starts out of phase. That start is an eigenstate of
    // a static case, so the static runs swing one pendulum to show both lines.
    const bool out_of_phase = modes && std::string_view(cases[i].name) == "driven";
    const InitialCondition init = out_of_phase ? init_out_of_phase(s.amplitude) : init_single_pendulum(s.amplitude);

    TimeSeries a, b;
    if (s.engine == Engine::schrodinger) {
      EngineSetup fine = setup;
      fine.tls_dt = std::min(default_tls_step(setup.Delta, setup.drive), 0.05);
      std::tie(a, b) = reconstruct_deflections(run_envelope(fine, init, 0.0, out.duration), out.omega0);
    } else {
      const Trajectory traj = run_newton(setup, init, 0.0, out.duration);
      a = component(traj, 0);
      b = component(traj, 1);
    }
    if (modes) {
      auto m = mode_transform(a, b);
      a = std::move(m.plus);
      b = std::move(m.minus);
    }
    const char* names[2] = {modes ? "phi_plus" : "phi1", modes ? "phi_minus" : "phi2"};
    const TimeSeries* series[2] = {&a, &b};
    for (int k = 0; k < 2; ++k) {
      ChannelSpectrum& ch = results[i][static_cast<std::size_t>(k)];
      ch.run = cases[i].name;
      ch.channel = names[k];
      ch.spectrum = spectrum(*series[k], smoothing, s.peak_threshold);
      for (const auto& p : ch.spectrum.peaks) {
        const double lambda = hz_to_rad(p.frequency) - out.omega0;
        ch.peaks.push_back({p.frequency, p.magnitude, lambda, eps_from_eigenvalue(lambda, tls.Delta)});
      }
    }
    if (modes && i == 2) {
      // Out-of-phase mode, carrier included: the ridge sits at omega0 + lambda
      // with |lambda| close to the splitting whenever |eps| >> Delta.
      const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.05 / b.dt)));
      const TimeSeries coarse = decimate(b, stride);
      const double T = kTwoPi / tls.Omega;
      const double hs = s.husimi_sigma.value_or(T / 20.0);
      const double E_max = std::hypot(tls.Delta, std::abs(tls.eps0) + std::abs(tls.A));
      husimi_map = husimi(coarse, hs, linspace(out.omega0 - 1.2 * E_max, out.omega0 + 1.2 * E_max, 241),
                          linspace(coarse.t0, coarse.t_end(), 201));
    }
  });
  for (auto& pair : results) {
    for (auto& ch : pair) out.channels.push_back(std::move(ch));
  }
  out.husimi = std::move(husimi_map);
  return out;
}

// ---------------------------------------------------------------------------

ApparatusParams eigencheck_apparatus(const ApparatusParams& base, double f_split) {
  ApparatusParams p = base;
  const double w0 = base.omega0();
  p.pendula.omega1 = w0 + 0.5 * hz_to_rad(f_split);
  p.pendula.omega2 = w0 - 0.5 * hz_to_rad(f_split);
  return p;
}

EigenTable run_eigenvalue_consistency(const ApparatusParams& apparatus, const std::vector<double>& eps_grid) {
  EigenTable table;
  table.omega0 = apparatus.omega0();
  table.Delta = apparatus.Delta();
  const double J1 = apparatus.J1();
  const double J2 = apparatus.J2();
  for (double eps : eps_grid) {
    const auto modes = linearized_eigenfrequencies(eps, J1, J2, apparatus.pendula.omega1, apparatus.pendula.omega2);
    const auto ev = adiabatic_eigenvalues(eps, table.Delta);
    EigenRow row;
    row.eps = eps;
    row.newton_hi = modes.frequencies[0];
    row.newton_lo = modes.frequencies[1];
    row.tls_plus = ev.w_plus + table.omega0;
    row.tls_minus = ev.w_minus + table.omega0;
    row.unstable = modes.unstable;
    row.deviation = row.unstable ? std::numeric_limits<double>::infinity()
                                 : std::max(std::abs(row.newton_hi.real() - row.tls_plus),
                                            std::abs(row.newton_lo.real() - row.tls_minus));
    table.max_deviation = std::max(table.max_deviation, row.deviation);
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------

std::string_view to_string(DriveSource d) { return d == DriveSource::apparatus ? "apparatus" : "explicit"; }

DriveSource drive_source_from_string(std::string_view s) {
  if (s == "apparatus") return DriveSource::apparatus;
  if (s == "explicit") return DriveSource::explicit_params;
  throw DomainError("unknown drive source '" + std::string(s) + "' (apparatus, explicit)");
}

TlsParams simulation_tls(const ApparatusParams& apparatus, const SimulateSettings& s) {
  if (s.drive == DriveSource::explicit_params) {
    return {apparatus.Delta(), s.eps0, s.A, s.Omega.value_or(apparatus.magnets.Omega)};
  }
  if (apparatus.magnets.Omega > 0.0) return effective_tls_params(apparatus);
  return {apparatus.Delta(), effective_coupling(0.0, apparatus), 0.0, 0.0};
}

Simulation run_simulation(const ApparatusParams& apparatus, const SimulateSettings& s, std::optional<double> sigma) {
  apparatus.validate();
  if (s.engine == Engine::newton_nonlinear && s.drive == DriveSource::explicit_params) {
    throw DomainError("newton-nonlinear takes its drive from the apparatus; use drive = apparatus");
  }
  if (!(s.output_dt > 0.0)) throw DomainError("output_dt must be positive");

  Simulation sim;
  sim.engine = s.engine;
  sim.tls = simulation_tls(apparatus, s);
  sim.omega0 = apparatus.omega0();

  EngineSetup setup;
  setup.engine = s.engine;
  setup.omega0 = sim.omega0;
  setup.Delta = sim.tls.Delta;
  setup.drive = DriveWaveform::harmonic(sim.tls);
  setup.apparatus = apparatus;
  setup.basis = s.basis;
  setup.lowpass_sigma = sigma.value_or(0.0);

  const std::size_t samples = sample_count(0.0, s.duration, s.output_dt);
  const double t_end = s.output_dt * static_cast<double>(samples);
  if (s.engine == Engine::schrodinger) {
    const double dt_max = default_tls_step(setup.Delta, setup.drive);
    const std::size_t stride = substeps(s.output_dt, dt_max);
    setup.tls_dt = s.output_dt / static_cast<double>(stride);
    const EnvelopeTrajectory fine = run_envelope(setup, s.init, 0.0, t_end);
    sim.populations = envelope_populations(fine, s.basis, stride);
    EnvelopeTrajectory coarse{fine.t0, s.output_dt, {}};
    for (std::size_t i = 0; i < fine.size(); i += stride) coarse.samples.push_back(fine.samples[i]);
    sim.envelope = std::move(coarse);
  } else {
    const std::size_t stride = substeps(s.output_dt, s.newton_dt);
    Trajectory fine = integrate_newton(setup, s.init, 0.0, t_end, s.output_dt / static_cast<double>(stride));
    sim.populations = newton_populations(fine, s.basis, sigma_of(setup), stride);
    Trajectory coarse{fine.t0, s.output_dt, {}};
    coarse.samples.reserve(samples + 1);
    for (std::size_t i = 0; i < fine.size(); i += stride) coarse.samples.push_back(fine.samples[i]);
    sim.newton = std::move(coarse);
  }
  return sim;
}

}  // namespace pq
