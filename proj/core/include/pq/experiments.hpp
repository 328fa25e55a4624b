#pragma once

// Scenario runners: Rabi scans, single Landau-Zener passages, LZSM fan
// diagrams, regime-comparison spectra and the eigenvalue consistency table.
// Every runner works on either the envelope (Schrodinger) engine or a Newton
// engine followed by the signal chain.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pq/model.hpp"
#include "pq/newton.hpp"
#include "pq/signal.hpp"
#include "pq/tls.hpp"

namespace pq {

enum class Engine { newton_nonlinear, newton_linear, schrodinger };

std::string_view to_string(Engine e);
Engine engine_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Initial conditions

struct InitialCondition {
  enum class Kind { single_pendulum, out_of_phase };
  Kind kind = Kind::single_pendulum;
  double amplitude = 0.01;      // rad, largest initial deflection
  double relative_phase = 0.0;  // rad, phase of the Psi_+ admixture

  bool operator==(const InitialCondition&) const = default;
};

std::string_view to_string(InitialCondition::Kind k);
InitialCondition::Kind init_kind_from_string(std::string_view s);

// phi1 = amplitude, phi2 = 0 at rest; (Psi_1, Psi_2) = (1, 0).
InitialCondition init_single_pendulum(double amplitude);

// Out-of-phase mode. The envelope state is the frozen-eps(0) eigenmode
// closest to Psi_-, with the Psi_+ component rotated by relative_phase.
InitialCondition init_out_of_phase(double amplitude, double relative_phase = 0.0);

// Psi_+ population of that eigenmode: (1 - |eps|/sqrt(Delta^2 + eps^2)) / 2,
// zero when Delta = eps = 0.
double out_of_phase_admixture(double eps, double Delta);

// Unit-norm envelope state (individual basis for a single pendulum, modes
// basis for the out-of-phase mode).
EnvelopeState envelope_state(const InitialCondition& init, double eps0_at_start, double Delta);

// Newton state with the same envelope: phi_k = 2 s Re Psi_k,
// dphi_k = 2 s omega0 Im Psi_k, scaled so that max |phi_k| = amplitude for a
// real envelope.
NewtonState newton_state(const EnvelopeState& psi, double amplitude, double omega0, Frame frame);

// ---------------------------------------------------------------------------
// Engines

struct EngineSetup {
  Engine engine = Engine::schrodinger;
  double omega0 = 0.0;       // carrier; the linear engine uses omega0 +- Delta/2
  double Delta = 0.0;
  DriveWaveform drive;       // eps(t) for the linear and envelope engines
  ApparatusParams apparatus; // the nonlinear engine's physics
  double newton_dt = 0.01;   // s
  double tls_dt = 0.0;       // s, 0 = default_tls_step
  double lowpass_sigma = 0.0;  // s, 0 = 10 / omega0
  Basis basis = Basis::modes;  // basis of the reported populations
};

double default_lowpass_sigma(double omega0);

struct PopulationRun {
  TimeSeries P_a;  // P_1 or P_+
  TimeSeries P_b;  // P_2 or P_-
  Basis basis = Basis::modes;
};

// Populations on the grid t0, t0 + sample_dt, ... up to t1. The envelope
// engine reports |Psi|^2 directly; Newton engines go through the signal
// chain (split_timescales for the lab frame, envelope_sq, populations).
PopulationRun run_populations(const EngineSetup& setup, const InitialCondition& init, double t0, double t1,
                              double sample_dt);

// Raw Newton trajectory for the linear or nonlinear engine.
Trajectory run_newton(const EngineSetup& setup, const InitialCondition& init, double t0, double t1);

// Populations from an existing trajectory, decimated by `stride`.
PopulationRun newton_populations(const Trajectory& traj, Basis basis, double sigma, std::size_t stride);
PopulationRun envelope_populations(const EnvelopeTrajectory& traj, Basis basis, std::size_t stride);

// Envelope trajectory in setup.basis.
EnvelopeTrajectory run_envelope(const EngineSetup& setup, const InitialCondition& init, double t0, double t1);

// phi_k(t) = Psi_k e^{-i omega0 t} + c.c. from an envelope trajectory
// (converted to the individual basis first).
std::pair<TimeSeries, TimeSeries> reconstruct_deflections(const EnvelopeTrajectory& traj, double omega0);

// ---------------------------------------------------------------------------
// Rabi scan

struct RabiSettings {
  Engine engine = Engine::schrodinger;
  std::optional<double> Omega;    // rad/s, default: apparatus rotation
  std::optional<double> Omega_R;  // rad/s, default: rabi_frequency(apparatus)
  double eps0 = 0.0;              // rad/s
  double detuning_span = 5.0;     // |Delta - Omega| <= span * Omega_R
  int points = 21;
  double rabi_periods = 8.0;      // run length in resonant Rabi periods
  double newton_dt = 0.01;        // s
  double lowpass_sigma = 0.0;   // s, 0 = 10 / omega0

  bool operator==(const RabiSettings&) const = default;
};

struct RabiPoint {
  double Delta = 0.0;
  double Omega_eff = 0.0;
  double visibility = 0.0;
  double Omega_eff_model = 0.0;
  double visibility_model = 0.0;
};

struct RabiScan {
  double Omega = 0.0;
  double Omega_R = 0.0;
  std::vector<RabiPoint> points;
};

std::vector<double> rabi_delta_grid(double Omega, double Omega_R, double span, int points);

RabiScan run_rabi_scan(const ApparatusParams& apparatus, const RabiSettings& s, const std::vector<double>& Delta_grid,
                       unsigned threads = 0);

// ---------------------------------------------------------------------------
// Single Landau-Zener passage

struct LzSettings {
  Engine engine = Engine::schrodinger;
  double Delta = hz_to_rad(6.7e-3);
  double Omega = hz_to_rad(2.27e-3);
  double eps0 = 0.0;
  std::optional<double> A;        // default: chosen so that P_LZ = target_P_LZ
  double target_P_LZ = 0.4;
  std::optional<double> omega0;   // default: apparatus mean frequency
  double amplitude = 0.01;        // rad
  double relative_phase = 0.0;
  int phase_scan = 0;             // > 0: scan relative_phase on this many points
  std::optional<double> window_half_width;  // s
  double newton_dt = 0.01;
  double sample_dt = 0.5;         // s, output grid
  double lowpass_sigma = 0.0;   // s, 0 = 10 / omega0

  bool operator==(const LzSettings&) const = default;
};

struct LzWindow {
  double center = 0.0;
  double half_width = 0.0;
};

struct LzPassage {
  TlsParams tls;
  double omega0 = 0.0;
  PopulationRun run;
  LzWindow window;
  double P_bar = 0.0;            // mean P_+ in the window
  double P_LZ = 0.0;             // closed form
  double one_minus_P_LZ = 0.0;
  double initial_P_plus = 0.0;
  std::optional<std::pair<double, double>> band;  // min / max of P_bar over the phase scan
};

// A for a harmonic drive through eps = 0 with LZ probability P: v from the
// closed form, then A = sqrt((v / Omega)^2 + eps0^2).
double amplitude_for_lz_probability(double Delta, double Omega, double eps0, double P);

// Centered at T/2, half width a quarter of the time between the crossings.
LzWindow default_lz_window(double eps0, double A, double Omega);

LzPassage run_lz_passage(const ApparatusParams& apparatus, const LzSettings& s, unsigned threads = 0);

// ---------------------------------------------------------------------------
// LZSM fan

struct FanSettings {
  Engine engine = Engine::schrodinger;
  double Delta = hz_to_rad(5.0e-3);
  double Omega = hz_to_rad(7.1e-3);
  std::optional<double> omega0;
  double eps0_min = 0.0, eps0_max = 1.0;  // rad/s
  double A_min = 0.0, A_max = 1.0;        // rad/s
  int eps0_points = 60;
  int A_points = 60;
  int periods = 5;
  double relative_phase = 0.0;
  double amplitude = 0.01;
  double newton_dt = 0.01;
  double lowpass_sigma = 0.0;   // s, 0 = 10 / omega0

  bool operator==(const FanSettings&) const = default;
};

inline constexpr double kUnstableCell = -1.0;

struct FanDiagram {
  std::vector<double> eps0;  // rad/s
  std::vector<double> A;     // rad/s
  // Row-major in A: P[iA * eps0.size() + ie]. Unstable cells hold kUnstableCell.
  std::vector<double> P;
  std::vector<char> unstable;
  std::vector<double> P_initial;
  int periods_averaged = 0;
  Engine engine = Engine::schrodinger;

  double at(std::size_t iA, std::size_t ie) const { return P[iA * eps0.size() + ie]; }
  bool is_unstable(std::size_t iA, std::size_t ie) const { return unstable[iA * eps0.size() + ie] != 0; }
};

// True if the frozen-eps linear Newton system has an imaginary frequency for
// some eps in [eps0 - A, eps0 + A]. The lower squared frequency is concave
// in eps, so the two end points decide.
bool linear_newton_unstable(double eps0, double A, double omega0, double Delta);

FanDiagram run_lzsm_fan(const ApparatusParams& apparatus, const FanSettings& s, const std::vector<double>& eps0_grid,
                        const std::vector<double>& A_grid, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Regime-comparison spectra

enum class SpectraRegime { rabi, lzsm };
std::string_view to_string(SpectraRegime r);
SpectraRegime spectra_regime_from_string(std::string_view s);

struct SpectraSettings {
  Engine engine = Engine::newton_linear;
  SpectraRegime regime = SpectraRegime::lzsm;
  std::optional<double> Delta;   // rad/s, regime default if unset
  std::optional<double> Omega;
  std::optional<double> eps0;
  std::optional<double> A;
  std::optional<double> omega0;
  std::optional<double> duration;         // s
  std::optional<double> smoothing_sigma;  // Hz
  double peak_threshold = kDefaultPeakThreshold;
  std::optional<double> husimi_sigma;     // s, default T / 20
  double amplitude = 0.01;
  double newton_dt = 0.01;

  bool operator==(const SpectraSettings&) const = default;
};

struct PeakRow {
  double frequency = 0.0;  // Hz
  double magnitude = 0.0;
  double lambda = 0.0;        // rad/s, 2 pi f - omega0
  double eps_inferred = 0.0;  // rad/s, eps with lambda as an adiabatic eigenvalue
};

struct ChannelSpectrum {
  std::string run;      // static-attractive, static-repulsive, driven
  std::string channel;  // phi1, phi2, phi_plus, phi_minus
  Spectrum spectrum;
  std::vector<PeakRow> peaks;
};

struct SpectraBundle {
  TlsParams tls;
  double omega0 = 0.0;
  double duration = 0.0;
  SpectraRegime regime = SpectraRegime::lzsm;
  std::vector<ChannelSpectrum> channels;
  // Driven LZSM run only: Husimi map of phi_minus on omega0 +- 1.2 E_max.
  std::optional<HusimiMap> husimi;
};

// eps = (Delta^2 - 4 lambda^2) / (4 lambda); lambda = 0 has no solution.
double eps_from_eigenvalue(double lambda, double Delta);

SpectraBundle run_spectra_comparison(const ApparatusParams& apparatus, const SpectraSettings& s,
                                     unsigned threads = 0);

// ---------------------------------------------------------------------------
// Eigenvalue consistency

struct EigencheckSettings {
  double f_split = 24e-3;      // Hz, f1 - f2 around the apparatus mean
  double eps_max_ratio = 0.05; // grid covers |eps| <= ratio * omega0
  int points = 101;

  bool operator==(const EigencheckSettings&) const = default;
};

struct EigenRow {
  double eps = 0.0;
  std::complex<double> newton_hi;
  std::complex<double> newton_lo;
  double tls_plus = 0.0;   // w_+ + omega0
  double tls_minus = 0.0;  // w_- + omega0
  double deviation = 0.0;  // max over both branches; infinite when unstable
  bool unstable = false;
};

struct EigenTable {
  double omega0 = 0.0;
  double Delta = 0.0;
  std::vector<EigenRow> rows;
  double max_deviation = 0.0;
};

// Apparatus with f1, f2 = f0 +- f_split / 2 around its current mean.
ApparatusParams eigencheck_apparatus(const ApparatusParams& base, double f_split);

EigenTable run_eigenvalue_consistency(const ApparatusParams& apparatus, const std::vector<double>& eps_grid);

// ---------------------------------------------------------------------------
// Plain simulation

enum class DriveSource { apparatus, explicit_params };
std::string_view to_string(DriveSource d);
DriveSource drive_source_from_string(std::string_view s);

struct SimulateSettings {
  Engine engine = Engine::newton_nonlinear;
  double duration = 600.0;  // s
  double newton_dt = 1e-3;  // s
  double output_dt = 0.05;  // s
  InitialCondition init;
  Basis basis = Basis::individual;
  DriveSource drive = DriveSource::apparatus;
  double eps0 = 0.0;
  double A = 0.0;
  std::optional<double> Omega;

  bool operator==(const SimulateSettings&) const = default;
};

struct Simulation {
  Engine engine = Engine::newton_nonlinear;
  TlsParams tls;
  double omega0 = 0.0;
  std::optional<Trajectory> newton;
  std::optional<EnvelopeTrajectory> envelope;
  PopulationRun populations;
};

// TLS parameters of the simulate drive (effective_tls_params or explicit).
TlsParams simulation_tls(const ApparatusParams& apparatus, const SimulateSettings& s);

Simulation run_simulation(const ApparatusParams& apparatus, const SimulateSettings& s, std::optional<double> sigma);

}  // namespace pq
