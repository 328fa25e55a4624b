#pragma once

// Envelope (two-level) dynamics of the pendula and the closed-form results of
// driven two-level physics used to check it: Rabi, Landau-Zener, adiabatic
// eigenvalues and phases. hbar = 1, every quantity is an angular frequency.

#include <cmath>
#include <complex>
#include <string_view>
#include <variant>
#include <vector>

#include "pq/error.hpp"
#include "pq/model.hpp"

namespace pq {

using cplx = std::complex<double>;

// individual: (Psi_1, Psi_2) of the two pendula.
// modes:      (Psi_+, Psi_-) of the in-phase / out-of-phase modes.
enum class Basis { individual, modes };

std::string_view to_string(Basis b);
Basis basis_from_string(std::string_view s);

struct EnvelopeState {
  cplx a{0.0, 0.0};
  cplx b{0.0, 0.0};
  Basis basis = Basis::individual;

  double norm() const { return std::norm(a) + std::norm(b); }
  double population_a() const { return std::norm(a) / norm(); }
  double population_b() const { return std::norm(b) / norm(); }
};

// S = (sigma_x + sigma_z)/sqrt(2) maps individual amplitudes to mode
// amplitudes and back (S is its own inverse).
EnvelopeState to_modes(const EnvelopeState& s);
EnvelopeState to_individual(const EnvelopeState& s);

struct Mat2 {
  cplx m00, m01, m10, m11;

  Mat2 operator*(const Mat2& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
  Mat2 adjoint() const { return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)}; }
  cplx trace() const { return m00 + m11; }
  bool finite() const {
    auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(m00) && ok(m01) && ok(m10) && ok(m11);
  }
  void apply(cplx& a, cplx& b) const {
    const cplx na = m00 * a + m01 * b;
    const cplx nb = m10 * a + m11 * b;
    a = na;
    b = nb;
  }
};

// Coupling eps(t): eps0 + A cos(Omega t), a linear sweep v (t - t_cross),
// or a uniformly sampled table (linear interpolation, clamped at the ends).
class DriveWaveform {
 public:
  struct Harmonic {
    double eps0;
    double A;
    double Omega;
  };
  struct Sweep {
    double v;
    double t_cross;
  };
  struct Table {
    double t0;
    double dt;
    std::vector<double> values;
  };

  DriveWaveform() : form_(Harmonic{0.0, 0.0, 0.0}) {}
  static DriveWaveform harmonic(double eps0, double A, double Omega) { return DriveWaveform(Harmonic{eps0, A, Omega}); }
  static DriveWaveform harmonic(const TlsParams& p) { return harmonic(p.eps0, p.A, p.Omega); }
  static DriveWaveform sweep(double v, double t_cross = 0.0) { return DriveWaveform(Sweep{v, t_cross}); }
  static DriveWaveform table(double t0, double dt, std::vector<double> values);

  double operator()(double t) const;

  // max |eps| over the waveform's natural range (infinite for a sweep).
  double magnitude_bound() const;
  // Throws DomainError if a table does not cover [t0, t1].
  void require_coverage(double t0, double t1) const;

  const Harmonic* as_harmonic() const { return std::get_if<Harmonic>(&form_); }

 private:
  explicit DriveWaveform(std::variant<Harmonic, Sweep, Table> f) : form_(std::move(f)) {}
  std::variant<Harmonic, Sweep, Table> form_;
};

// H = 1/2 [[Delta - eps, eps], [eps, -Delta - eps]]
Mat2 hamiltonian_rabi(double t, double Delta, const DriveWaveform& drive);
// H = 1/2 [[0, Delta], [Delta, -2 eps]]
Mat2 hamiltonian_lz(double t, double Delta, const DriveWaveform& drive);

// `as_written` keeps the identity part of the matrices above, `traceless`
// removes it. Populations do not depend on the choice.
enum class Gauge { as_written, traceless };

struct TlsHamiltonian {
  Basis basis = Basis::modes;
  double Delta = 0.0;
  DriveWaveform drive;
  Gauge gauge = Gauge::as_written;

  Mat2 operator()(double t) const;
};

// exp(-i H dt) for Hermitian H, exact via H = h0 1 + h . sigma.
Mat2 propagator(const Mat2& H, double dt);

// dt default: 0.01 / max(|Delta|, |eps0| + A, Omega).
double default_tls_step(double Delta, const DriveWaveform& drive);

struct EnvelopeTrajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<EnvelopeState> samples;

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  std::size_t size() const { return samples.size(); }
};

// Midpoint-Hamiltonian exponential stepping; `hamiltonian(t)` returns a Mat2.
// `observe(t, state)` is called for the initial state and after every step.
template <class Hamiltonian, class Observer>
EnvelopeState propagate(const EnvelopeState& state0, const Hamiltonian& hamiltonian, double t0, double t1,
                        double dt, Observer&& observe) {
  if (!(dt > 0.0)) throw DomainError("evolve: dt must be positive");
  if (!(t1 >= t0)) throw DomainError("evolve: t1 < t0");
  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  EnvelopeState s = state0;
  observe(t0, s);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + dt * static_cast<double>(i);
    const Mat2 H = hamiltonian(t + 0.5 * dt);
    if (!H.finite()) throw DivergenceError("non-finite Hamiltonian", t + 0.5 * dt);
    propagator(H, dt).apply(s.a, s.b);
    observe(t + dt, s);
  }
  return s;
}

template <class Hamiltonian>
EnvelopeTrajectory evolve(const EnvelopeState& state0, const Hamiltonian& hamiltonian, double t0, double t1,
                          double dt) {
  EnvelopeTrajectory traj{t0, dt, {}};
  traj.samples.reserve(static_cast<std::size_t>(std::llround((t1 - t0) / dt)) + 1);
  propagate(state0, hamiltonian, t0, t1, dt, [&](double, const EnvelopeState& s) { traj.samples.push_back(s); });
  return traj;
}

// Omega_R = A/2 = G_l / (2 omega0 J0) for the lower pair alone.
double rabi_frequency(const ApparatusParams& p);

struct RabiResponse {
  double Omega_eff = 0.0;
  double visibility = 0.0;
};
RabiResponse effective_rabi(double Delta, double Omega, double Omega_R);

// |v| = Omega sqrt(A^2 - eps0^2). The first crossing of eps0 + A cos(Omega t)
// sweeps downwards (v < 0), the second upwards.
double sweep_velocity(double Omega, double A, double eps0);

// exp(-pi Delta^2 / (2 |v|))
double lz_probability(double Delta, double v);

struct AdiabaticEigenvalues {
  double w_plus = 0.0;   // (-eps + sqrt(Delta^2 + eps^2)) / 2
  double w_minus = 0.0;  // (-eps - sqrt(Delta^2 + eps^2)) / 2
};
AdiabaticEigenvalues adiabatic_eigenvalues(double eps, double Delta);

// Eigenvectors of the mode-basis Hamiltonian at frozen eps, unit norm.
EnvelopeState adiabatic_eigenvector(double eps, double Delta, bool upper);

struct AdiabaticPhase {
  double B = 0.0;       // integral of eps dt
  double Phi_ad = 0.0;  // integral of sqrt(Delta^2 + eps^2) dt
  std::vector<double> B_cumulative;
  std::vector<double> Phi_cumulative;
};
AdiabaticPhase adiabatic_phase(const DriveWaveform& drive, double Delta, double t0, double t1, double dt);

}  // namespace pq
