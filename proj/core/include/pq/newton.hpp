#pragma once

// Classical dynamics of the two pendula: the full dipole-coupled equations of
// motion, the linearized equations in the frame co-moving with the
// quasistatic equilibrium, a fixed-step RK4 integrator and the normal-mode
// spectrum of the frozen-coupling linear system.

#include <array>
#include <cmath>
#include <complex>
#include <string_view>
#include <vector>

#include "pq/error.hpp"
#include "pq/model.hpp"

namespace pq {

enum class Frame { lab, quasistatic_relative };

std::string_view to_string(Frame f);
Frame frame_from_string(std::string_view s);

struct NewtonState {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double dphi1 = 0.0;
  double dphi2 = 0.0;
  Frame frame = Frame::lab;

  bool finite() const {
    return std::isfinite(phi1) && std::isfinite(phi2) && std::isfinite(dphi1) && std::isfinite(dphi2);
  }
};

struct Acceleration {
  double ddphi1 = 0.0;
  double ddphi2 = 0.0;
};

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<NewtonState> samples;

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  std::size_t size() const { return samples.size(); }
};

enum class MagnetPair { lower, upper };

// Dipole-dipole energy of one magnet pair (J). The lower pair carries the
// cos(Omega t) factor of the rotating magnet; the upper pair is static and
// mutually attracting. Returns 0 for an absent upper pair.
double dipole_potential(double phi1, double phi2, double t, MagnetPair pair, const ApparatusParams& p);

// Sum over both pairs.
double coupling_potential(double phi1, double phi2, double t, const ApparatusParams& p);

// Central-difference torques -dU/dphi_k (N m) with step h.
inline constexpr double kTorqueStep = 1e-7;
std::array<double, 2> coupling_torque(double phi1, double phi2, double t, const ApparatusParams& p,
                                      double h = kTorqueStep);

// J_k phi_k'' = -J_k omega_k^2 sin phi_k - dU/dphi_k. State must be in the
// lab frame.
Acceleration nonlinear_rhs(const NewtonState& s, double t, const ApparatusParams& p);

// T + gravitational + magnetic energy of the lab-frame state (J), zero for
// hanging pendula without magnets.
double total_energy(const NewtonState& s, double t, const ApparatusParams& p);

// Per-pendulum energy J_k (phi_k'^2 + omega_k^2 phi_k^2) / 2 of the linear
// uncoupled oscillator.
std::array<double, 2> oscillator_energies(const NewtonState& s, double J1, double J2, double omega1,
                                          double omega2);

// phi1'' = -w1^2 phi1 + w0 eps (phi1 - phi2), and symmetric for phi2,
// w0 = (w1 + w2)/2. State must be in the quasistatic-relative frame.
Acceleration linear_rhs(const NewtonState& s, double eps, double omega1, double omega2);

// Lab <-> relative conversion through the exact quasistatic solution.
NewtonState to_quasistatic_relative(const NewtonState& lab, double t, const ApparatusParams& p);
NewtonState to_lab(const NewtonState& relative, double t, const ApparatusParams& p);

// One classic RK4 step.
template <class Rhs>
NewtonState rk4_step(Rhs& rhs, const NewtonState& s, double t, double dt) {
  auto shifted = [&](const NewtonState& base, const Acceleration& a, double dv1, double dv2, double h) {
    NewtonState r = base;
    r.phi1 += h * dv1;
    r.phi2 += h * dv2;
    r.dphi1 += h * a.ddphi1;
    r.dphi2 += h * a.ddphi2;
    return r;
  };
  const Acceleration k1 = rhs(s, t);
  const NewtonState s2 = shifted(s, k1, s.dphi1, s.dphi2, 0.5 * dt);
  const Acceleration k2 = rhs(s2, t + 0.5 * dt);
  const NewtonState s3 = shifted(s, k2, s2.dphi1, s2.dphi2, 0.5 * dt);
  const Acceleration k3 = rhs(s3, t + 0.5 * dt);
  const NewtonState s4 = shifted(s, k3, s3.dphi1, s3.dphi2, dt);
  const Acceleration k4 = rhs(s4, t + dt);

  NewtonState out = s;
  out.phi1 += dt / 6.0 * (s.dphi1 + 2.0 * s2.dphi1 + 2.0 * s3.dphi1 + s4.dphi1);
  out.phi2 += dt / 6.0 * (s.dphi2 + 2.0 * s2.dphi2 + 2.0 * s3.dphi2 + s4.dphi2);
  out.dphi1 += dt / 6.0 * (k1.ddphi1 + 2.0 * k2.ddphi1 + 2.0 * k3.ddphi1 + k4.ddphi1);
  out.dphi2 += dt / 6.0 * (k1.ddphi2 + 2.0 * k2.ddphi2 + 2.0 * k3.ddphi2 + k4.ddphi2);
  return out;
}

// Fixed-step RK4 from t0 to t1; every step is sampled (t1 - t0 is rounded to
// a whole number of steps). Throws DivergenceError on a non-finite state or
// |phi| >= pi/2.
template <class Rhs>
Trajectory integrate(Rhs rhs, const NewtonState& state0, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw DomainError("integrate: dt must be positive");
  if (!(t1 >= t0)) throw DomainError("integrate: t1 < t0");
  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  Trajectory traj{t0, dt, {}};
  traj.samples.reserve(steps + 1);
  traj.samples.push_back(state0);
  NewtonState s = state0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + dt * static_cast<double>(i);
    s = rk4_step(rhs, s, t, dt);
    if (!s.finite() || std::abs(s.phi1) >= 0.5 * kPi || std::abs(s.phi2) >= 0.5 * kPi) {
      throw DivergenceError("Newton integration diverged", t + dt);
    }
    traj.samples.push_back(s);
  }
  return traj;
}

// Eigenfrequencies of J phi'' = -V phi with V = [[J1 w1^2 - G, G], [G, J2 w2^2 - G]]
// and G = w0 J0 eps, i.e. +-sqrt(eig(M^-1/2 V M^-1/2)). A negative
// eigenvalue yields a purely imaginary pair and sets `unstable`.
struct NormalModes {
  // Ordered {+high, +low, -low, -high}; imaginary pairs are {+i|w|, -i|w|}.
  std::array<std::complex<double>, 4> frequencies{};
  std::array<double, 2> squared{};  // eigenvalues of Q, high first
  bool unstable = false;

  // The two branches with non-negative real part, high first.
  std::array<std::complex<double>, 2> positive() const { return {frequencies[0], frequencies[1]}; }
};
NormalModes linearized_eigenfrequencies(double eps, double J1, double J2, double omega1, double omega2);

}  // namespace pq
