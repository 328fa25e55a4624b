#pragma once

// Physical description of the two magnetically coupled pendula and the map
// from apparatus geometry to the effective two-level parameters.

#include <cmath>
#include <string>
#include <vector>

#include "pq/units.hpp"

namespace pq {

struct PhysicalConstants {
  double mu0 = 4.0e-7 * kPi;  // T m / A
  double g = 9.807232;        // m / s^2, Munich

  bool operator==(const PhysicalConstants&) const = default;
};

// Both pendula share the total mass and the magnet mounting heights. The
// moments of inertia are not free parameters: J_k = M l_c,k g / omega_k^2.
struct PendulumParams {
  double mass = 4.242;                 // kg
  double omega1 = hz_to_rad(0.53365);  // rad/s
  double omega2 = hz_to_rad(0.52195);  // rad/s
  double lc1 = 0.841;                  // m, pivot to centre of mass
  double lc2 = 0.841;                  // m
  double l_lower = 1.148;              // m, pivot to lower magnet
  double l_upper = 0.635;              // m, pivot to upper magnet

  bool operator==(const PendulumParams&) const = default;
};

struct MagnetAssembly {
  double m_lower = 25.37;   // A m^2
  double m_upper = 6.544;   // A m^2
  bool upper_present = false;
  double L = 0.454;         // m, pivot distance
  double L_upper = 0.168;   // m, upper magnet distance at rest; ignored when absent
  double Omega = hz_to_rad(0.0117);  // rad/s, rotation of the driven lower magnet

  bool operator==(const MagnetAssembly&) const = default;
};

struct ApparatusParams {
  PhysicalConstants consts;
  PendulumParams pendula;
  MagnetAssembly magnets;

  double J1() const { return pendula.mass * pendula.lc1 * consts.g / (pendula.omega1 * pendula.omega1); }
  double J2() const { return pendula.mass * pendula.lc2 * consts.g / (pendula.omega2 * pendula.omega2); }
  double J0() const { return 0.5 * (J1() + J2()); }
  double omega0() const { return 0.5 * (pendula.omega1 + pendula.omega2); }
  double Delta() const { return pendula.omega1 - pendula.omega2; }

  // Throws DomainError naming the offending field.
  void validate() const;

  bool operator==(const ApparatusParams&) const = default;
};

// Effective two-level parameters, all angular frequencies.
struct TlsParams {
  double Delta = 0.0;
  double eps0 = 0.0;
  double A = 0.0;
  double Omega = 0.0;

  bool operator==(const TlsParams&) const = default;
};

// The envelope mapping needs Delta, eps, Omega << omega0. Reported, never
// enforced.
struct ValidityReport {
  double delta_ratio = 0.0;     // |Delta| / omega0
  double coupling_ratio = 0.0;  // (|eps0| + A) / omega0
  double drive_ratio = 0.0;     // Omega / omega0
  bool envelope_valid = false;  // all ratios below 0.1
  std::vector<std::string> notes;
};
ValidityReport validity(const TlsParams& tls, double omega0);

struct DipoleConfiguration {
  double R = 0.0;    // m
  double psi = 0.0;  // rad, angle between x axis and the separation vector
};

// Separation of two magnets mounted at distance `arm` below pivots `spacing`
// apart, for deflections phi1, phi2.
DipoleConfiguration dipole_configuration(double phi1, double phi2, double spacing, double arm);

struct InteractionEnergies {
  double G_lower = 0.0;  // J
  double G_upper = 0.0;  // J, zero without upper magnets
};
InteractionEnergies interaction_energies(const ApparatusParams& p);

// Second-order (G~) and first-order (F~) Taylor coefficients of the coupling
// at the rest position, before the quasistatic correction.
struct RawModulation {
  double G = 0.0;  // J
  double F = 0.0;  // J
};
RawModulation raw_modulation(double t, const ApparatusParams& p);

enum class QuasistaticForm { exact, symmetric };

struct QuasistaticDeflection {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double difference() const { return phi1 - phi2; }
};
QuasistaticDeflection quasistatic_deflection(double t, const ApparatusParams& p,
                                             QuasistaticForm form = QuasistaticForm::exact);

struct CouplingOptions {
  // Off: eps = G~/(omega0 J0), no dynamic curvature correction.
  bool curvature_correction = true;
};

// Instantaneous coupling eps(t) in rad/s.
double effective_coupling(double t, const ApparatusParams& p, CouplingOptions opts = {});

// Mean and first cosine coefficient of a T-periodic function, by the
// trapezoid rule on n uniform samples of one period.
struct FourierPair {
  double mean = 0.0;
  double cos_amplitude = 0.0;
};
template <class F>
FourierPair fourier_projection(F&& f, double Omega, int n_samples);

// eps0 and A from the Fourier projection of effective_coupling; Delta from
// the pendulum frequencies. Throws DomainError for Omega <= 0 or n < 64.
TlsParams effective_tls_params(const ApparatusParams& p, int n_samples = 1024);

struct ExtremeParams {
  double A = 0.0;
  double eps0 = 0.0;
};
ExtremeParams params_from_extremes(double eps_min, double eps_max);

struct CouplingRange {
  double min = 0.0;
  double max = 0.0;
};
// Sampled extremes of effective_coupling over one drive period.
CouplingRange coupling_extremes(const ApparatusParams& p, int n_samples = 4096);

// ---------------------------------------------------------------------------

template <class F>
FourierPair fourier_projection(F&& f, double Omega, int n_samples) {
  // On a uniform periodic grid the trapezoid rule is a plain average.
  const double period = kTwoPi / Omega;
  const double h = period / n_samples;
  double sum0 = 0.0;
  double sum1 = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double t = i * h;
    const double v = f(t);
    sum0 += v;
    sum1 += v * std::cos(Omega * t);
  }
  return {sum0 / n_samples, 2.0 * sum1 / n_samples};
}

}  // namespace pq
