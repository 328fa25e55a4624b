#include "pq/newton.hpp"

#include <algorithm>
#include <string>

namespace pq {

std::string_view to_string(Frame f) {
  return f == Frame::lab ? "lab" : "quasistatic-relative";
}

Frame frame_from_string(std::string_view s) {
  if (s == "lab") return Frame::lab;
  if (s == "quasistatic-relative") return Frame::quasistatic_relative;
  throw DomainError("unknown frame tag '" + std::string(s) + "'");
}

namespace {

// mu0 m^2 / (4 pi R^3) [cos(phi1 - phi2) - 3 cos(phi1 - psi) cos(phi2 - psi)]
double pair_energy(double phi1, double phi2, double spacing, double arm, double moment, double mu0) {
  const auto cfg = dipole_configuration(phi1, phi2, spacing, arm);
  const double bracket = std::cos(phi1 - phi2) - 3.0 * std::cos(phi1 - cfg.psi) * std::cos(phi2 - cfg.psi);
  return mu0 * moment * moment / (4.0 * kPi * cfg.R * cfg.R * cfg.R) * bracket;
}

}  // namespace

double dipole_potential(double phi1, double phi2, double t, MagnetPair pair, const ApparatusParams& p) {
  if (pair == MagnetPair::lower) {
    return pair_energy(phi1, phi2, p.magnets.L, p.pendula.l_lower, p.magnets.m_lower, p.consts.mu0) *
           std::cos(p.magnets.Omega * t);
  }
  if (!p.magnets.upper_present) return 0.0;
  return pair_energy(phi1, phi2, p.magnets.L_upper, p.pendula.l_upper, p.magnets.m_upper, p.consts.mu0);
}

double coupling_potential(double phi1, double phi2, double t, const ApparatusParams& p) {
  return dipole_potential(phi1, phi2, t, MagnetPair::lower, p) +
         dipole_potential(phi1, phi2, t, MagnetPair::upper, p);
}

std::array<double, 2> coupling_torque(double phi1, double phi2, double t, const ApparatusParams& p, double h) {
  const double d1 = (coupling_potential(phi1 + h, phi2, t, p) - coupling_potential(phi1 - h, phi2, t, p)) / (2.0 * h);
  const double d2 = (coupling_potential(phi1, phi2 + h, t, p) - coupling_potential(phi1, phi2 - h, t, p)) / (2.0 * h);
  return {-d1, -d2};
}

Acceleration nonlinear_rhs(const NewtonState& s, double t, const ApparatusParams& p) {
  if (s.frame != Frame::lab) throw DomainError("nonlinear_rhs expects a lab-frame state");
  const auto torque = coupling_torque(s.phi1, s.phi2, t, p);
  const double w1 = p.pendula.omega1;
  const double w2 = p.pendula.omega2;
  return {-w1 * w1 * std::sin(s.phi1) + torque[0] / p.J1(), -w2 * w2 * std::sin(s.phi2) + torque[1] / p.J2()};
}

double total_energy(const NewtonState& s, double t, const ApparatusParams& p) {
  const double J1 = p.J1();
  const double J2 = p.J2();
  const double w1 = p.pendula.omega1;
  const double w2 = p.pendula.omega2;
  const double kinetic = 0.5 * (J1 * s.dphi1 * s.dphi1 + J2 * s.dphi2 * s.dphi2);
  const double gravity = J1 * w1 * w1 * (1.0 - std::cos(s.phi1)) + J2 * w2 * w2 * (1.0 - std::cos(s.phi2));
  return kinetic + gravity + coupling_potential(s.phi1, s.phi2, t, p) - coupling_potential(0.0, 0.0, t, p);
}

std::array<double, 2> oscillator_energies(const NewtonState& s, double J1, double J2, double omega1, double omega2) {
  return {0.5 * J1 * (s.dphi1 * s.dphi1 + omega1 * omega1 * s.phi1 * s.phi1),
          0.5 * J2 * (s.dphi2 * s.dphi2 + omega2 * omega2 * s.phi2 * s.phi2)};
}

Acceleration linear_rhs(const NewtonState& s, double eps, double omega1, double omega2) {
  const double coupling = 0.5 * (omega1 + omega2) * eps * (s.phi1 - s.phi2);
  return {-omega1 * omega1 * s.phi1 + coupling, -omega2 * omega2 * s.phi2 - coupling};
}

namespace {

// d/dt of the quasistatic deflection; small (order Omega phi_qs) but kept so
// that lab and relative velocities convert consistently.
QuasistaticDeflection quasistatic_rate(double t, const ApparatusParams& p) {
  if (p.magnets.Omega == 0.0) return {0.0, 0.0};
  const double h = 1e-3 / p.magnets.Omega;
  const auto a = quasistatic_deflection(t + h, p);
  const auto b = quasistatic_deflection(t - h, p);
  return {(a.phi1 - b.phi1) / (2.0 * h), (a.phi2 - b.phi2) / (2.0 * h)};
}

}  // namespace

NewtonState to_quasistatic_relative(const NewtonState& lab, double t, const ApparatusParams& p) {
  if (lab.frame != Frame::lab) throw DomainError("to_quasistatic_relative expects a lab-frame state");
  const auto qs = quasistatic_deflection(t, p);
  const auto rate = quasistatic_rate(t, p);
  return {lab.phi1 - qs.phi1, lab.phi2 - qs.phi2, lab.dphi1 - rate.phi1, lab.dphi2 - rate.phi2,
          Frame::quasistatic_relative};
}

NewtonState to_lab(const NewtonState& rel, double t, const ApparatusParams& p) {
  if (rel.frame != Frame::quasistatic_relative) throw DomainError("to_lab expects a quasistatic-relative state");
  const auto qs = quasistatic_deflection(t, p);
  const auto rate = quasistatic_rate(t, p);
  return {rel.phi1 + qs.phi1, rel.phi2 + qs.phi2, rel.dphi1 + rate.phi1, rel.dphi2 + rate.phi2, Frame::lab};
}

NormalModes linearized_eigenfrequencies(double eps, double J1, double J2, double omega1, double omega2) {
  const double w0 = 0.5 * (omega1 + omega2);
  const double G = w0 * 0.5 * (J1 + J2) * eps;
  const double q11 = omega1 * omega1 - G / J1;
  const double q22 = omega2 * omega2 - G / J2;
  const double q12 = G / std::sqrt(J1 * J2);

  const double mean = 0.5 * (q11 + q22);
  const double half_gap = std::hypot(0.5 * (q11 - q22), q12);
  NormalModes modes;
  modes.squared = {mean + half_gap, mean - half_gap};

  auto root = [](double lambda) -> std::complex<double> {
    return lambda >= 0.0 ? std::complex<double>(std::sqrt(lambda), 0.0)
                         : std::complex<double>(0.0, std::sqrt(-lambda));
  };
  const auto hi = root(modes.squared[0]);
  const auto lo = root(modes.squared[1]);
  modes.frequencies = {hi, lo, -lo, -hi};
  modes.unstable = modes.squared[1] < 0.0;
  return modes;
}

}  // namespace pq
