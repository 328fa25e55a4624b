#include "pq/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pq/error.hpp"

namespace pq {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << name << " must be positive and finite (got " << value << ")";
    throw DomainError(os.str());
  }
}

double pow5(double x) {
  const double x2 = x * x;
  return x2 * x2 * x;
}

// (1 - arm/spacing * dphi)^-5, the curvature of the dipole coupling taken at
// the shifted magnet distance.
double curvature_factor(double arm, double spacing, double dphi) {
  const double base = 1.0 - arm / spacing * dphi;
  if (base <= 0.0) {
    throw SingularityError("curvature correction base 1 - (l/L) dphi_qs is not positive");
  }
  return 1.0 / pow5(base);
}

}  // namespace

void ApparatusParams::validate() const {
  require_positive(consts.mu0, "mu0");
  require_positive(consts.g, "g");
  require_positive(pendula.mass, "mass");
  require_positive(pendula.omega1, "f1");
  require_positive(pendula.omega2, "f2");
  require_positive(pendula.lc1, "lc1");
  require_positive(pendula.lc2, "lc2");
  require_positive(pendula.l_lower, "l_lower");
  require_positive(pendula.l_upper, "l_upper");
  require_positive(magnets.L, "L");
  if (magnets.m_lower < 0.0) throw DomainError("m_lower must be non-negative");
  if (magnets.m_upper < 0.0) throw DomainError("m_upper must be non-negative");
  if (magnets.upper_present) require_positive(magnets.L_upper, "L_upper");
  if (!(magnets.Omega >= 0.0)) throw DomainError("Omega must be non-negative");
  if (std::abs(Delta()) >= 0.1 * omega0()) {
    throw DomainError("pendulum frequencies differ by more than 10% of their mean (|f1 - f2| >= 0.1 f0)");
  }
}

ValidityReport validity(const TlsParams& tls, double omega0) {
  ValidityReport r;
  r.delta_ratio = std::abs(tls.Delta) / omega0;
  r.coupling_ratio = (std::abs(tls.eps0) + std::abs(tls.A)) / omega0;
  r.drive_ratio = tls.Omega / omega0;
  if (r.delta_ratio >= 0.1) r.notes.emplace_back("|Delta| is not small against omega0");
  if (r.coupling_ratio >= 0.1) r.notes.emplace_back("|eps0| + A is not small against omega0");
  if (r.drive_ratio >= 0.1) r.notes.emplace_back("Omega is not small against omega0");
  r.envelope_valid = r.notes.empty();
  return r;
}

DipoleConfiguration dipole_configuration(double phi1, double phi2, double spacing, double arm) {
  const double dx = spacing + arm * std::sin(phi2) - arm * std::sin(phi1);
  const double dy = arm * std::cos(phi1) - arm * std::cos(phi2);
  const double R = std::hypot(dx, dy);
  if (!(R > 0.0)) throw SingularityError("magnets collide (R <= 0)");
  // atan of (cos phi1 - cos phi2) / (L/l - sin phi1 + sin phi2)
  return {R, std::atan2(dy, dx)};
}

InteractionEnergies interaction_energies(const ApparatusParams& p) {
  require_positive(p.magnets.L, "L");
  const double mu0 = p.consts.mu0;
  InteractionEnergies e;
  const double ml = p.magnets.m_lower;
  const double ll = p.pendula.l_lower;
  e.G_lower = 6.0 * mu0 * ml * ml * ll * ll / (kPi * pow5(p.magnets.L));
  if (p.magnets.upper_present) {
    require_positive(p.magnets.L_upper, "L_upper");
    const double mu = p.magnets.m_upper;
    const double lu = p.pendula.l_upper;
    e.G_upper = 6.0 * mu0 * mu * mu * lu * lu / (kPi * pow5(p.magnets.L_upper));
  }
  return e;
}

RawModulation raw_modulation(double t, const ApparatusParams& p) {
  const auto e = interaction_energies(p);
  const double c = std::cos(p.magnets.Omega * t);
  RawModulation m;
  m.G = e.G_upper + e.G_lower * c;
  m.F = e.G_lower * c * p.magnets.L / (4.0 * p.pendula.l_lower);
  if (p.magnets.upper_present) {
    m.F += e.G_upper * p.magnets.L_upper / (4.0 * p.pendula.l_upper);
  }
  return m;
}

QuasistaticDeflection quasistatic_deflection(double t, const ApparatusParams& p, QuasistaticForm form) {
  const auto m = raw_modulation(t, p);
  if (form == QuasistaticForm::symmetric) {
    const double w0 = p.omega0();
    const double denom = w0 * w0 * p.J0() - 2.0 * m.G;
    if (!(denom > 0.0)) {
      throw SingularityError("quasistatic solution singular: omega0^2 J0 - 2 G~ <= 0");
    }
    const double phi = m.F / denom;
    return {phi, -phi};
  }
  const double k1 = p.J1() * p.pendula.omega1 * p.pendula.omega1;
  const double k2 = p.J2() * p.pendula.omega2 * p.pendula.omega2;
  const double denom = k1 * k2 - m.G * (k1 + k2);
  if (!(denom > 0.0)) {
    throw SingularityError("quasistatic solution singular: J1 J2 w1^2 w2^2 - G~ (J1 w1^2 + J2 w2^2) <= 0");
  }
  return {k2 * m.F / denom, -k1 * m.F / denom};
}

double effective_coupling(double t, const ApparatusParams& p, CouplingOptions opts) {
  const double scale = p.omega0() * p.J0();
  if (!opts.curvature_correction) return raw_modulation(t, p).G / scale;

  const auto e = interaction_energies(p);
  const double dphi = quasistatic_deflection(t, p, QuasistaticForm::symmetric).difference();
  double G = e.G_lower * std::cos(p.magnets.Omega * t) *
             curvature_factor(p.pendula.l_lower, p.magnets.L, dphi);
  if (p.magnets.upper_present) {
    G += e.G_upper * curvature_factor(p.pendula.l_upper, p.magnets.L_upper, dphi);
  }
  return G / scale;
}

TlsParams effective_tls_params(const ApparatusParams& p, int n_samples) {
  if (!(p.magnets.Omega > 0.0)) throw DomainError("effective_tls_params needs Omega > 0");
  if (n_samples < 64) throw DomainError("effective_tls_params needs at least 64 samples per period");
  const auto proj = fourier_projection([&](double t) { return effective_coupling(t, p); },
                                       p.magnets.Omega, n_samples);
  return {p.Delta(), proj.mean, proj.cos_amplitude, p.magnets.Omega};
}

ExtremeParams params_from_extremes(double eps_min, double eps_max) {
  if (eps_max < eps_min) throw DomainError("params_from_extremes: eps_max < eps_min");
  return {0.5 * (eps_max - eps_min), 0.5 * (eps_max + eps_min)};
}

CouplingRange coupling_extremes(const ApparatusParams& p, int n_samples) {
  if (!(p.magnets.Omega > 0.0)) {
    const double e = effective_coupling(0.0, p);
    return {e, e};
  }
  const double period = kTwoPi / p.magnets.Omega;
  CouplingRange r{effective_coupling(0.0, p), effective_coupling(0.0, p)};
  for (int i = 1; i < n_samples; ++i) {
    const double e = effective_coupling(period * i / n_samples, p);
    r.min = std::min(r.min, e);
    r.max = std::max(r.max, e);
  }
  return r;
}

}  // namespace pq
