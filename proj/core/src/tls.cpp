#include "pq/tls.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace pq {

std::string_view to_string(Basis b) { return b == Basis::individual ? "individual" : "modes"; }

Basis basis_from_string(std::string_view s) {
  if (s == "individual") return Basis::individual;
  if (s == "modes") return Basis::modes;
  throw DomainError("unknown basis tag '" + std::string(s) + "'");
}

namespace {

EnvelopeState apply_s(const EnvelopeState& s, Basis target) {
  constexpr double r = 1.0 / std::numbers::sqrt2;
  return {r * (s.a + s.b), r * (s.a - s.b), target};
}

}  // namespace

EnvelopeState to_modes(const EnvelopeState& s) {
  return s.basis == Basis::modes ? s : apply_s(s, Basis::modes);
}

EnvelopeState to_individual(const EnvelopeState& s) {
  return s.basis == Basis::individual ? s : apply_s(s, Basis::individual);
}

DriveWaveform DriveWaveform::table(double t0, double dt, std::vector<double> values) {
  if (!(dt > 0.0)) throw DomainError("drive table: dt must be positive");
  if (values.size() < 2) throw DomainError("drive table needs at least two samples");
  return DriveWaveform(Table{t0, dt, std::move(values)});
}

double DriveWaveform::operator()(double t) const {
  struct Visitor {
    double t;
    double operator()(const Harmonic& h) const { return h.eps0 + h.A * std::cos(h.Omega * t); }
    double operator()(const Sweep& s) const { return s.v * (t - s.t_cross); }
    double operator()(const Table& tab) const {
      const double x = (t - tab.t0) / tab.dt;
      const auto last = static_cast<double>(tab.values.size() - 1);
      if (x <= 0.0) return tab.values.front();
      if (x >= last) return tab.values.back();
      const auto i = static_cast<std::size_t>(x);
      const double frac = x - static_cast<double>(i);
      return tab.values[i] + frac * (tab.values[i + 1] - tab.values[i]);
    }
  };
  return std::visit(Visitor{t}, form_);
}

double DriveWaveform::magnitude_bound() const {
  if (const auto* h = std::get_if<Harmonic>(&form_)) return std::abs(h->eps0) + std::abs(h->A);
  if (const auto* tab = std::get_if<Table>(&form_)) {
    double m = 0.0;
    for (double v : tab->values) m = std::max(m, std::abs(v));
    return m;
  }
  return std::numeric_limits<double>::infinity();
}

void DriveWaveform::require_coverage(double t0, double t1) const {
  if (const auto* tab = std::get_if<Table>(&form_)) {
    const double end = tab->t0 + tab->dt * static_cast<double>(tab->values.size() - 1);
    const double slack = 1e-9 * tab->dt;
    if (t0 < tab->t0 - slack || t1 > end + slack) {
      throw DomainError("drive table does not cover the requested time span");
    }
  }
}

Mat2 hamiltonian_rabi(double t, double Delta, const DriveWaveform& drive) {
  const double eps = drive(t);
  return {0.5 * (Delta - eps), 0.5 * eps, 0.5 * eps, 0.5 * (-Delta - eps)};
}

Mat2 hamiltonian_lz(double t, double Delta, const DriveWaveform& drive) {
  const double eps = drive(t);
  return {0.0, 0.5 * Delta, 0.5 * Delta, -eps};
}

Mat2 TlsHamiltonian::operator()(double t) const {
  Mat2 H = basis == Basis::individual ? hamiltonian_rabi(t, Delta, drive) : hamiltonian_lz(t, Delta, drive);
  if (gauge == Gauge::traceless) {
    const cplx shift = 0.5 * H.trace();
    H.m00 -= shift;
    H.m11 -= shift;
  }
  return H;
}

Mat2 propagator(const Mat2& H, double dt) {
  const double h0 = 0.5 * (H.m00.real() + H.m11.real());
  const double hz = 0.5 * (H.m00.real() - H.m11.real());
  const cplx off = H.m01;  // hx - i hy
  const double r = std::sqrt(hz * hz + std::norm(off));
  const double c = std::cos(r * dt);
  // sin(r dt) / r, finite at r = 0
  const double s = r * dt > 1e-8 ? std::sin(r * dt) / r : dt * (1.0 - r * r * dt * dt / 6.0);
  const cplx phase = std::polar(1.0, -h0 * dt);
  const cplx mi(0.0, -1.0);
  return {phase * (c + mi * s * hz), phase * (mi * s * off), phase * (mi * s * std::conj(off)),
          phase * (c - mi * s * hz)};
}

double default_tls_step(double Delta, const DriveWaveform& drive) {
  double scale = std::abs(Delta);
  if (const auto* h = drive.as_harmonic()) {
    scale = std::max({scale, std::abs(h->eps0) + std::abs(h->A), std::abs(h->Omega)});
  } else {
    const double bound = drive.magnitude_bound();
    if (std::isfinite(bound)) {
      scale = std::max(scale, bound);
    } else {
      // linear sweep: the relevant scale is sqrt(|v|)
      scale = std::max(scale, std::sqrt(std::abs(drive(1.0) - drive(0.0))));
    }
  }
  if (!(scale > 0.0)) return 0.01;
  return 0.01 / scale;
}

double rabi_frequency(const ApparatusParams& p) {
  if (p.magnets.upper_present) {
    throw DomainError("rabi_frequency applies to the lower magnet pair alone (upper magnets present)");
  }
  return interaction_energies(p).G_lower / (2.0 * p.omega0() * p.J0());
}

RabiResponse effective_rabi(double Delta, double Omega, double Omega_R) {
  if (Omega_R < 0.0) throw DomainError("effective_rabi: Omega_R must be non-negative");
  const double Omega_eff = std::hypot(Delta - Omega, Omega_R);
  if (Omega_eff == 0.0) throw DomainError("effective_rabi: Omega_eff = 0, visibility undefined");
  return {Omega_eff, Omega_R * Omega_R / (Omega_eff * Omega_eff)};
}

double sweep_velocity(double Omega, double A, double eps0) {
  if (A < std::abs(eps0)) {
    throw NoCrossingError("drive never crosses eps = 0 (A < |eps0|)");
  }
  return std::abs(Omega) * std::sqrt(A * A - eps0 * eps0);
}

double lz_probability(double Delta, double v) {
  if (v == 0.0) throw DomainError("lz_probability: sweep velocity must be non-zero");
  return std::exp(-kPi * Delta * Delta / (2.0 * std::abs(v)));
}

AdiabaticEigenvalues adiabatic_eigenvalues(double eps, double Delta) {
  const double E = std::hypot(Delta, eps);
  return {0.5 * (-eps + E), 0.5 * (-eps - E)};
}

EnvelopeState adiabatic_eigenvector(double eps, double Delta, bool upper) {
  // (H - w) x = 0 with H = [[0, D/2], [D/2, -eps]]
  const auto ev = adiabatic_eigenvalues(eps, Delta);
  const double w = upper ? ev.w_plus : ev.w_minus;
  double a = 0.5 * Delta;
  double b = w;
  if (std::abs(a) + std::abs(b) < 1e-300) {
    // Delta = 0 and w = 0: the eigenvector is Psi_+.
    a = 1.0;
    b = 0.0;
  } else if (Delta == 0.0) {
    // w = -eps: the eigenvector is Psi_-.
    a = 0.0;
    b = 1.0;
  }
  const double n = std::hypot(a, b);
  return {cplx(a / n, 0.0), cplx(b / n, 0.0), Basis::modes};
}

AdiabaticPhase adiabatic_phase(const DriveWaveform& drive, double Delta, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw DomainError("adiabatic_phase: dt must be positive");
  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  AdiabaticPhase out;
  out.B_cumulative.reserve(steps + 1);
  out.Phi_cumulative.reserve(steps + 1);
  out.B_cumulative.push_back(0.0);
  out.Phi_cumulative.push_back(0.0);
  double e_prev = drive(t0);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double e = drive(t0 + dt * static_cast<double>(i));
    out.B += 0.5 * dt * (e_prev + e);
    out.Phi_ad += 0.5 * dt * (std::hypot(Delta, e_prev) + std::hypot(Delta, e));
    out.B_cumulative.push_back(out.B);
    out.Phi_cumulative.push_back(out.Phi_ad);
    e_prev = e;
  }
  return out;
}

}  // namespace pq
