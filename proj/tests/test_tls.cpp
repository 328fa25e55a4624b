#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pq/error.hpp"
#include "pq/model.hpp"
#include "pq/tls.hpp"

using namespace pq;

namespace {

bool hermitian(const Mat2& H) {
  return std::abs(H.m01 - std::conj(H.m10)) < 1e-15 && std::abs(H.m00.imag()) < 1e-15 &&
         std::abs(H.m11.imag()) < 1e-15;
}

// Naive Taylor series of exp(-i H dt), independent of the closed form.
Mat2 taylor_exp(const Mat2& H, double dt) {
  const cplx f(0.0, -dt);
  Mat2 term{1, 0, 0, 1};
  Mat2 sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * H;
    term = {term.m00 * f / double(k), term.m01 * f / double(k), term.m10 * f / double(k), term.m11 * f / double(k)};
    sum = {sum.m00 + term.m00, sum.m01 + term.m01, sum.m10 + term.m10, sum.m11 + term.m11};
  }
  return sum;
}

}  // namespace

TEST(Tls, HamiltonianRabi) {
  const auto drive = DriveWaveform::harmonic(0.3, 0.0, 0.0);
  const Mat2 H = hamiltonian_rabi(0.0, 0.1, drive);
  EXPECT_NEAR(H.m00.real(), 0.5 * (0.1 - 0.3), 1e-15);
  EXPECT_NEAR(H.m11.real(), 0.5 * (-0.1 - 0.3), 1e-15);
  EXPECT_NEAR(H.m01.real(), 0.15, 1e-15);
  EXPECT_NEAR(H.trace().real(), -0.3, 1e-15);
  EXPECT_TRUE(hermitian(H));
  const Mat2 H0 = hamiltonian_rabi(0.0, 0.1, DriveWaveform{});
  EXPECT_EQ(H0.m01, cplx(0.0));
  EXPECT_DOUBLE_EQ(H0.m00.real(), 0.05);
}

TEST(Tls, HamiltonianLzEigenvalues) {
  const double Delta = 0.07, eps = -0.12;
  const Mat2 H = hamiltonian_lz(0.0, Delta, DriveWaveform::harmonic(eps, 0.0, 0.0));
  EXPECT_TRUE(hermitian(H));
  EXPECT_EQ(H.m00, cplx(0.0));
  const double tr = H.trace().real();
  const double det = (H.m00 * H.m11 - H.m01 * H.m10).real();
  const double disc = std::sqrt(tr * tr / 4 - det);
  const auto w = adiabatic_eigenvalues(eps, Delta);
  EXPECT_NEAR(w.w_plus, tr / 2 + disc, 1e-15);
  EXPECT_NEAR(w.w_minus, tr / 2 - disc, 1e-15);
}

TEST(Tls, BasisTransformMapsRabiToLz) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  const Mat2 S{s, s, s, -s};
  for (int i = 0; i < 20; ++i) {
    const double Delta = u(rng), eps = u(rng);
    const auto drive = DriveWaveform::harmonic(eps, 0.0, 0.0);
    const Mat2 R = S * hamiltonian_rabi(0.0, Delta, drive) * S;
    const Mat2 L = hamiltonian_lz(0.0, Delta, drive);
    const cplx shift = R.m00 - L.m00;
    EXPECT_NEAR(std::abs(R.m11 - L.m11 - shift), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(R.m01 - L.m01), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(R.m10 - L.m10), 0.0, 1e-14);
  }
}

TEST(Tls, PropagatorAgainstTaylorSeries) {
  const Mat2 H{cplx(0.2), cplx(0.1, -0.3), cplx(0.1, 0.3), cplx(-0.5)};
  const Mat2 U = propagator(H, 0.7);
  const Mat2 V = taylor_exp(H, 0.7);
  EXPECT_NEAR(std::abs(U.m00 - V.m00), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(U.m01 - V.m01), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(U.m10 - V.m10), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(U.m11 - V.m11), 0.0, 1e-13);
  const Mat2 I = U * U.adjoint();
  EXPECT_NEAR(std::abs(I.m00 - 1.0) + std::abs(I.m01), 0.0, 1e-14);
}

TEST(Tls, ZeroHamiltonianKeepsState) {
  const TlsHamiltonian H{Basis::modes, 0.0, DriveWaveform{}, Gauge::as_written};
  const EnvelopeState s0{cplx(0.6, 0.0), cplx(0.0, 0.8), Basis::modes};
  const auto end = propagate(s0, H, 0.0, 10.0, 0.1, [](double, const EnvelopeState&) {});
  EXPECT_NEAR(std::abs(end.a - s0.a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(end.b - s0.b), 0.0, 1e-15);
}

TEST(Tls, DiagonalEvolutionPhase) {
  const double eps = 0.3;
  const TlsHamiltonian H{Basis::modes, 0.0, DriveWaveform::harmonic(eps, 0.0, 0.0), Gauge::as_written};
  const auto traj = evolve(EnvelopeState{0.0, 1.0, Basis::modes}, H, 0.0, 5.0, 0.01);
  for (std::size_t i = 0; i < traj.size(); i += 50) {
    const double t = traj.time(i);
    EXPECT_NEAR(traj.samples[i].population_b(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(traj.samples[i].b - std::exp(cplx(0.0, eps * t))), 0.0, 1e-12);
  }
}

TEST(Tls, ModesPopulationsConstantWithoutSplitting) {
  const TlsHamiltonian H{Basis::modes, 0.0, DriveWaveform::harmonic(0.1, 0.3, 0.05), Gauge::as_written};
  const auto traj = evolve(EnvelopeState{0.6, 0.8, Basis::modes}, H, 0.0, 200.0, 0.05);
  for (const auto& s : traj.samples) EXPECT_NEAR(s.population_a(), 0.36, 1e-12);
}

TEST(Tls, UnitarityOverLongRun) {
  const TlsHamiltonian H{Basis::individual, 0.05, DriveWaveform::harmonic(0.02, 0.1, 0.03), Gauge::traceless};
  const EnvelopeState s0{cplx(0.3, 0.2), cplx(-0.1, 0.9), Basis::individual};
  const auto end = propagate(s0, H, 0.0, 2000.0, 0.01, [](double, const EnvelopeState&) {});
  EXPECT_LT(std::abs(end.norm() / s0.norm() - 1.0), 1e-12);
}

TEST(Tls, BasisCovariance) {
  const double Delta = 0.04;
  const auto drive = DriveWaveform::harmonic(0.01, 0.08, 0.02);
  const EnvelopeState s0{cplx(0.8), cplx(0.0, 0.6), Basis::individual};
  const auto ind = propagate(s0, TlsHamiltonian{Basis::individual, Delta, drive, Gauge::as_written}, 0.0, 300.0,
                             0.01, [](double, const EnvelopeState&) {});
  const auto mod = propagate(to_modes(s0), TlsHamiltonian{Basis::modes, Delta, drive, Gauge::as_written}, 0.0, 300.0,
                             0.01, [](double, const EnvelopeState&) {});
  const auto a = to_modes(ind);
  // equal up to a global phase
  const cplx phase = mod.a / a.a;
  EXPECT_NEAR(std::abs(phase), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(a.a * phase - mod.a) + std::abs(a.b * phase - mod.b), 0.0, 1e-9);
}

TEST(Tls, GaugeDoesNotChangePopulations) {
  const auto drive = DriveWaveform::harmonic(0.0, 0.1, 0.03);
  const EnvelopeState s0{1.0, 0.0, Basis::individual};
  const auto a = propagate(s0, TlsHamiltonian{Basis::individual, 0.03, drive, Gauge::as_written}, 0.0, 100.0, 0.01,
                           [](double, const EnvelopeState&) {});
  const auto b = propagate(s0, TlsHamiltonian{Basis::individual, 0.03, drive, Gauge::traceless}, 0.0, 100.0, 0.01,
                           [](double, const EnvelopeState&) {});
  EXPECT_NEAR(a.population_a(), b.population_a(), 1e-12);
}

TEST(Tls, ModeTransformInvolution) {
  const EnvelopeState s{cplx(0.3, 0.1), cplx(-0.2, 0.5), Basis::individual};
  const auto back = to_individual(to_modes(s));
  EXPECT_NEAR(std::abs(back.a - s.a) + std::abs(back.b - s.b), 0.0, 1e-15);
  EXPECT_EQ(to_modes(s).basis, Basis::modes);
}

TEST(Tls, DriveWaveform) {
  const auto h = DriveWaveform::harmonic(0.1, 0.2, 0.5);
  EXPECT_NEAR(h(1.0), 0.1 + 0.2 * std::cos(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(h.magnitude_bound(), 0.3);
  const auto s = DriveWaveform::sweep(0.02, 3.0);
  EXPECT_NEAR(s(5.0), 0.04, 1e-15);
  const auto tab = DriveWaveform::table(0.0, 0.5, {0.0, 1.0, 2.0});
  EXPECT_NEAR(tab(0.25), 0.5, 1e-15);
  EXPECT_THROW(tab.require_coverage(0.0, 2.0), DomainError);
  EXPECT_NO_THROW(tab.require_coverage(0.0, 1.0));
}

TEST(Tls, RabiFrequencyClosedForm) {
  const ApparatusParams p;
  const double expected = 3.0 * p.consts.mu0 * std::pow(p.magnets.m_lower * p.pendula.l_lower, 2) /
                          (kPi * p.omega0() * p.J0() * std::pow(p.magnets.L, 5));
  EXPECT_NEAR(rabi_frequency(p), expected, 1e-12 * expected);
  ApparatusParams q;
  q.magnets.L = 2.0 * p.magnets.L;
  EXPECT_NEAR(rabi_frequency(q) * 32.0, rabi_frequency(p), 1e-12 * expected);
}

TEST(Tls, RabiFrequencyPaperValues) {
  const struct {
    double L, f;
  } cases[] = {{0.4965, 0.47e-3}, {0.3300, 3.69e-3}, {0.4540, 0.71e-3}};
  for (const auto& c : cases) {
    ApparatusParams p;
    p.magnets.L = c.L;
    EXPECT_NEAR(rad_to_hz(rabi_frequency(p)) / c.f, 1.0, 0.15) << "L = " << c.L;
  }
}

TEST(Tls, EffectiveRabi) {
  const auto r = effective_rabi(0.2, 0.2, 0.01);
  EXPECT_DOUBLE_EQ(r.Omega_eff, 0.01);
  EXPECT_DOUBLE_EQ(r.visibility, 1.0);
  const auto far = effective_rabi(0.2, 0.3, 0.001);
  EXPECT_NEAR(far.visibility, 1e-4, 1e-7);
  double best = INFINITY, arg = 0.0;
  for (double Om = 0.1; Om < 0.3; Om += 1e-4) {
    const double v = effective_rabi(0.2, Om, 0.01).Omega_eff;
    if (v < best) best = v, arg = Om;
  }
  EXPECT_NEAR(arg, 0.2, 1e-4);
  EXPECT_NEAR(best, 0.01, 1e-6);
}

TEST(Tls, SweepVelocityAndLzProbability) {
  EXPECT_DOUBLE_EQ(std::abs(sweep_velocity(0.1, 0.2, 0.0)), 0.02);
  EXPECT_DOUBLE_EQ(sweep_velocity(0.1, 0.2, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(lz_probability(0.0, 1.0), 1.0);
  const double Delta = 0.3;
  const double v = kPi * Delta * Delta / (2.0 * std::log(2.0));
  EXPECT_NEAR(lz_probability(Delta, v), 0.5, 1e-15);
  EXPECT_NEAR(lz_probability(hz_to_rad(6.7e-3), 3.0e-3), 0.4, 0.02);
  EXPECT_GT(lz_probability(0.1, 0.2), lz_probability(0.1, 0.1));
  EXPECT_LT(lz_probability(0.2, 0.1), lz_probability(0.1, 0.1));
}

TEST(Tls, AdiabaticEigenvalues) {
  auto w = adiabatic_eigenvalues(0.0, 0.4);
  EXPECT_DOUBLE_EQ(w.w_plus, 0.2);
  EXPECT_DOUBLE_EQ(w.w_minus, -0.2);
  w = adiabatic_eigenvalues(0.3, 0.0);
  EXPECT_NEAR(w.w_plus, 0.0, 1e-16);
  EXPECT_NEAR(w.w_minus, -0.3, 1e-16);
  w = adiabatic_eigenvalues(-0.17, 0.05);
  EXPECT_NEAR(w.w_plus - w.w_minus, std::hypot(0.05, 0.17), 1e-15);
}

TEST(Tls, AdiabaticPhase) {
  auto ph = adiabatic_phase(DriveWaveform{}, 0.2, 0.0, 10.0, 0.01);
  EXPECT_NEAR(ph.Phi_ad, 2.0, 1e-12);
  ph = adiabatic_phase(DriveWaveform::harmonic(-0.3, 0.0, 0.0), 0.0, 0.0, 10.0, 0.01);
  EXPECT_NEAR(ph.B, -3.0, 1e-12);
  EXPECT_NEAR(ph.Phi_ad, 3.0, 1e-12);
  for (std::size_t i = 1; i < ph.Phi_cumulative.size(); ++i) {
    EXPECT_GE(ph.Phi_cumulative[i], ph.Phi_cumulative[i - 1]);
  }
}

TEST(Tls, LzSweepMatchesClosedForm) {
  const double Delta = 1.0;
  const double v = 2.0;
  // |eps| reaches 100 Delta at both ends; the finite-span ripple scales as Delta / eps_end
  const double T = 100.0 * Delta / v;
  const TlsHamiltonian H{Basis::modes, Delta, DriveWaveform::sweep(v), Gauge::as_written};
  const auto end = propagate(EnvelopeState{0.0, 1.0, Basis::modes}, H, -T, T, 2e-3,
                             [](double, const EnvelopeState&) {});
  EXPECT_NEAR(end.population_b(), lz_probability(Delta, v), 0.02);
}

TEST(Tls, DefaultStep) {
  EXPECT_DOUBLE_EQ(default_tls_step(0.5, DriveWaveform::harmonic(0.1, 0.2, 0.05)), 0.01 / 0.5);
  EXPECT_DOUBLE_EQ(default_tls_step(0.1, DriveWaveform::harmonic(0.3, 0.4, 0.05)), 0.01 / 0.7);
}

TEST(Tls, AdiabaticEigenvectorIsEigenvector) {
  const double eps = 0.2, Delta = 0.1;
  const Mat2 H = hamiltonian_lz(0.0, Delta, DriveWaveform::harmonic(eps, 0.0, 0.0));
  const auto w = adiabatic_eigenvalues(eps, Delta);
  for (bool upper : {true, false}) {
    EnvelopeState v = adiabatic_eigenvector(eps, Delta, upper);
    const double lam = upper ? w.w_plus : w.w_minus;
    const cplx a = H.m00 * v.a + H.m01 * v.b;
    const cplx b = H.m10 * v.a + H.m11 * v.b;
    EXPECT_NEAR(std::abs(a - lam * v.a) + std::abs(b - lam * v.b), 0.0, 1e-14);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  }
}
