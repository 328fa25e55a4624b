#include <gtest/gtest.h>

#include <cmath>

#include "pq/error.hpp"
#include "pq/model.hpp"

using namespace pq;

namespace {

ApparatusParams no_magnets() {
  ApparatusParams p;
  p.magnets.m_lower = 0.0;
  p.magnets.upper_present = false;
  return p;
}

}  // namespace

TEST(Model, DefaultsFollowTheTables) {
  const ApparatusParams p;
  EXPECT_DOUBLE_EQ(p.consts.mu0, 4e-7 * kPi);
  EXPECT_DOUBLE_EQ(p.consts.g, 9.807232);
  EXPECT_NEAR(rad_to_hz(p.pendula.omega1), 0.53365, 1e-12);
  EXPECT_NEAR(rad_to_hz(p.pendula.omega2), 0.52195, 1e-12);
  EXPECT_NO_THROW(p.validate());
}

TEST(Model, MomentOfInertiaFromReducedLength) {
  const ApparatusParams p;
  const double lr = p.consts.g / (p.pendula.omega1 * p.pendula.omega1);
  EXPECT_NEAR(p.J1(), p.pendula.mass * p.pendula.lc1 * lr, 1e-12);
}

TEST(Model, ValidateRejectsBadFields) {
  ApparatusParams p;
  p.magnets.L = -0.3;
  try {
    p.validate();
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("L"), std::string::npos);
  }
  ApparatusParams q;
  q.pendula.omega2 = 0.8 * q.pendula.omega1;  // |Delta| > 0.1 omega0
  EXPECT_THROW(q.validate(), DomainError);
  ApparatusParams r;
  r.pendula.mass = 0.0;
  EXPECT_THROW(r.validate(), DomainError);
}

TEST(Model, InteractionEnergiesClosedForm) {
  ApparatusParams p;
  p.magnets.L = 0.330;
  p.magnets.upper_present = true;
  const auto G = interaction_energies(p);
  const double Gl = 6.0 * p.consts.mu0 * std::pow(p.magnets.m_lower * p.pendula.l_lower, 2) /
                    (kPi * std::pow(p.magnets.L, 5));
  const double Gu = 6.0 * p.consts.mu0 * std::pow(p.magnets.m_upper * p.pendula.l_upper, 2) /
                    (kPi * std::pow(p.magnets.L_upper, 5));
  EXPECT_NEAR(G.G_lower, Gl, 1e-12 * Gl);
  EXPECT_NEAR(G.G_upper, Gu, 1e-12 * Gu);
  // Table range for the lower pair
  EXPECT_GT(G.G_lower, 0.1);
  EXPECT_LT(G.G_lower, 5.6);
}

TEST(Model, InteractionEnergyScalesAsInverseFifthPower) {
  ApparatusParams a;
  ApparatusParams b;
  a.magnets.L = 0.3;
  b.magnets.L = 0.6;
  EXPECT_NEAR(interaction_energies(b).G_lower / interaction_energies(a).G_lower, 1.0 / 32.0, 1e-14);
  EXPECT_EQ(interaction_energies(a).G_upper, 0.0);
}

TEST(Model, RawModulation) {
  ApparatusParams p;
  const double T = kTwoPi / p.magnets.Omega;
  const auto G = interaction_energies(p);
  const auto r0 = raw_modulation(0.0, p);
  EXPECT_NEAR(r0.G, G.G_lower, 1e-14);
  EXPECT_NEAR(r0.F, p.magnets.L / (4.0 * p.pendula.l_lower) * G.G_lower, 1e-14);
  EXPECT_NEAR(raw_modulation(T / 4.0, p).G, 0.0, 1e-12 * G.G_lower);

  p.magnets.upper_present = true;
  const auto Gu = interaction_energies(p).G_upper;
  EXPECT_NEAR(raw_modulation(T / 4.0, p).G, Gu, 1e-12 * Gu);
  const auto avg = fourier_projection([&](double t) { return raw_modulation(t, p).G; }, p.magnets.Omega, 256);
  EXPECT_NEAR(avg.mean, Gu, 1e-12 * Gu);
}

TEST(Model, QuasistaticWithoutMagnetsIsVertical) {
  const auto q = quasistatic_deflection(12.0, no_magnets());
  EXPECT_EQ(q.phi1, 0.0);
  EXPECT_EQ(q.phi2, 0.0);
}

TEST(Model, QuasistaticSymmetricLimit) {
  ApparatusParams p;
  p.pendula.omega2 = p.pendula.omega1;
  for (double t : {0.0, 10.0, 33.0}) {
    const auto e = quasistatic_deflection(t, p, QuasistaticForm::exact);
    const auto s = quasistatic_deflection(t, p, QuasistaticForm::symmetric);
    EXPECT_NEAR(e.phi1, s.phi1, 1e-12 * std::abs(s.phi1) + 1e-18);
    EXPECT_NEAR(e.phi2, s.phi2, 1e-12 * std::abs(s.phi2) + 1e-18);
    EXPECT_NEAR(s.phi1, -s.phi2, 1e-18);
  }
}

TEST(Model, QuasistaticDeflectionBound) {
  ApparatusParams p;
  p.magnets.L = 0.240;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto q = quasistatic_deflection(i * (kTwoPi / p.magnets.Omega) / 200.0, p);
    worst = std::max({worst, std::abs(q.phi1), std::abs(q.phi2)});
  }
  EXPECT_GT(worst, 0.0);
  EXPECT_LT(worst, 0.014);
}

TEST(Model, QuasistaticSingularity) {
  ApparatusParams p;
  p.magnets.L = 0.05;  // far beyond the mechanical instability
  EXPECT_THROW(quasistatic_deflection(0.0, p), SingularityError);
}

TEST(Model, CouplingWithoutCorrection) {
  const ApparatusParams p;
  for (double t : {0.0, 7.0, 21.0}) {
    const double e = effective_coupling(t, p, CouplingOptions{false});
    EXPECT_NEAR(e, raw_modulation(t, p).G / (p.omega0() * p.J0()), 1e-15);
  }
}

TEST(Model, StrongCouplingReachesInverseSecondScale) {
  ApparatusParams p;
  p.magnets.L = 0.208;
  const auto r = coupling_extremes(p);
  EXPECT_GT(std::max(std::abs(r.min), std::abs(r.max)), 0.3);
  EXPECT_LT(std::max(std::abs(r.min), std::abs(r.max)), 3.0);
}

TEST(Model, FourierProjectionIsExactOnACosine) {
  const double Omega = 0.07;
  const auto f = fourier_projection([&](double t) { return 0.013 + 0.021 * std::cos(Omega * t); }, Omega, 1024);
  EXPECT_NEAR(f.mean, 0.013, 1e-6 * 0.013);
  EXPECT_NEAR(f.cos_amplitude, 0.021, 1e-6 * 0.021);
}

TEST(Model, StaticMagnetsGiveNoModulation) {
  ApparatusParams p;
  p.magnets.m_lower = 0.0;
  p.magnets.upper_present = true;
  const auto tls = effective_tls_params(p);
  EXPECT_NEAR(tls.A, 0.0, 1e-12);
  EXPECT_NEAR(tls.eps0, effective_coupling(0.0, p), 1e-12);
  EXPECT_DOUBLE_EQ(tls.Delta, p.Delta());
}

TEST(Model, TlsParamsRejectBadInput) {
  ApparatusParams p;
  p.magnets.Omega = 0.0;
  EXPECT_THROW(effective_tls_params(p), DomainError);
  EXPECT_THROW(effective_tls_params(ApparatusParams{}, 16), DomainError);
}

TEST(Model, ModulationMonotoneAndInverseFifthInTail) {
  double prev_A = INFINITY;
  double prev_e = INFINITY;
  for (double L = 0.208; L <= 0.454 + 1e-9; L += 0.02) {
    ApparatusParams p;
    p.magnets.L = L;
    const auto tls = effective_tls_params(p);
    EXPECT_LT(tls.A, prev_A);
    EXPECT_LT(tls.eps0, prev_e);
    prev_A = tls.A;
    prev_e = tls.eps0;
  }
  ApparatusParams a;
  ApparatusParams b;
  a.magnets.L = 0.60;
  b.magnets.L = 0.70;
  const double slope = std::log(effective_tls_params(b).A / effective_tls_params(a).A) / std::log(0.70 / 0.60);
  EXPECT_NEAR(slope, -5.0, 0.01);
}

TEST(Model, ParamsFromExtremes) {
  auto e = params_from_extremes(-0.2, 0.2);
  EXPECT_DOUBLE_EQ(e.A, 0.2);
  EXPECT_DOUBLE_EQ(e.eps0, 0.0);
  e = params_from_extremes(0.0, 0.4);
  EXPECT_DOUBLE_EQ(e.A, 0.2);
  EXPECT_DOUBLE_EQ(e.eps0, 0.2);
  EXPECT_THROW(params_from_extremes(1.0, 0.0), DomainError);
}

TEST(Model, ExtremesAgreeWithFourierPath) {
  for (double L : {0.33, 0.40, 0.454}) {
    ApparatusParams p;
    p.magnets.L = L;
    const auto tls = effective_tls_params(p);
    const auto r = coupling_extremes(p);
    const auto x = params_from_extremes(r.min, r.max);
    EXPECT_NEAR(x.A / tls.A, 1.0, 0.05) << "L = " << L;
  }
}

TEST(Model, DipoleGeometryAtRest) {
  const auto d = dipole_configuration(0.0, 0.0, 0.45, 1.148);
  EXPECT_DOUBLE_EQ(d.R, 0.45);
  EXPECT_DOUBLE_EQ(d.psi, 0.0);
  // Equal deflections translate both magnets by the same vector to first order.
  const auto s = dipole_configuration(0.01, 0.01, 0.45, 1.148);
  EXPECT_NEAR(s.R, 0.45, 1e-12);
}

TEST(Model, ValidityReport) {
  const ApparatusParams p;
  const auto ok = validity(effective_tls_params(p), p.omega0());
  EXPECT_TRUE(ok.envelope_valid);
  const auto bad = validity(TlsParams{0.01, 0.5, 0.5, 0.01}, p.omega0());
  EXPECT_FALSE(bad.envelope_valid);
  EXPECT_FALSE(bad.notes.empty());
}
