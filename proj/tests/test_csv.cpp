#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "pq/csv.hpp"
#include "pq/error.hpp"

using namespace pq;

namespace {

CsvTable reparse(const CsvTable& t) {
  std::istringstream in(to_csv_string(t));
  return parse_csv(in);
}

}  // namespace

TEST(Csv, Format) {
  CsvTable t{{"a", "b"}, {{"1", "0.5"}, {"2", "-3"}}};
  EXPECT_EQ(to_csv_string(t), "a,b\n1,0.5\n2,-3\n");
  const auto back = reparse(t);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.column("b"), 1u);
  EXPECT_DOUBLE_EQ(back.number(1, 1), -3.0);
  EXPECT_THROW(back.column("c"), IoError);
}

TEST(Csv, RejectsRaggedRows) {
  std::istringstream in("a,b\n1,2\n3\n");
  EXPECT_THROW(parse_csv(in), IoError);
  EXPECT_THROW(read_csv("/nonexistent/x.csv"), IoError);
}

TEST(Csv, TrajectoryRoundTrip) {
  Trajectory tr{0.5, 0.01, {}};
  for (int i = 0; i < 5; ++i) tr.samples.push_back({0.1 / (i + 1), -1.0 / 3.0, 1e-17 * i, kPi, Frame::lab});
  const auto back = read_trajectory(reparse(trajectory_table(tr)));
  EXPECT_EQ(back.t0, tr.t0);
  EXPECT_NEAR(back.dt, tr.dt, 1e-15);
  ASSERT_EQ(back.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(back.samples[i].phi1, tr.samples[i].phi1);
    EXPECT_EQ(back.samples[i].phi2, tr.samples[i].phi2);
    EXPECT_EQ(back.samples[i].dphi1, tr.samples[i].dphi1);
    EXPECT_EQ(back.samples[i].frame, tr.samples[i].frame);
  }
}

TEST(Csv, EnvelopeAndPopulationsRoundTrip) {
  EnvelopeTrajectory e{0.0, 0.25, {{cplx(0.6, 0.1), cplx(-0.2, 0.7), Basis::modes},
                                   {cplx(0.5, 0.2), cplx(-0.3, 0.6), Basis::modes}}};
  const auto eb = read_envelope(reparse(envelope_table(e)));
  ASSERT_EQ(eb.size(), 2u);
  EXPECT_EQ(eb.samples[1].b, e.samples[1].b);
  EXPECT_EQ(eb.samples[1].basis, Basis::modes);

  PopulationRun p;
  p.basis = Basis::individual;
  p.P_a = {1.0, 0.5, {0.9, 0.8, 0.1}};
  p.P_b = {1.0, 0.5, {0.1, 0.2, 0.9}};
  const auto table = populations_table(p);
  EXPECT_EQ(table.header, (std::vector<std::string>{"t", "P1", "P2"}));
  const auto pb = read_populations(reparse(table));
  EXPECT_EQ(pb.P_a.values, p.P_a.values);
  EXPECT_EQ(pb.P_b.t0, 1.0);
  EXPECT_EQ(pb.basis, Basis::individual);
}

TEST(Csv, FanShapeAndRoundTrip) {
  FanDiagram f;
  f.eps0 = {0.0, 0.1, 0.2};
  f.A = {0.0, 0.15, 0.3};
  for (int i = 0; i < 9; ++i) {
    f.P.push_back(i == 8 ? kUnstableCell : 0.1 * i);
    f.unstable.push_back(i == 8);
    f.P_initial.push_back(0.01 * i);
  }
  const auto table = fan_table(f);
  EXPECT_EQ(table.rows.size(), 9u);
  EXPECT_EQ(table.rows[1][0], "0.1");  // eps0 varies fastest
  const auto back = read_fan(reparse(table));
  EXPECT_EQ(back.eps0, f.eps0);
  EXPECT_EQ(back.A, f.A);
  EXPECT_EQ(back.P, f.P);
  EXPECT_EQ(back.unstable, f.unstable);
}

TEST(Csv, RabiAndEigenRoundTrip) {
  RabiScan s;
  s.points = {{0.07, 0.005, 0.98, 0.005, 1.0}, {0.08, 0.011, 0.2, 0.0112, 0.199}};
  const auto rb = read_rabi(reparse(rabi_table(s)));
  ASSERT_EQ(rb.size(), 2u);
  EXPECT_EQ(rb[1].visibility_model, 0.199);

  EigenTable t;
  EigenRow ok{0.01, {3.4, 0.0}, {3.2, 0.0}, 3.41, 3.21, 0.01, false};
  EigenRow bad{4.0, {5.0, 0.0}, {0.0, 1.2}, 3.0, 1.0, std::numeric_limits<double>::infinity(), true};
  t.rows = {ok, bad};
  const auto eb = read_eigen(reparse(eigen_table(t)));
  ASSERT_EQ(eb.rows.size(), 2u);
  EXPECT_EQ(eb.rows[1].newton_lo, bad.newton_lo);
  EXPECT_TRUE(std::isinf(eb.rows[1].deviation));
  EXPECT_TRUE(eb.rows[1].unstable);
  EXPECT_EQ(eb.rows[0].tls_minus, 3.21);
}

TEST(Csv, SpectraPeaksHusimiRoundTrip) {
  ChannelSpectrum ch;
  ch.run = "driven";
  ch.channel = "phi_minus";
  ch.spectrum.frequencies = {0.0, 0.001, 0.002};
  ch.spectrum.magnitudes = {1.0, 2.0, 0.5};
  ch.spectrum.smoothed = {1.1, 1.9, 0.6};
  ch.peaks = {{0.001, 1.9, -0.01, 0.3}};
  const auto sb = read_spectra(reparse(spectra_table({ch})));
  ASSERT_EQ(sb.size(), 1u);
  EXPECT_EQ(sb[0].run, "driven");
  EXPECT_EQ(sb[0].spectrum.smoothed, ch.spectrum.smoothed);
  const auto pb = read_peaks(reparse(peaks_table({ch})));
  ASSERT_EQ(pb.size(), 1u);
  EXPECT_EQ(pb[0].channel, "phi_minus");
  EXPECT_EQ(pb[0].peak.eps_inferred, 0.3);

  HusimiMap m;
  m.t = {0.0, 1.0};
  m.omega = {3.0, 3.1, 3.2};
  m.Q = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto hb = read_husimi(reparse(husimi_table(m)));
  EXPECT_EQ(hb.t, m.t);
  EXPECT_EQ(hb.omega, m.omega);
  EXPECT_EQ(hb.Q, m.Q);
}

TEST(Csv, Manifest) {
  RunManifest m{"lz", "schrodinger", "0.3.0", 1.25, {"populations.csv", "manifest.txt"}, {"P_bar = 0.6"}, "[lz]\nA = 1 rad/s\n"};
  const std::string s = manifest_string(m);
  EXPECT_NE(s.find("subcommand: lz"), std::string::npos);
  EXPECT_NE(s.find("populations.csv"), std::string::npos);
  EXPECT_NE(s.find("  A = 1 rad/s"), std::string::npos);
  EXPECT_NE(s.find("determinism"), std::string::npos);
  EXPECT_NE(s.find("elapsed_s: 1.250"), std::string::npos);
}
