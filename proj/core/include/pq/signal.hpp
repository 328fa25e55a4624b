#pragma once

// The data-analysis chain applied to pendulum traces: slow/fast separation,
// envelopes and populations, smoothed spectra, Husimi maps, window averages.

#include <complex>
#include <cstddef>
#include <vector>

#include "pq/error.hpp"

namespace pq {

struct TimeSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double t_end() const { return time(values.size() - 1); }
  // Throws SignalError unless dt > 0 and there are at least two samples.
  void validate() const;
};

struct ComplexSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::complex<double>> values;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

// Throws SignalError if the grids of a and b differ.
void require_same_grid(const TimeSeries& a, const TimeSeries& b);

// Convolution with a normalized Gaussian truncated at +-4 sigma. The input is
// mirrored about its end points (d c b a | a b c d), which keeps the sum of
// the series unchanged. Throws SignalError if sigma <= dt.
TimeSeries gaussian_lowpass(const TimeSeries& series, double sigma);

struct Timescales {
  TimeSeries xi;        // slow part (quasistatic deflection)
  TimeSeries phi_fast;  // series - xi
};
Timescales split_timescales(const TimeSeries& series, double sigma);

// |Psi|^2 = lowpass(phi^2) / 2 for phi = Psi exp(-i w0 t) + c.c.
TimeSeries envelope_sq(const TimeSeries& phi_fast, double sigma);

struct ModePair {
  TimeSeries plus;
  TimeSeries minus;
};
// phi_+- = (phi1 +- phi2) / 2
ModePair mode_transform(const TimeSeries& phi1, const TimeSeries& phi2);
// phi1 = phi_+ + phi_-, phi2 = phi_+ - phi_-
ModePair inverse_mode_transform(const TimeSeries& plus, const TimeSeries& minus);

// Pointwise normalization to unit sum. Throws SignalError when the total
// vanishes at some sample.
std::vector<TimeSeries> populations(const std::vector<TimeSeries>& envelopes);

// lowpass(phi_a phi_b) / 2 = Re(Psi_a^* Psi_b). For the two modes it
// oscillates at the instantaneous splitting of the adiabatic eigenmodes.
TimeSeries mode_coherence(const TimeSeries& phi_a, const TimeSeries& phi_b, double sigma);

struct SpectralPeak {
  double frequency = 0.0;  // Hz
  double magnitude = 0.0;  // smoothed magnitude at the peak
};

struct Spectrum {
  std::vector<double> frequencies;  // Hz, uniform from 0
  std::vector<double> magnitudes;   // |DFT| * dt
  std::vector<double> smoothed;
  double smoothing_sigma = 0.0;     // Hz
  std::vector<SpectralPeak> peaks;  // descending magnitude

  double df() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
};

inline constexpr double kDefaultPeakThreshold = 0.05;

// One-sided magnitude spectrum, no window. smoothing_sigma = 0 disables the
// smoothing. Peaks are interior local maxima of the smoothed spectrum above
// `threshold` times its maximum, refined by a parabola through three bins.
// Throws SignalError for fewer than 64 samples.
Spectrum spectrum(const TimeSeries& series, double smoothing_sigma, double threshold = kDefaultPeakThreshold);

// Strongest spectral line in [f_lo, f_hi] Hz after mean removal, Hann
// window and 8x zero padding, refined by a parabola through log magnitudes.
double dominant_frequency(const TimeSeries& series, double f_lo, double f_hi);

struct HusimiMap {
  std::vector<double> t;      // s
  std::vector<double> omega;  // rad/s, uniform
  std::vector<double> Q;      // row-major, Q[i * omega.size() + j] at (t[i], omega[j])
  double sigma = 0.0;         // s

  double at(std::size_t i, std::size_t j) const { return Q[i * omega.size() + j]; }
  // Index of the largest Q over omega for each time.
  std::vector<std::size_t> ridge_index() const;
  std::vector<double> ridge() const;
};

// Q(t, w) = |sum_n exp(-(t - t_n)^2 / 2 sigma^2) exp(i w t_n) Psi_n dt|^2,
// truncated at +-5 sigma. The omega grid must be uniform; t must lie within
// the series. A signal exp(-i E t) puts the ridge at w = E.
HusimiMap husimi(const ComplexSeries& series, double sigma, const std::vector<double>& omega_grid,
                 const std::vector<double>& t_grid);
HusimiMap husimi(const TimeSeries& series, double sigma, const std::vector<double>& omega_grid,
                 const std::vector<double>& t_grid);

// Arithmetic mean over the samples with t in [center - hw, center + hw].
double window_average(const TimeSeries& P, double center, double half_width);

std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace pq
