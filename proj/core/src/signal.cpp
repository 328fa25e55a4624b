#include "pq/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pq/fft.hpp"

namespace pq {
namespace {

using cplx = std::complex<double>;

// Half-sample symmetric extension: ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} ...
std::size_t mirror(long long i, long long n) {
  const long long period = 2 * n;
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

// Gaussian smoothing with the width given in samples.
std::vector<double> smooth(const std::vector<double>& x, double sigma_samples) {
  const auto n = static_cast<long long>(x.size());
  const auto half = static_cast<long long>(std::ceil(4.0 * sigma_samples));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double norm = 0.0;
  for (long long j = -half; j <= half; ++j) {
    const double u = static_cast<double>(j) / sigma_samples;
    const double w = std::exp(-0.5 * u * u);
    kernel[static_cast<std::size_t>(j + half)] = w;
    norm += w;
  }
  for (double& w : kernel) w /= norm;

  std::vector<double> padded(static_cast<std::size_t>(n + 2 * half));
  for (long long i = -half; i < n + half; ++i) padded[static_cast<std::size_t>(i + half)] = x[mirror(i, n)];

  std::vector<double> y(x.size());
  const auto klen = static_cast<long long>(kernel.size());
  if (klen <= 96) {
    for (long long i = 0; i < n; ++i) {
      double acc = 0.0;
      const double* p = padded.data() + i;
      for (long long j = 0; j < klen; ++j) acc += kernel[static_cast<std::size_t>(j)] * p[j];
      y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
  }
  const auto full = fft::convolve(padded, kernel);
  std::copy(full.begin() + 2 * half, full.begin() + 2 * half + n, y.begin());
  return y;
}

TimeSeries like(const TimeSeries& grid, std::vector<double> values) { return {grid.t0, grid.dt, std::move(values)}; }

}  // namespace

void TimeSeries::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw SignalError("time series needs dt > 0");
  if (values.size() < 2) throw SignalError("time series needs at least two samples");
}

void require_same_grid(const TimeSeries& a, const TimeSeries& b) {
  const double tol = 1e-9 * std::max(a.dt, b.dt);
  if (a.size() != b.size() || std::abs(a.dt - b.dt) > tol || std::abs(a.t0 - b.t0) > tol) {
    throw SignalError("time series are not sampled on the same grid");
  }
}

TimeSeries gaussian_lowpass(const TimeSeries& series, double sigma) {
  series.validate();
  if (!(sigma > series.dt)) {
    std::ostringstream os;
    os << "lowpass width " << sigma << " s does not exceed the sampling step " << series.dt << " s";
    throw SignalError(os.str());
  }
  return like(series, smooth(series.values, sigma / series.dt));
}

Timescales split_timescales(const TimeSeries& series, double sigma) {
  TimeSeries xi = gaussian_lowpass(series, sigma);
  std::vector<double> fast(series.size());
  for (std::size_t i = 0; i < fast.size(); ++i) fast[i] = series.values[i] - xi.values[i];
  return {std::move(xi), like(series, std::move(fast))};
}

TimeSeries envelope_sq(const TimeSeries& phi_fast, double sigma) {
  std::vector<double> sq(phi_fast.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = phi_fast.values[i] * phi_fast.values[i];
  TimeSeries out = gaussian_lowpass(like(phi_fast, std::move(sq)), sigma);
  for (double& v : out.values) v *= 0.5;
  return out;
}

ModePair mode_transform(const TimeSeries& phi1, const TimeSeries& phi2) {
  require_same_grid(phi1, phi2);
  std::vector<double> p(phi1.size()), m(phi1.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = 0.5 * (phi1.values[i] + phi2.values[i]);
    m[i] = 0.5 * (phi1.values[i] - phi2.values[i]);
  }
  return {like(phi1, std::move(p)), like(phi1, std::move(m))};
}

ModePair inverse_mode_transform(const TimeSeries& plus, const TimeSeries& minus) {
  require_same_grid(plus, minus);
  std::vector<double> a(plus.size()), b(plus.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = plus.values[i] + minus.values[i];
    b[i] = plus.values[i] - minus.values[i];
  }
  return {like(plus, std::move(a)), like(plus, std::move(b))};
}

std::vector<TimeSeries> populations(const std::vector<TimeSeries>& envelopes) {
  if (envelopes.empty()) return {};
  for (const auto& e : envelopes) require_same_grid(envelopes.front(), e);
  std::vector<TimeSeries> out;
  out.reserve(envelopes.size());
  for (const auto& e : envelopes) out.push_back(like(e, std::vector<double>(e.size())));
  for (std::size_t i = 0; i < envelopes.front().size(); ++i) {
    double total = 0.0;
    for (const auto& e : envelopes) total += e.values[i];
    if (!(total > 0.0)) {
      std::ostringstream os;
      os << "populations: vanishing total at t = " << envelopes.front().time(i) << " s";
      throw SignalError(os.str());
    }
    for (std::size_t k = 0; k < envelopes.size(); ++k) out[k].values[i] = envelopes[k].values[i] / total;
  }
  return out;
}

TimeSeries mode_coherence(const TimeSeries& phi_a, const TimeSeries& phi_b, double sigma) {
  require_same_grid(phi_a, phi_b);
  std::vector<double> prod(phi_a.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = phi_a.values[i] * phi_b.values[i];
  TimeSeries out = gaussian_lowpass(like(phi_a, std::move(prod)), sigma);
  for (double& v : out.values) v *= 0.5;
  return out;
}

Spectrum spectrum(const TimeSeries& series, double smoothing_sigma, double threshold) {
  series.validate();
  if (series.size() < 64) throw SignalError("spectrum needs at least 64 samples");
  if (smoothing_sigma < 0.0) throw SignalError("spectrum: negative smoothing width");

  const std::size_t n = series.size();
  const auto X = fft::rfft(series.values, n);
  const double df = 1.0 / (static_cast<double>(n) * series.dt);

  Spectrum s;
  s.smoothing_sigma = smoothing_sigma;
  s.frequencies.resize(X.size());
  s.magnitudes.resize(X.size());
  for (std::size_t k = 0; k < X.size(); ++k) {
    s.frequencies[k] = df * static_cast<double>(k);
    s.magnitudes[k] = std::abs(X[k]) * series.dt;
  }
  s.smoothed = smoothing_sigma > 0.0 ? smooth(s.magnitudes, smoothing_sigma / df) : s.magnitudes;

  const double top = *std::max_element(s.smoothed.begin(), s.smoothed.end());
  for (std::size_t k = 1; k + 1 < s.smoothed.size(); ++k) {
    const double a = s.smoothed[k - 1], b = s.smoothed[k], c = s.smoothed[k + 1];
    if (!(b > a && b >= c) || b < threshold * top) continue;
    const double curv = a - 2.0 * b + c;
    const double p = curv != 0.0 ? 0.5 * (a - c) / curv : 0.0;
    s.peaks.push_back({df * (static_cast<double>(k) + p), b - 0.25 * (a - c) * p});
  }
  std::sort(s.peaks.begin(), s.peaks.end(),
            [](const SpectralPeak& x, const SpectralPeak& y) { return x.magnitude > y.magnitude; });
  return s;
}

double dominant_frequency(const TimeSeries& series, double f_lo, double f_hi) {
  series.validate();
  const std::size_t n = series.size();
  double mean = 0.0;
  for (double v : series.values) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                              static_cast<double>(n - 1)));
    w[i] = (series.values[i] - mean) * hann;
  }
  const std::size_t nfft = fft::fast_size(8 * n);
  const auto X = fft::rfft(w, nfft);
  const double df = 1.0 / (static_cast<double>(nfft) * series.dt);

  const auto k_lo = static_cast<std::size_t>(std::max(1.0, std::ceil(f_lo / df)));
  const auto k_hi = std::min(X.size() - 2, static_cast<std::size_t>(std::floor(f_hi / df)));
  if (k_lo > k_hi) throw SignalError("dominant_frequency: empty frequency range");

  std::size_t best = k_lo;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    if (std::abs(X[k]) > std::abs(X[best])) best = k;
  }
  const double a = std::abs(X[best - 1]), b = std::abs(X[best]), c = std::abs(X[best + 1]);
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) return df * static_cast<double>(best);
  const double la = std::log(a), lb = std::log(b), lc = std::log(c);
  const double curv = la - 2.0 * lb + lc;
  const double p = curv < 0.0 ? std::clamp(0.5 * (la - lc) / curv, -0.5, 0.5) : 0.0;
  return df * (static_cast<double>(best) + p);
}

std::vector<std::size_t> HusimiMap::ridge_index() const {
  std::vector<std::size_t> idx(t.size(), 0);
  const std::size_t nw = omega.size();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto row = Q.begin() + static_cast<std::ptrdiff_t>(i * nw);
    idx[i] = static_cast<std::size_t>(std::max_element(row, row + static_cast<std::ptrdiff_t>(nw)) - row);
  }
  return idx;
}

std::vector<double> HusimiMap::ridge() const {
  std::vector<double> r;
  for (std::size_t j : ridge_index()) r.push_back(omega[j]);
  return r;
}

HusimiMap husimi(const ComplexSeries& series, double sigma, const std::vector<double>& omega_grid,
                 const std::vector<double>& t_grid) {
  if (!(series.dt > 0.0) || series.size() < 2) throw SignalError("husimi: degenerate series");
  if (!(sigma >= 3.0 * series.dt)) throw SignalError("husimi: wave packet must span at least 3 samples");
  if (omega_grid.empty() || t_grid.empty()) throw SignalError("husimi: empty grid");
  const std::size_t nw = omega_grid.size();
  const double dw = nw > 1 ? omega_grid[1] - omega_grid[0] : 0.0;
  for (std::size_t j = 1; j < nw; ++j) {
    const double step = omega_grid[j] - omega_grid[j - 1];
    if (!(dw > 0.0) || std::abs(step - dw) > 1e-9 * std::abs(omega_grid.back() - omega_grid.front())) {
      throw SignalError("husimi: omega grid must be uniform and increasing");
    }
  }
  const double t_first = series.t0;
  const double t_last = series.time(series.size() - 1);
  for (double t : t_grid) {
    if (t < t_first - 1e-9 * series.dt || t > t_last + 1e-9 * series.dt) {
      throw SignalError("husimi: time grid outside the series span");
    }
  }

  HusimiMap map;
  map.t = t_grid;
  map.omega = omega_grid;
  map.sigma = sigma;
  map.Q.assign(t_grid.size() * nw, 0.0);

  const auto last = static_cast<long long>(series.size()) - 1;
  std::vector<cplx> acc(nw);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const auto n0 = std::max(0LL, static_cast<long long>(std::ceil((t - 5.0 * sigma - series.t0) / series.dt)));
    const auto n1 = std::min(last, static_cast<long long>(std::floor((t + 5.0 * sigma - series.t0) / series.dt)));
    std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
    for (long long n = n0; n <= n1; ++n) {
      const double tn = series.time(static_cast<std::size_t>(n));
      const double u = (t - tn) / sigma;
      const double g = std::exp(-0.5 * u * u) * series.dt;
      cplx z = g * series.values[static_cast<std::size_t>(n)] * std::polar(1.0, omega_grid[0] * tn);
      const cplx rot = std::polar(1.0, dw * tn);
      for (std::size_t j = 0; j < nw; ++j) {
        acc[j] += z;
        z *= rot;
      }
    }
    for (std::size_t j = 0; j < nw; ++j) map.Q[i * nw + j] = std::norm(acc[j]);
  }
  return map;
}

HusimiMap husimi(const TimeSeries& series, double sigma, const std::vector<double>& omega_grid,
                 const std::vector<double>& t_grid) {
  ComplexSeries c{series.t0, series.dt, {}};
  c.values.assign(series.values.begin(), series.values.end());
  return husimi(c, sigma, omega_grid, t_grid);
}

double window_average(const TimeSeries& P, double center, double half_width) {
  P.validate();
  if (!(half_width >= 0.0)) throw SignalError("window_average: negative half width");
  const double slack = 1e-9 * P.dt;
  if (center - half_width < P.t0 - slack || center + half_width > P.t_end() + slack) {
    throw SignalError("window_average: window extends beyond the series");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (std::abs(P.time(i) - center) <= half_width + slack) {
      sum += P.values[i];
      ++count;
    }
  }
  if (count == 0) throw SignalError("window_average: no samples in the window");
  return sum / static_cast<double>(count);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {a};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

}  // namespace pq
