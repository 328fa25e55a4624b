#include "pq/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace pq::fft {
namespace {

// The planner is the only non-reentrant part of FFTW.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Buffers {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  std::size_t n = 0;

  explicit Buffers(std::size_t size) : n(size) {
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    if (!real || !spec) {
      release();
      throw std::bad_alloc();
    }
  }
  ~Buffers() { release(); }
  Buffers(const Buffers&) = delete;
  Buffers& operator=(const Buffers&) = delete;

  void release() {
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
    real = nullptr;
    spec = nullptr;
  }
};

class Plan {
 public:
  Plan(fftw_plan p) : p_(p) {
    if (!p_) throw std::runtime_error("FFTW planner failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void run() const { fftw_execute(p_); }

 private:
  fftw_plan p_;
};

Plan forward_plan(Buffers& b) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_r2c_1d(static_cast<int>(b.n), b.real, b.spec, FFTW_ESTIMATE));
}

Plan backward_plan(Buffers& b) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_c2r_1d(static_cast<int>(b.n), b.spec, b.real, FFTW_ESTIMATE));
}

}  // namespace

std::size_t fast_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::vector<cplx> rfft(const std::vector<double>& x, std::size_t n) {
  if (n < x.size()) throw std::invalid_argument("rfft: n shorter than input");
  Buffers b(n);
  Plan plan = forward_plan(b);
  std::copy(x.begin(), x.end(), b.real);
  std::fill(b.real + x.size(), b.real + n, 0.0);
  plan.run();
  std::vector<cplx> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {b.spec[k][0], b.spec[k][1]};
  return out;
}

std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& k) {
  if (x.empty() || k.empty()) return {};
  const std::size_t len = x.size() + k.size() - 1;
  const std::size_t n = fast_size(len);

  Buffers b(n);
  Plan fwd = forward_plan(b);
  Plan bwd = backward_plan(b);

  std::fill(b.real, b.real + n, 0.0);
  std::copy(k.begin(), k.end(), b.real);
  fwd.run();
  std::vector<cplx> kspec(n / 2 + 1);
  for (std::size_t i = 0; i < kspec.size(); ++i) kspec[i] = {b.spec[i][0], b.spec[i][1]};

  std::fill(b.real, b.real + n, 0.0);
  std::copy(x.begin(), x.end(), b.real);
  fwd.run();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < kspec.size(); ++i) {
    const cplx z = cplx(b.spec[i][0], b.spec[i][1]) * kspec[i] * scale;
    b.spec[i][0] = z.real();
    b.spec[i][1] = z.imag();
  }
  bwd.run();
  return std::vector<double>(b.real, b.real + len);
}

}  // namespace pq::fft
