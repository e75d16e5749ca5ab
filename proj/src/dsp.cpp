#include "asense/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace asense::dsp {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Twiddle table for a power-of-two FFT: roots[k] = exp(-i*pi*k/(n/2)).
struct Pow2Plan {
  std::size_t n;
  std::vector<cplx> roots;  // n/2 forward twiddles

  explicit Pow2Plan(std::size_t size) : n(size), roots(size / 2) {
    for (std::size_t k = 0; k < size / 2; ++k) {
      double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(size);
      roots[k] = cplx(std::cos(ang), std::sin(ang));
    }
  }
};

struct BluesteinPlan {
  std::size_t n;
  std::size_t m;                 // convolution length, power of two >= 2n-1
  std::vector<cplx> chirp;       // w[k] = exp(-i*pi*k^2/n), k in [0, n)
  std::vector<cplx> kernel_fft;  // FFT of the zero-padded conjugate chirp

  explicit BluesteinPlan(std::size_t size) : n(size), m(next_pow2(2 * size - 1)), chirp(size) {
    for (std::size_t k = 0; k < size; ++k) {
      // k^2 mod 2n keeps the phase argument small for large k.
      std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * static_cast<std::uint64_t>(size));
      double ang = -kPi * static_cast<double>(k2) / static_cast<double>(size);
      chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> b(m, cplx(0.0, 0.0));
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < size; ++k) {
      b[k] = b[m - k] = std::conj(chirp[k]);
    }
    fft_pow2(b, false);
    kernel_fft = std::move(b);
  }
};

const Pow2Plan& pow2_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<Pow2Plan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Pow2Plan>(n);
  return *slot;
}

const BluesteinPlan& bluestein_plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<BluesteinPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<BluesteinPlan>(n);
  return *slot;
}

std::vector<cplx> dft_bluestein(const std::vector<cplx>& x) {
  const BluesteinPlan& plan = bluestein_plan(x.size());
  const std::size_t n = plan.n;
  const std::size_t m = plan.m;

  std::vector<cplx> a(m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * plan.chirp[k];
  fft_pow2(a, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= plan.kernel_fft[k];
  fft_pow2(a, true);

  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * plan.chirp[k];
  return out;
}

}  // namespace

void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: length must be a power of two");

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const Pow2Plan& plan = pow2_plan(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    const std::size_t half = len / 2;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx w = plan.roots[k * stride];
        if (inverse) w = std::conj(w);
        cplx u = a[i + k];
        cplx v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (cplx& c : a) c *= inv;
  }
}

std::vector<cplx> dft(const std::vector<cplx>& input) {
  if (input.size() <= 1) return input;
  if (is_pow2(input.size())) {
    std::vector<cplx> a = input;
    fft_pow2(a, false);
    return a;
  }
  return dft_bluestein(input);
}

std::vector<cplx> dft_real(const std::vector<double>& x) {
  std::vector<cplx> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = cplx(x[i], 0.0);
  return dft(a);
}

void dft_real_pair(const std::vector<double>& x, const std::vector<double>& y,
                   std::vector<cplx>& out_x, std::vector<cplx>& out_y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw std::invalid_argument("dft_real_pair: length mismatch");
  // Pack both real signals into one complex transform: z = x + i*y, then
  // X[k] = (Z[k] + conj(Z[n-k]))/2 and Y[k] = -i*(Z[k] - conj(Z[n-k]))/2.
  std::vector<cplx> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = cplx(x[i], y[i]);
  std::vector<cplx> zf = dft(z);

  out_x.assign(n, cplx());
  out_y.assign(n, cplx());
  for (std::size_t k = 0; k < n; ++k) {
    cplx zk = zf[k];
    cplx zr = std::conj(zf[(n - k) % n]);
    out_x[k] = 0.5 * (zk + zr);
    out_y[k] = cplx(0.0, -0.5) * (zk - zr);
  }
}

std::vector<double> Biquad::process(const std::vector<double>& x) const {
  std::vector<double> y(x.size());
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double in = x[i];
    double out = b0 * in + s1;
    s1 = b1 * in - a1 * out + s2;
    s2 = b2 * in - a2 * out;
    y[i] = out;
  }
  return y;
}

void Biquad::process_add(const double* x, double* out, std::size_t n, double gain) const {
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double in = x[i];
    double v = b0 * in + s1;
    s1 = b1 * in - a1 * v + s2;
    s2 = b2 * in - a2 * v;
    out[i] += gain * v;
  }
}

Biquad make_resonator(double center_hz, double q, double sample_rate_hz) {
  // RBJ cookbook band-pass, constant 0 dB peak gain.
  const double w0 = 2.0 * kPi * center_hz / sample_rate_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad bq;
  bq.b0 = alpha / a0;
  bq.b1 = 0.0;
  bq.b2 = -alpha / a0;
  bq.a1 = -2.0 * std::cos(w0) / a0;
  bq.a2 = (1.0 - alpha) / a0;
  return bq;
}

std::array<Biquad, 2> butter_bandpass(double low_hz, double high_hz, double sample_rate_hz) {
  const double fs = sample_rate_hz;
  // Prewarped analog edge frequencies (rad/s).
  const double w1 = 2.0 * fs * std::tan(kPi * low_hz / fs);
  const double w2 = 2.0 * fs * std::tan(kPi * high_hz / fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;

  // Order-2 Butterworth prototype pole (upper half plane); the low-pass to
  // band-pass transform s -> (s^2 + w0^2)/(bw*s) maps it to two poles, and
  // the conjugate prototype pole supplies their conjugates.
  const cplx proto(-std::sqrt(0.5), std::sqrt(0.5));
  const cplx pb = proto * bw;
  const cplx disc = std::sqrt(pb * pb - 4.0 * w0sq);
  const std::array<cplx, 2> analog_poles = {(pb + disc) / 2.0, (pb - disc) / 2.0};

  std::array<Biquad, 2> sos;
  for (std::size_t i = 0; i < 2; ++i) {
    // Bilinear transform of the pole pair {p, conj(p)}.
    const cplx p = analog_poles[i];
    const cplx zp = (2.0 * fs + p) / (2.0 * fs - p);
    const double re = zp.real();
    const double mag2 = std::norm(zp);
    Biquad bq;
    // One transform zero at z=+1 (from s=0) and one at z=-1 (from s=inf).
    bq.b0 = 1.0;
    bq.b1 = 0.0;
    bq.b2 = -1.0;
    bq.a1 = -2.0 * re;
    bq.a2 = mag2;
    sos[i] = bq;
  }

  // Normalize to unit gain at the digital band center.
  const double f0 = std::sqrt(low_hz * high_hz);
  const cplx z = std::polar(1.0, 2.0 * kPi * f0 / fs);
  cplx h(1.0, 0.0);
  for (const Biquad& bq : sos) {
    const cplx zi = 1.0 / z;
    h *= (bq.b0 + bq.b1 * zi + bq.b2 * zi * zi) / (1.0 + bq.a1 * zi + bq.a2 * zi * zi);
  }
  const double g = 1.0 / std::abs(h);
  sos[0].b0 *= g;
  sos[0].b1 *= g;
  sos[0].b2 *= g;
  return sos;
}

std::vector<double> filtfilt(const std::array<Biquad, 2>& sections, const std::vector<double>& x) {
  std::vector<double> y = sections[0].process(x);
  y = sections[1].process(y);
  std::reverse(y.begin(), y.end());
  y = sections[0].process(y);
  y = sections[1].process(y);
  std::reverse(y.begin(), y.end());
  return y;
}

}  // namespace asense::dsp
