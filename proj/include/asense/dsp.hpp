#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace asense::dsp {

using cplx = std::complex<double>;

/// In-place complex FFT. Length must be a power of two.
void fft_pow2(std::vector<cplx>& a, bool inverse);

/// Complex DFT of arbitrary length (radix-2 directly, Bluestein otherwise).
/// Plans are cached per length, so repeated transforms of one size are cheap.
std::vector<cplx> dft(const std::vector<cplx>& input);

/// Full complex spectrum of a real signal.
std::vector<cplx> dft_real(const std::vector<double>& x);

/// Spectra of two equal-length real signals from a single complex transform.
void dft_real_pair(const std::vector<double>& x, const std::vector<double>& y,
                   std::vector<cplx>& out_x, std::vector<cplx>& out_y);

/// Direct-form-2-transposed biquad section (normalized a0 = 1).
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  /// y[n] = filter(x[n]) with zero initial state.
  std::vector<double> process(const std::vector<double>& x) const;

  /// out[n] += gain * filter(x[n]); avoids a scratch vector per resonator.
  void process_add(const double* x, double* out, std::size_t n, double gain) const;
};

/// Constant-peak-gain second-order band-pass resonator (gain 1 at center_hz).
/// Stable for q > 0 and 0 < center_hz < sample_rate_hz / 2.
Biquad make_resonator(double center_hz, double q, double sample_rate_hz);

/// Fourth-order Butterworth band-pass (two cascaded biquads), unit gain at
/// the geometric band center. Designed by bilinear transform with prewarped
/// edges from the order-2 analog low-pass prototype.
std::array<Biquad, 2> butter_bandpass(double low_hz, double high_hz, double sample_rate_hz);

/// Forward-backward (zero-phase) application of a biquad cascade.
std::vector<double> filtfilt(const std::array<Biquad, 2>& sections, const std::vector<double>& x);

}  // namespace asense::dsp
