#pragma once

#include <cstdint>
#include <string>

#include "asense/waveform.hpp"

namespace asense {

enum class SoundKind { LogSweep, WhiteNoise, BandNoise, Sine };

std::string to_string(SoundKind kind);
SoundKind sound_kind_from_string(const std::string& name);

/// Parametric description of an active stimulus. Identical specs always
/// synthesize bit-identical waveforms; noise kinds draw from the seed.
struct SoundSpec {
  SoundKind kind = SoundKind::LogSweep;
  double duration_s = 1.0;
  double sample_rate_hz = 48000.0;
  double volume = 1.0;          // amplitude fraction in (0, 1]
  std::uint64_t seed = 0;       // noise kinds only
  double f_start_hz = 20.0;     // sweep
  double f_end_hz = 20000.0;    // sweep
  double band_low_hz = 2000.0;  // band noise
  double band_high_hz = 4000.0; // band noise
  double sine_freq_hz = 2580.0; // sine
};

/// Throws InvalidSpec naming the offending field.
void validate(const SoundSpec& spec);

/// Deterministic synthesis of the stimulus described by `spec`.
///
/// Sine and sweep peak at `volume`. Noise kinds are generated at reference
/// level (white noise uniform on [-1,1], RMS 1/sqrt(3)) and scaled linearly
/// by `volume`; band noise is the band-passed reference noise, so its RMS is
/// `volume` times the band-passed reference RMS.
Waveform synthesize(const SoundSpec& spec);

/// Zero-phase fourth-order Butterworth band-pass (see dsp::butter_bandpass).
Waveform filter_bandpass(const Waveform& w, double low_hz, double high_hz);

/// Multiplies every sample by `fraction` in (0, 1].
Waveform scale_volume(const Waveform& w, double fraction);

}  // namespace asense
