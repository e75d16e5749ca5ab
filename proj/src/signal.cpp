#include "asense/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "asense/dsp.hpp"
#include "asense/errors.hpp"
#include "asense/rng.hpp"

namespace asense {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t sample_count(const SoundSpec& spec) {
  return static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
}

Waveform white_noise(const SoundSpec& spec) {
  Waveform w;
  w.sample_rate_hz = spec.sample_rate_hz;
  w.samples.resize(sample_count(spec));
  Rng rng(spec.seed);
  for (double& s : w.samples) s = rng.uniform_signed();
  return w;
}

void clamp_unit(Waveform& w) {
  for (double& s : w.samples) s = std::clamp(s, -1.0, 1.0);
}

}  // namespace

std::string to_string(SoundKind kind) {
  switch (kind) {
    case SoundKind::LogSweep: return "log_sweep";
    case SoundKind::WhiteNoise: return "white_noise";
    case SoundKind::BandNoise: return "band_noise";
    case SoundKind::Sine: return "sine";
  }
  return "unknown";
}

SoundKind sound_kind_from_string(const std::string& name) {
  if (name == "log_sweep" || name == "sweep") return SoundKind::LogSweep;
  if (name == "white_noise" || name == "white") return SoundKind::WhiteNoise;
  if (name == "band_noise" || name == "band") return SoundKind::BandNoise;
  if (name == "sine") return SoundKind::Sine;
  throw InvalidSpec("unknown sound kind '" + name + "'");
}

void validate(const SoundSpec& spec) {
  const double nyquist = spec.sample_rate_hz / 2.0;
  if (!(spec.sample_rate_hz > 0)) throw InvalidSpec("sample_rate_hz must be > 0");
  if (!(spec.duration_s > 0)) throw InvalidSpec("duration_s must be > 0");
  if (sample_count(spec) < 1) throw InvalidSpec("duration_s too short for one sample");
  if (!(spec.volume > 0.0 && spec.volume <= 1.0)) throw InvalidSpec("volume must be in (0, 1]");
  switch (spec.kind) {
    case SoundKind::LogSweep:
      if (!(spec.f_start_hz > 0)) throw InvalidSpec("f_start_hz must be > 0");
      if (!(spec.f_start_hz < spec.f_end_hz)) throw InvalidSpec("f_start_hz must be < f_end_hz");
      if (!(spec.f_end_hz <= nyquist)) throw InvalidSpec("f_end_hz must be <= Nyquist");
      break;
    case SoundKind::BandNoise:
      if (!(spec.band_low_hz > 0)) throw InvalidSpec("band_low_hz must be > 0");
      if (!(spec.band_low_hz < spec.band_high_hz))
        throw InvalidSpec("band_low_hz must be < band_high_hz");
      if (!(spec.band_high_hz <= nyquist)) throw InvalidSpec("band_high_hz must be <= Nyquist");
      break;
    case SoundKind::Sine:
      if (!(spec.sine_freq_hz > 0)) throw InvalidSpec("sine_freq_hz must be > 0");
      if (!(spec.sine_freq_hz <= nyquist)) throw InvalidSpec("sine_freq_hz must be <= Nyquist");
      break;
    case SoundKind::WhiteNoise:
      break;
  }
}

Waveform synthesize(const SoundSpec& spec) {
  validate(spec);
  const std::size_t n = sample_count(spec);
  const double dt = 1.0 / spec.sample_rate_hz;

  Waveform w;
  w.sample_rate_hz = spec.sample_rate_hz;

  switch (spec.kind) {
    case SoundKind::Sine: {
      w.samples.resize(n);
      const double omega = 2.0 * kPi * spec.sine_freq_hz;
      for (std::size_t k = 0; k < n; ++k) {
        w.samples[k] = spec.volume * std::sin(omega * static_cast<double>(k) * dt);
      }
      return w;
    }
    case SoundKind::LogSweep: {
      // Exponential chirp: phi(t) = 2*pi*f_start*T*(e^{t/T} - 1) with
      // T = duration / ln(f_end/f_start), so the instantaneous frequency
      // rises exponentially from f_start to f_end.
      w.samples.resize(n);
      const double t_log = spec.duration_s / std::log(spec.f_end_hz / spec.f_start_hz);
      const double scale = 2.0 * kPi * spec.f_start_hz * t_log;
      for (std::size_t k = 0; k < n; ++k) {
        double t = static_cast<double>(k) * dt;
        w.samples[k] = spec.volume * std::sin(scale * (std::exp(t / t_log) - 1.0));
      }
      return w;
    }
    case SoundKind::WhiteNoise: {
      w = white_noise(spec);
      for (double& s : w.samples) s *= spec.volume;
      clamp_unit(w);
      return w;
    }
    case SoundKind::BandNoise: {
      w = white_noise(spec);
      w = filter_bandpass(w, spec.band_low_hz, spec.band_high_hz);
      for (double& s : w.samples) s *= spec.volume;
      clamp_unit(w);
      return w;
    }
  }
  throw InvalidSpec("unhandled sound kind");
}

Waveform filter_bandpass(const Waveform& w, double low_hz, double high_hz) {
  const double nyquist = w.sample_rate_hz / 2.0;
  if (!(low_hz > 0 && low_hz < high_hz && high_hz <= nyquist)) {
    throw InvalidBand("band edges must satisfy 0 < low < high <= Nyquist");
  }
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples = dsp::filtfilt(dsp::butter_bandpass(low_hz, high_hz, w.sample_rate_hz), w.samples);
  return out;
}

Waveform scale_volume(const Waveform& w, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidFraction("fraction must be in (0, 1]");
  Waveform out = w;
  for (double& s : out.samples) s *= fraction;
  return out;
}

}  // namespace asense
