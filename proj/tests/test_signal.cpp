#include <cmath>
#include <numbers>

#include "asense/errors.hpp"
#include "asense/features.hpp"
#include "asense/signal.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asense;

namespace {

SoundSpec spec_of(SoundKind kind, double duration_s, double volume = 1.0,
                  std::uint64_t seed = 42) {
  SoundSpec spec;
  spec.kind = kind;
  spec.duration_s = duration_s;
  spec.volume = volume;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("signal");

TEST_CASE("sine matches the closed form") {
  SoundSpec spec = spec_of(SoundKind::Sine, 1.0);
  Waveform w = synthesize(spec);
  REQUIRE(w.size() == 48000);
  for (std::size_t k = 0; k < w.size(); k += 997) {
    double expected = std::sin(2.0 * std::numbers::pi * 2580.0 * static_cast<double>(k) / 48000.0);
    CHECK(w.samples[k] == doctest::Approx(expected).epsilon(1e-9));
  }
  CHECK(w.peak() <= 1.0);
}

TEST_CASE("length is exact for every kind and duration") {
  for (SoundKind kind :
       {SoundKind::LogSweep, SoundKind::WhiteNoise, SoundKind::BandNoise, SoundKind::Sine}) {
    for (double dur : {0.005, 0.02, 0.05, 0.5, 1.0}) {
      Waveform w = synthesize(spec_of(kind, dur));
      CHECK(w.size() == static_cast<std::size_t>(std::llround(dur * 48000.0)));
    }
  }
  CHECK(synthesize(spec_of(SoundKind::WhiteNoise, 0.005)).size() == 240);
}

TEST_CASE("noise synthesis is deterministic in the seed") {
  SoundSpec spec = spec_of(SoundKind::WhiteNoise, 0.02);
  Waveform a = synthesize(spec);
  Waveform b = synthesize(spec);
  CHECK(a.samples == b.samples);

  spec.seed = 43;
  Waveform c = synthesize(spec);
  CHECK(a.samples != c.samples);

  SoundSpec band = spec_of(SoundKind::BandNoise, 0.02);
  CHECK(synthesize(band).samples == synthesize(band).samples);
}

TEST_CASE("white noise level and bounds") {
  Waveform w = synthesize(spec_of(SoundKind::WhiteNoise, 1.0));
  CHECK(w.rms() == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.02));
  CHECK(w.peak() <= 1.0);

  Waveform quarter = synthesize(spec_of(SoundKind::WhiteNoise, 1.0, 0.25));
  CHECK(quarter.rms() == doctest::Approx(w.rms() * 0.25).epsilon(1e-12));

  std::size_t clamped = 0;
  for (double s : w.samples) {
    if (std::fabs(s) >= 1.0) ++clamped;
  }
  CHECK(static_cast<double>(clamped) / static_cast<double>(w.size()) < 0.001);
}

TEST_CASE("sine spectral placement within one bin") {
  for (double freq : {440.0, 2580.0, 9973.5}) {
    SoundSpec spec = spec_of(SoundKind::Sine, 0.1);
    spec.sine_freq_hz = freq;
    SpectrumFeature f = amplitude_spectrum(synthesize(spec));
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < f.amplitudes.size(); ++i) {
      if (f.amplitudes[i] > f.amplitudes[argmax]) argmax = i;
    }
    double peak_hz = f.first_bin_hz + f.bin_hz * static_cast<double>(argmax);
    CHECK(std::fabs(peak_hz - freq) <= f.bin_hz + 1e-9);
  }
}

TEST_CASE("log sweep covers every third-octave band above -40 dB") {
  Waveform w = synthesize(spec_of(SoundKind::LogSweep, 1.0));
  SpectrumFeature f = amplitude_spectrum(w);

  // Energy per 1/3-octave band between 30 Hz and 18 kHz, relative to the
  // strongest band.
  std::vector<double> band_db;
  const double third = std::pow(2.0, 1.0 / 6.0);
  for (double center = 30.0; center <= 18000.0; center *= std::pow(2.0, 1.0 / 3.0)) {
    double lo = center / third, hi = center * third;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.amplitudes.size(); ++i) {
      double hz = f.first_bin_hz + f.bin_hz * static_cast<double>(i);
      if (hz >= lo && hz <= hi) acc += f.amplitudes[i] * f.amplitudes[i];
    }
    band_db.push_back(10.0 * std::log10(acc));
  }
  double max_db = *std::max_element(band_db.begin(), band_db.end());
  for (double db : band_db) CHECK(db - max_db > -40.0);
}

TEST_CASE("band-pass attenuates one octave outside the band by 40 dB") {
  SoundSpec spec = spec_of(SoundKind::WhiteNoise, 0.5);
  Waveform noise = synthesize(spec);
  Waveform filtered = filter_bandpass(noise, 2000.0, 4000.0);
  REQUIRE(filtered.size() == noise.size());
  SpectrumFeature f = amplitude_spectrum(filtered);

  auto band_power_db = [&](double lo, double hi) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < f.amplitudes.size(); ++i) {
      double hz = f.first_bin_hz + f.bin_hz * static_cast<double>(i);
      if (hz >= lo && hz <= hi) {
        acc += f.amplitudes[i] * f.amplitudes[i];
        ++count;
      }
    }
    return 10.0 * std::log10(acc / static_cast<double>(count));
  };

  double passband = band_power_db(2200.0, 3600.0);
  CHECK(band_power_db(450.0, 550.0) < passband - 40.0);
  CHECK(band_power_db(900.0, 1100.0) < passband - 40.0);
  CHECK(band_power_db(7800.0, 8200.0) < passband - 40.0);
  CHECK(band_power_db(15500.0, 16500.0) < passband - 40.0);
}

TEST_CASE("band-pass keeps an in-band sine within 3 dB") {
  SoundSpec spec = spec_of(SoundKind::Sine, 0.5);
  spec.sine_freq_hz = 3000.0;
  Waveform sine = synthesize(spec);
  Waveform filtered = filter_bandpass(sine, 2000.0, 4000.0);
  double gain_db = 20.0 * std::log10(filtered.rms() / sine.rms());
  CHECK(std::fabs(gain_db) <= 3.0);
}

TEST_CASE("band-pass of silence is silence") {
  Waveform zero;
  zero.samples.assign(4800, 0.0);
  Waveform out = filter_bandpass(zero, 2000.0, 4000.0);
  for (double s : out.samples) CHECK(s == 0.0);
}

TEST_CASE("band-pass rejects invalid bands") {
  Waveform w = synthesize(spec_of(SoundKind::WhiteNoise, 0.01));
  CHECK_THROWS_AS(filter_bandpass(w, 0.0, 4000.0), InvalidBand);
  CHECK_THROWS_AS(filter_bandpass(w, 4000.0, 2000.0), InvalidBand);
  CHECK_THROWS_AS(filter_bandpass(w, 2000.0, 30000.0), InvalidBand);
}

TEST_CASE("scale_volume") {
  Waveform w = synthesize(spec_of(SoundKind::WhiteNoise, 0.02));
  CHECK(scale_volume(w, 1.0).samples == w.samples);
  Waveform quarter = scale_volume(w, 0.25);
  CHECK(quarter.rms() == doctest::Approx(0.25 * w.rms()).epsilon(1e-12));
  CHECK_THROWS_AS(scale_volume(w, 0.0), InvalidFraction);
  CHECK_THROWS_AS(scale_volume(w, 1.5), InvalidFraction);
}

TEST_CASE("invalid specs name the offending field") {
  SoundSpec spec = spec_of(SoundKind::Sine, 0.0);
  CHECK_THROWS_WITH_AS(synthesize(spec), doctest::Contains("duration_s"), InvalidSpec);

  spec = spec_of(SoundKind::Sine, 1.0, 0.0);
  CHECK_THROWS_WITH_AS(synthesize(spec), doctest::Contains("volume"), InvalidSpec);

  spec = spec_of(SoundKind::LogSweep, 1.0);
  spec.f_start_hz = 500.0;
  spec.f_end_hz = 100.0;
  CHECK_THROWS_WITH_AS(synthesize(spec), doctest::Contains("f_start_hz"), InvalidSpec);

  spec = spec_of(SoundKind::BandNoise, 1.0);
  spec.band_high_hz = 25000.0;
  CHECK_THROWS_WITH_AS(synthesize(spec), doctest::Contains("band_high_hz"), InvalidSpec);

  spec = spec_of(SoundKind::Sine, 1.0);
  spec.sine_freq_hz = 30000.0;
  CHECK_THROWS_WITH_AS(synthesize(spec), doctest::Contains("sine_freq_hz"), InvalidSpec);
}

TEST_CASE("volume scaling by powers of two is exact") {
  SoundSpec full = spec_of(SoundKind::LogSweep, 0.05);
  SoundSpec half = full;
  half.volume = 0.5;
  Waveform wf = synthesize(full);
  Waveform wh = synthesize(half);
  for (std::size_t i = 0; i < wf.size(); ++i) CHECK(wh.samples[i] == 0.5 * wf.samples[i]);
}

TEST_SUITE_END();
