#include <cmath>
#include <numbers>

#include "asense/errors.hpp"
#include "asense/features.hpp"
#include "asense/rng.hpp"
#include "asense/signal.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asense;

namespace {

Recording recording_of(Waveform w, const std::string& location = "none") {
  Recording r;
  r.waveform = std::move(w);
  r.state.contact_location = Label::category(location);
  return r;
}

Waveform random_waveform(std::size_t n, std::uint64_t seed, double rate = 48000.0) {
  Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(n);
  Rng rng(seed);
  for (double& s : w.samples) s = rng.uniform_signed();
  return w;
}

// Time-domain energy reconstructed from DC plus the retained bins, honoring
// the 2/N amplitude scaling (Nyquist bin carries half weight for even N).
double energy_from_spectrum(const std::vector<double>& x, const SpectrumFeature& f) {
  const std::size_t n = x.size();
  double dc = 0.0;
  for (double s : x) dc += s;
  double acc = dc * dc / static_cast<double>(n);
  const bool even = n % 2 == 0;
  for (std::size_t i = 0; i < f.amplitudes.size(); ++i) {
    double a2 = f.amplitudes[i] * f.amplitudes[i];
    bool nyquist = even && i + 1 == f.amplitudes.size();
    acc += a2 * static_cast<double>(n) / (nyquist ? 4.0 : 2.0);
  }
  return acc;
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("integer-bin unit sine concentrates in one bin") {
  SoundSpec spec;
  spec.kind = SoundKind::Sine;
  spec.duration_s = 1.0;
  Waveform w = synthesize(spec);
  SpectrumFeature f = amplitude_spectrum(w);
  REQUIRE(f.amplitudes.size() == 24000);
  CHECK(f.bin_hz == doctest::Approx(1.0));
  CHECK(f.amplitudes[2579] == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t i = 0; i < f.amplitudes.size(); ++i) {
    if (i == 2579) continue;
    CHECK(f.amplitudes[i] < 1e-9);
  }
}

TEST_CASE("agrees with the naive DFT oracle") {
  for (std::size_t n : {64u, 97u, 480u, 600u}) {
    Waveform w = random_waveform(n, 1000 + n);
    SpectrumFeature f = amplitude_spectrum(w);
    auto ref = oracle::naive_dft(w.samples);
    REQUIRE(f.amplitudes.size() == n / 2);
    for (std::size_t k = 1; k <= n / 2; ++k) {
      double expected = 2.0 / static_cast<double>(n) * std::abs(ref[k]);
      CHECK(f.amplitudes[k - 1] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("Parseval energy identity") {
  for (std::size_t n : {960u, 961u, 4800u}) {
    Waveform w = random_waveform(n, 7 * n);
    for (double& s : w.samples) s = 0.4 * s + 0.1;  // nonzero DC on purpose
    SpectrumFeature f = amplitude_spectrum(w);
    double time_energy = 0.0;
    for (double s : w.samples) time_energy += s * s;
    CHECK(energy_from_spectrum(w.samples, f) ==
          doctest::Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("zero waveform gives a zero spectrum") {
  Waveform w;
  w.samples.assign(960, 0.0);
  SpectrumFeature f = amplitude_spectrum(w);
  for (double a : f.amplitudes) CHECK(a == 0.0);
}

TEST_CASE("too-short waveforms are rejected") {
  Waveform w;
  w.samples.assign(1, 0.5);
  CHECK_THROWS_AS(amplitude_spectrum(w), TooShort);
}

TEST_CASE("scaling homogeneity and sign invariance") {
  Waveform w = random_waveform(960, 5);
  SpectrumFeature base = amplitude_spectrum(w);

  Waveform scaled = w;
  for (double& s : scaled.samples) s *= 0.3;
  SpectrumFeature fs = amplitude_spectrum(scaled);
  for (std::size_t i = 0; i < base.amplitudes.size(); ++i) {
    CHECK(fs.amplitudes[i] == doctest::Approx(0.3 * base.amplitudes[i]).epsilon(1e-9));
  }

  Waveform flipped = w;
  for (double& s : flipped.samples) s = -s;
  SpectrumFeature ff = amplitude_spectrum(flipped);
  for (std::size_t i = 0; i < base.amplitudes.size(); ++i) {
    CHECK(ff.amplitudes[i] == doctest::Approx(base.amplitudes[i]).epsilon(1e-9));
  }
}

TEST_CASE("circular shift keeps integer-bin sine magnitudes") {
  SoundSpec spec;
  spec.kind = SoundKind::Sine;
  spec.duration_s = 0.02;
  spec.sine_freq_hz = 2400.0;  // integer bin at 50 Hz resolution
  Waveform w = synthesize(spec);
  SpectrumFeature base = amplitude_spectrum(w);

  Waveform shifted = w;
  std::rotate(shifted.samples.begin(), shifted.samples.begin() + 37, shifted.samples.end());
  SpectrumFeature fs = amplitude_spectrum(shifted);
  for (std::size_t i = 0; i < base.amplitudes.size(); ++i) {
    CHECK(fs.amplitudes[i] == doctest::Approx(base.amplitudes[i]).epsilon(1e-6));
  }
}

TEST_CASE("trim rules") {
  std::vector<Recording> recs;
  recs.push_back(recording_of(random_waveform(48010, 1)));
  recs.push_back(recording_of(random_waveform(48000, 2)));
  auto trimmed = trim(recs);
  CHECK(trimmed[0].waveform.size() == 48000);
  CHECK(trimmed[1].waveform.size() == 48000);
  // Onset alignment: the head is kept.
  CHECK(trimmed[0].waveform.samples[0] == recs[0].waveform.samples[0]);

  auto explicit_target = trim(recs, 960);
  CHECK(explicit_target[0].waveform.size() == 960);

  CHECK_THROWS_AS(trim(recs, 50000), TargetTooLong);

  recs[1].waveform.sample_rate_hz = 44100.0;
  CHECK_THROWS_AS(trim(recs), MixedSampleRates);
}

TEST_CASE("featurize dimensions") {
  std::vector<Recording> recs;
  for (int i = 0; i < 150; ++i) recs.push_back(recording_of(random_waveform(960, 100 + i)));
  FeatureSet set = featurize(recs);
  CHECK(set.size() == 150);
  CHECK(set.dim() == 480);
  CHECK(set.features.front().bin_hz == doctest::Approx(50.0));

  // Mixed durations trim to the shortest.
  recs.push_back(recording_of(random_waveform(48000, 999)));
  FeatureSet mixed = featurize(recs);
  CHECK(mixed.dim() == 480);

  CHECK_THROWS_AS(featurize({}), EmptyData);
}

TEST_CASE("optional per-sample normalization") {
  std::vector<Recording> recs;
  recs.push_back(recording_of(random_waveform(960, 21)));
  recs.push_back(recording_of(random_waveform(960, 22)));
  FeatureSet raw = featurize(recs);
  FeatureSet unit = featurize(recs, std::nullopt, true);
  for (std::size_t i = 0; i < unit.size(); ++i) {
    double norm = 0.0, raw_norm = 0.0;
    for (double a : unit.features[i].amplitudes) norm += a * a;
    for (double a : raw.features[i].amplitudes) raw_norm += a * a;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::sqrt(raw_norm) != doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("featurize copies labels") {
  std::vector<Recording> recs;
  Recording r = recording_of(random_waveform(960, 11), "tip");
  r.state.contact_force_n = 1.5;
  r.state.material = "wood";
  r.state.pose_id = 3;
  r.actuator_id = "B";
  recs.push_back(r);
  recs.push_back(recording_of(random_waveform(960, 12), "base"));
  FeatureSet set = featurize(recs);
  CHECK(set.labels[0].location == Label::category("tip"));
  CHECK(set.labels[0].force_n == 1.5);
  CHECK(set.labels[0].material == "wood");
  CHECK(set.labels[0].pose_id == 3);
  CHECK(set.labels[0].actuator_id == "B");
  CHECK(set.labels[1].location == Label::category("base"));
}

TEST_SUITE_END();
