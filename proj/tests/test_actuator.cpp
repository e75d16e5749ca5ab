#include <cmath>

#include "asense/actuator.hpp"
#include "asense/errors.hpp"
#include "asense/eval.hpp"
#include "asense/features.hpp"
#include "asense/signal.hpp"
#include "doctest.h"

using namespace asense;

namespace {

ActuatorModel quiet_model() {
  ActuatorModel m = base_model();
  m.mic_noise_rms = 0.0;
  return m;
}

SoundSpec sine_spec(double freq = 2580.0, double duration = 1.0) {
  SoundSpec spec;
  spec.kind = SoundKind::Sine;
  spec.sine_freq_hz = freq;
  spec.duration_s = duration;
  return spec;
}

SoundSpec white_spec(double duration = 0.02, double volume = 1.0) {
  SoundSpec spec;
  spec.kind = SoundKind::WhiteNoise;
  spec.duration_s = duration;
  spec.volume = volume;
  spec.seed = 7;
  return spec;
}

std::size_t argmax_bin(const SpectrumFeature& f) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < f.amplitudes.size(); ++i) {
    if (f.amplitudes[i] > f.amplitudes[best]) best = i;
  }
  return best;
}

std::size_t argmax_bin_in(const SpectrumFeature& f, double lo_hz, double hi_hz) {
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t i = 0; i < f.amplitudes.size(); ++i) {
    double hz = f.first_bin_hz + f.bin_hz * static_cast<double>(i);
    if (hz < lo_hz || hz > hi_hz) continue;
    if (f.amplitudes[i] > best_v) {
      best_v = f.amplitudes[i];
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("actuator");

TEST_CASE("neutral state leaves the dominant resonance at 2580 Hz") {
  ActuatorModel m = quiet_model();
  ActuatorState neutral;
  Recording rec = modulate(m, neutral, Stimulus::active(sine_spec()), std::nullopt, 1);
  SpectrumFeature f = amplitude_spectrum(rec);
  std::size_t peak = argmax_bin(f);
  CHECK(std::fabs(f.first_bin_hz + f.bin_hz * static_cast<double>(peak) - 2580.0) <= f.bin_hz);
}

TEST_CASE("location shifts move the dominant peak by the table delta") {
  ActuatorModel m = quiet_model();
  Stimulus sweep = Stimulus::active([] {
    SoundSpec s;
    s.kind = SoundKind::LogSweep;
    s.duration_s = 1.0;
    return s;
  }());
  Recording at_base = modulate(m, ActuatorState::at("base"), sweep, std::nullopt, 1);
  Recording at_tip = modulate(m, ActuatorState::at("tip"), sweep, std::nullopt, 1);

  SpectrumFeature fb = amplitude_spectrum(at_base);
  SpectrumFeature ft = amplitude_spectrum(at_tip);
  CHECK(fb.amplitudes != ft.amplitudes);

  // Dominant mode sits near 2580; the base->tip delta comes from the table.
  double base_peak = 2580.0 + m.location_shift_hz.at("base")[4];
  double tip_peak = 2580.0 + m.location_shift_hz.at("tip")[4];
  double measured_base =
      fb.first_bin_hz + fb.bin_hz * static_cast<double>(argmax_bin_in(fb, 2300.0, 2900.0));
  double measured_tip =
      ft.first_bin_hz + ft.bin_hz * static_cast<double>(argmax_bin_in(ft, 2300.0, 2900.0));
  CHECK(measured_base == doctest::Approx(base_peak).epsilon(0.01));
  CHECK(measured_tip == doctest::Approx(tip_peak).epsilon(0.01));
  CHECK(measured_tip - measured_base ==
        doctest::Approx(tip_peak - base_peak).epsilon(0.15));
}

TEST_CASE("modulate is deterministic") {
  ActuatorModel m = base_model();
  ActuatorState state = ActuatorState::at("middle");
  Stimulus stim = Stimulus::active(white_spec());
  Recording a = modulate(m, state, stim, std::nullopt, 99);
  Recording b = modulate(m, state, stim, std::nullopt, 99);
  CHECK(a.waveform.samples == b.waveform.samples);
  Recording c = modulate(m, state, stim, std::nullopt, 100);
  CHECK(a.waveform.samples != c.waveform.samples);
}

TEST_CASE("sample_dataset counts, order shuffle, and subset regeneration") {
  ActuatorModel m = base_model();
  std::vector<ActuatorState> states;
  for (const char* loc : {"base", "middle", "tip", "left", "right", "top"}) {
    states.push_back(ActuatorState::at(loc));
  }
  Stimulus stim = Stimulus::active(white_spec());
  auto recs = sample_dataset(m, states, stim, 25, 5);
  CHECK(recs.size() == 150);

  // Same inputs regenerate bit-identical recordings.
  auto again = sample_dataset(m, states, stim, 25, 5);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].waveform.samples == again[i].waveform.samples);
  }

  // Recording order is shuffled: not grouped by state.
  bool grouped = true;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!(recs[i].state.contact_location == recs[i / 25 * 25].state.contact_location)) {
      grouped = false;
      break;
    }
  }
  CHECK_FALSE(grouped);

  // Any single recording can be regenerated independently from its seed.
  const Recording& probe = recs[17];
  Recording solo = modulate(m, probe.state, stim, std::nullopt, probe.noise_seed);
  CHECK(solo.waveform.samples == probe.waveform.samples);

  auto single = sample_dataset(m, {states[0]}, stim, 1, 42);
  CHECK(single.size() == 1);

  // Worker count does not change the result.
  auto parallel = sample_dataset(m, states, stim, 25, 5, 3);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(parallel[i].waveform.samples == recs[i].waveform.samples);
  }
}

TEST_CASE("simultaneous grid has 700 recordings") {
  ExperimentConfig cfg;
  cfg.seed = 3;
  auto recs = build_recordings(cfg, "simultaneous700", SenseMode::Active);
  CHECK(recs.size() == 700);
}

TEST_CASE("inflation strictly raises every effective center") {
  ActuatorModel m = base_model();
  ActuatorState low, high;
  low.inflation_kpa = 0.0;
  high.inflation_kpa = 30.0;
  auto r_low = effective_resonances(m, low);
  auto r_high = effective_resonances(m, high);
  for (std::size_t k = 0; k < r_low.size(); ++k) {
    CHECK(r_high[k].center_hz > r_low[k].center_hz);
  }
}

TEST_CASE("passive, quiet, pose-0 recordings are silent") {
  ActuatorModel m = quiet_model();
  ActuatorState neutral;
  Recording rec = modulate(m, neutral, Stimulus::passive(0.02), std::nullopt, 1);
  CHECK(rec.waveform.size() == 960);
  for (double s : rec.waveform.samples) CHECK(s == 0.0);
}

TEST_CASE("modulation is linear in the stimulus") {
  ActuatorModel m = quiet_model();
  ActuatorState state = ActuatorState::at("tip");
  Waveform full = synthesize(white_spec(0.02, 1.0));
  Waveform half = scale_volume(full, 0.5);
  Recording rf = modulate(m, state, Stimulus::raw(full), std::nullopt, 1);
  Recording rh = modulate(m, state, Stimulus::raw(half), std::nullopt, 1);
  for (std::size_t i = 0; i < rf.waveform.size(); ++i) {
    CHECK(rh.waveform.samples[i] == doctest::Approx(0.5 * rf.waveform.samples[i]).epsilon(1e-12));
  }
}

TEST_CASE("insulation attenuates an in-band probe by exactly its rating") {
  ActuatorModel m = quiet_model();
  ActuatorState neutral;
  SoundSpec probe = sine_spec(1000.0, 0.1);
  ExternalSound ext{synthesize(probe), 100.0};
  Recording rec = modulate(m, neutral, Stimulus::passive(0.1), ext, 1);
  // In-chamber level on the absolute scale where 120 dB = RMS 1.
  double level = kFullScaleDb + db_from_amplitude(rec.waveform.rms());
  CHECK(level == doctest::Approx(100.0 - m.insulation_db).epsilon(0.01));
}

TEST_CASE("external noise near the pain threshold barely degrades SNR") {
  ActuatorModel m = base_model();
  ActuatorState state = ActuatorState::at("middle");
  Stimulus stim = Stimulus::active(white_spec(0.1, 1.0));

  Recording active_quiet = modulate(m, state, stim, std::nullopt, 11);
  Recording passive_quiet = modulate(m, state, Stimulus::passive(0.1), std::nullopt, 11);
  double snr_quiet = snr_estimate(active_quiet, passive_quiet);

  SoundSpec ext_spec = white_spec(0.1, 1.0);
  ext_spec.seed = 1234;
  ExternalSound ext{synthesize(ext_spec), 90.0};
  Recording active_noisy = modulate(m, state, stim, ext, 11);
  Recording passive_noisy = modulate(m, state, Stimulus::passive(0.1), ext, 11);
  double snr_noisy = snr_estimate(active_noisy, passive_noisy);

  CHECK(snr_quiet - snr_noisy <= 5.0);
  CHECK(snr_quiet >= 35.0);
  CHECK(snr_quiet <= 55.0);
}

TEST_CASE("default_model jitter is deterministic and id-specific") {
  ActuatorModel a1 = default_model("A", 1);
  ActuatorModel a2 = default_model("A", 1);
  for (std::size_t k = 0; k < a1.resonances.size(); ++k) {
    CHECK(a1.resonances[k].center_hz == a2.resonances[k].center_hz);
    CHECK(a1.resonances[k].gain == a2.resonances[k].gain);
  }

  ActuatorModel b = default_model("B", 1);
  bool differs = false;
  for (std::size_t k = 0; k < a1.resonances.size(); ++k) {
    if (std::fabs(a1.resonances[k].center_hz - b.resonances[k].center_hz) >
        0.01 * a1.resonances[k].center_hz) {
      differs = true;
    }
  }
  CHECK(differs);

  // Largest-gain mode before jitter sits at 2580 Hz.
  ActuatorModel base = base_model();
  std::size_t dominant = 0;
  for (std::size_t k = 1; k < base.resonances.size(); ++k) {
    if (base.resonances[k].gain > base.resonances[dominant].gain) dominant = k;
  }
  CHECK(base.resonances[dominant].center_hz == 2580.0);
}

TEST_CASE("error paths") {
  ActuatorModel m = base_model();

  SoundSpec wrong_rate = white_spec();
  wrong_rate.sample_rate_hz = 44100.0;
  CHECK_THROWS_AS(
      modulate(m, ActuatorState{}, Stimulus::active(wrong_rate), std::nullopt, 1),
      RateMismatch);

  ActuatorState hot;
  hot.temperature_c = 20000.0;  // pushes centers past Nyquist
  CHECK_THROWS_AS(modulate(m, hot, Stimulus::active(white_spec()), std::nullopt, 1),
                  UnstableFilter);

  ActuatorState crushed = ActuatorState::at("middle", 100.0);  // Q <= 0
  CHECK_THROWS_AS(modulate(m, crushed, Stimulus::active(white_spec()), std::nullopt, 1),
                  UnstableFilter);

  ActuatorState bad_loc;
  bad_loc.contact_location = Label::category("elbow");
  CHECK_THROWS_AS(modulate(m, bad_loc, Stimulus::active(white_spec()), std::nullopt, 1),
                  InvalidState);

  ActuatorState bad_none = ActuatorState{};
  bad_none.contact_force_n = 1.0;  // force without contact
  CHECK_THROWS_AS(modulate(m, bad_none, Stimulus::active(white_spec()), std::nullopt, 1),
                  InvalidState);

  ActuatorState far;
  far.contact_location = Label::number(1000.0);
  CHECK_THROWS_AS(modulate(m, far, Stimulus::active(white_spec()), std::nullopt, 1),
                  InvalidState);

  ExternalSound short_ext{synthesize(white_spec(0.01)), 60.0};
  CHECK_THROWS_AS(
      modulate(m, ActuatorState{}, Stimulus::active(white_spec(0.02)), short_ext, 1),
      ExternalTooShort);

  CHECK_THROWS_AS(sample_dataset(m, {ActuatorState{}}, Stimulus::active(white_spec()), 0, 1),
                  InvalidSpec);
}

TEST_SUITE_END();
