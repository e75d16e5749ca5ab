#include "asense/actuator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "asense/dsp.hpp"
#include "asense/errors.hpp"
#include "asense/parallel.hpp"
#include "asense/rng.hpp"

namespace asense {

namespace {

constexpr double kPi = std::numbers::pi;

// Seed-stream tags so the mic noise never aliases other derived streams.
constexpr std::uint64_t kMicNoiseTag = 0x6d69632d6e6f6973ull;
constexpr std::uint64_t kShuffleTag = 0x73687566666c6521ull;

std::size_t length_from_duration(double duration_s, double rate) {
  if (!(duration_s > 0)) throw InvalidSpec("duration_s must be > 0");
  auto n = static_cast<std::size_t>(std::llround(duration_s * rate));
  if (n < 1) throw InvalidSpec("duration_s too short for one sample");
  return n;
}

void validate_state(const ActuatorModel& model, const ActuatorState& state) {
  if (state.contact_force_n < 0) throw InvalidState("contact_force_n must be >= 0");
  if (state.inflation_kpa < 0) throw InvalidState("inflation_kpa must be >= 0");
  if (state.contact_location.is_number()) {
    double mm = state.contact_location.number();
    if (mm < 0 || mm > model.finger_length_mm) {
      throw InvalidState("continuous contact position outside [0, finger_length_mm]");
    }
  } else {
    const std::string& loc = state.contact_location.category();
    if (!model.location_shift_hz.count(loc)) {
      throw InvalidState("unknown contact location '" + loc + "'");
    }
    if (loc == "none") {
      if (state.contact_force_n != 0) throw InvalidState("location 'none' requires force 0");
      if (state.material != "none") throw InvalidState("location 'none' requires material 'none'");
    }
  }
  if (state.material != "none" && !model.material_gain_tilt_db.count(state.material)) {
    throw InvalidState("unknown material '" + state.material + "'");
  }
  if (state.pose_id < 0 ||
      static_cast<std::size_t>(state.pose_id) > model.pose_noise_profiles.size()) {
    throw InvalidState("pose_id has no noise profile");
  }
}

bool in_contact(const ActuatorState& state) {
  if (state.contact_force_n <= 0) return false;
  if (!state.contact_location.is_number() && state.contact_location.category() == "none") {
    return false;
  }
  return true;
}

}  // namespace

std::string to_string(StimulusKind kind) {
  switch (kind) {
    case StimulusKind::Active: return "active";
    case StimulusKind::Passive: return "passive";
    case StimulusKind::Dynamic: return "dynamic";
    case StimulusKind::Raw: return "raw";
  }
  return "unknown";
}

StimulusKind stimulus_kind_from_string(const std::string& name) {
  if (name == "active") return StimulusKind::Active;
  if (name == "passive") return StimulusKind::Passive;
  if (name == "dynamic") return StimulusKind::Dynamic;
  if (name == "raw") return StimulusKind::Raw;
  throw SchemaMismatch("unknown stimulus kind '" + name + "'");
}

Stimulus Stimulus::active(const SoundSpec& spec) { return active(spec, synthesize(spec)); }

Stimulus Stimulus::active(const SoundSpec& spec, Waveform prerendered) {
  Stimulus s;
  s.kind_ = StimulusKind::Active;
  s.spec_ = spec;
  s.duration_s_ = spec.duration_s;
  s.waveform_ = std::move(prerendered);
  return s;
}

Stimulus Stimulus::passive(double duration_s) {
  Stimulus s;
  s.kind_ = StimulusKind::Passive;
  s.duration_s_ = duration_s;
  return s;
}

Stimulus Stimulus::dynamic_tap(double duration_s, double strength) {
  Stimulus s;
  s.kind_ = StimulusKind::Dynamic;
  s.duration_s_ = duration_s;
  Waveform w;
  w.samples.assign(1, strength);  // resized to the recording length in modulate
  s.waveform_ = std::move(w);
  return s;
}

Stimulus Stimulus::raw(Waveform waveform) {
  Stimulus s;
  s.kind_ = StimulusKind::Raw;
  s.duration_s_ = waveform.duration_s();
  s.waveform_ = std::move(waveform);
  return s;
}

std::vector<Resonance> effective_resonances(const ActuatorModel& model,
                                            const ActuatorState& state) {
  validate_state(model, state);

  const std::vector<double>* cat_shift = nullptr;
  double position_mm = 0.0;
  bool continuous = state.contact_location.is_number();
  if (continuous) {
    position_mm = state.contact_location.number();
  } else {
    cat_shift = &model.location_shift_hz.at(state.contact_location.category());
  }

  const double env_scale = 1.0 + model.inflation_shift_coeff * state.inflation_kpa +
                           model.temperature_coeff * (state.temperature_c - 20.0);
  const double q_scale = 1.0 - model.force_q_coeff * state.contact_force_n;

  double tilt_db = 0.0;
  if (in_contact(state) && state.material != "none") {
    tilt_db = model.material_gain_tilt_db.at(state.material);
  }

  std::vector<Resonance> out(model.resonances.size());
  for (std::size_t k = 0; k < model.resonances.size(); ++k) {
    const Resonance& r = model.resonances[k];
    double shift = 0.0;
    if (continuous) {
      if (k < model.position_shift_hz_per_mm.size()) {
        shift = model.position_shift_hz_per_mm[k] * position_mm;
      }
    } else if (cat_shift && k < cat_shift->size()) {
      shift = (*cat_shift)[k];
    }
    Resonance eff;
    eff.center_hz = r.center_hz * env_scale + shift;
    eff.q = r.q * q_scale;
    eff.gain = r.gain;
    if (tilt_db != 0.0) {
      eff.gain *= amplitude_from_db(tilt_db * std::log10(eff.center_hz / 1000.0));
    }
    if (!(eff.center_hz > 0.0 && eff.center_hz < model.nyquist_hz())) {
      throw UnstableFilter("shifted center frequency outside (0, Nyquist)");
    }
    if (!(eff.q > 0.0)) {
      throw UnstableFilter("effective Q is not positive");
    }
    out[k] = eff;
  }
  return out;
}

Recording modulate(const ActuatorModel& model, const ActuatorState& state,
                   const Stimulus& stimulus,
                   const std::optional<ExternalSound>& external, std::uint64_t seed) {
  std::vector<Resonance> bank = effective_resonances(model, state);

  std::size_t n = 0;
  const Waveform* drive = nullptr;
  Waveform impulse;
  switch (stimulus.kind()) {
    case StimulusKind::Active:
    case StimulusKind::Raw:
      drive = &*stimulus.waveform();
      if (drive->sample_rate_hz != model.sample_rate_hz) {
        throw RateMismatch("stimulus sample rate differs from model rate");
      }
      n = drive->size();
      break;
    case StimulusKind::Dynamic:
      n = length_from_duration(stimulus.duration_s(), model.sample_rate_hz);
      impulse.sample_rate_hz = model.sample_rate_hz;
      impulse.samples.assign(n, 0.0);
      impulse.samples[0] = stimulus.waveform()->samples[0];
      drive = &impulse;
      break;
    case StimulusKind::Passive:
      n = length_from_duration(stimulus.duration_s(), model.sample_rate_hz);
      break;
  }
  if (n < 1) throw InvalidSpec("empty stimulus");

  Waveform out;
  out.sample_rate_hz = model.sample_rate_hz;
  out.samples.assign(n, 0.0);

  if (drive != nullptr) {
    for (const Resonance& r : bank) {
      dsp::Biquad bq = dsp::make_resonator(r.center_hz, r.q, model.sample_rate_hz);
      bq.process_add(drive->samples.data(), out.samples.data(), n, r.gain);
    }
  }

  if (external.has_value()) {
    const Waveform& ext = external->waveform;
    if (ext.sample_rate_hz != model.sample_rate_hz) {
      throw RateMismatch("external sample rate differs from model rate");
    }
    if (ext.size() < n) throw ExternalTooShort("external sound shorter than the recording");
    double ext_rms = ext.rms();
    if (ext_rms > 0.0) {
      double gain = amplitude_from_db(external->level_db - kFullScaleDb - model.insulation_db) /
                    ext_rms;
      for (std::size_t i = 0; i < n; ++i) out.samples[i] += gain * ext.samples[i];
    }
  }

  if (state.pose_id > 0) {
    const PoseNoise& hum = model.pose_noise_profiles[static_cast<std::size_t>(state.pose_id) - 1];
    const double dt = 1.0 / model.sample_rate_hz;
    for (std::size_t j = 0; j < hum.freq_hz.size(); ++j) {
      const double omega = 2.0 * kPi * hum.freq_hz[j];
      const double amp = hum.amplitude[j];
      const double phase = hum.phase[j];
      for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] += amp * std::sin(omega * static_cast<double>(i) * dt + phase);
      }
    }
  }

  if (model.mic_noise_rms > 0.0) {
    Rng rng(combine_seed(seed, kMicNoiseTag));
    const double scale = model.mic_noise_rms * std::sqrt(3.0);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] += scale * rng.uniform_signed();
  }

  for (double& s : out.samples) s = std::clamp(s, -1.0, 1.0);

  Recording rec;
  rec.waveform = std::move(out);
  rec.state = state;
  rec.actuator_id = model.actuator_id;
  rec.stimulus_kind = stimulus.kind();
  rec.stimulus_spec = stimulus.spec();
  rec.noise_seed = seed;
  return rec;
}

std::vector<Recording> sample_dataset(const ActuatorModel& model,
                                      const std::vector<ActuatorState>& states,
                                      const Stimulus& stimulus, int repeats,
                                      std::uint64_t seed, int jobs) {
  if (repeats < 1) throw InvalidSpec("repeats must be >= 1");

  // Seeds are derived per (state, repeat), so recordings are independent and
  // any subset can be regenerated (or generated in parallel) bit-identically.
  const std::size_t total = states.size() * static_cast<std::size_t>(repeats);
  std::vector<Recording> out(total);
  parallel_for(total, jobs, [&](std::size_t i) {
    const std::size_t si = i / static_cast<std::size_t>(repeats);
    const std::size_t rep = i % static_cast<std::size_t>(repeats);
    std::uint64_t rec_seed = combine_seed(seed, si, rep);
    out[i] = modulate(model, states[si], stimulus, std::nullopt, rec_seed);
  });

  // Recording order is randomized, mirroring randomized acquisition order.
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(combine_seed(seed, kShuffleTag));
  rng.shuffle(order);
  std::vector<Recording> shuffled;
  shuffled.reserve(out.size());
  for (std::size_t i : order) shuffled.push_back(std::move(out[i]));
  return shuffled;
}

ActuatorModel base_model() {
  ActuatorModel m;
  m.actuator_id = "default";

  m.resonances = {
      {230.0, 12.0, 0.30}, {520.0, 11.0, 0.35}, {980.0, 10.0, 0.40},
      {1600.0, 13.0, 0.45}, {2580.0, 14.0, 1.00}, {3900.0, 12.0, 0.45},
      {6200.0, 10.0, 0.35}, {8800.0, 9.0, 0.25},
  };

  m.location_shift_hz = {
      {"base", {-14, -22, -30, -45, -60, -70, -50, -40}},
      {"middle", {6, 12, 25, 40, 55, 45, 30, 20}},
      {"tip", {18, 30, 45, 70, 95, 120, 150, 180}},
      {"left", {-8, 18, -20, 30, -45, 60, -70, 90}},
      {"right", {12, -16, 28, -38, 42, -55, 75, -95}},
      {"top", {-20, 25, 35, -55, 20, 85, -95, 60}},
      {"none", {0, 0, 0, 0, 0, 0, 0, 0}},
  };
  m.position_shift_hz_per_mm = {0.3, -0.5, 0.8, -1.1, 1.6, 2.2, -2.8, 3.4};

  m.force_q_coeff = 0.08;
  m.inflation_shift_coeff = 1.2e-3;
  m.temperature_coeff = 1.8e-3;
  m.material_gain_tilt_db = {{"wood", -2.0}, {"silicone", 0.0}, {"aluminum", 2.0}, {"none", 0.0}};

  m.insulation_db = 40.0;
  m.mic_noise_rms = 3e-4;

  // Frozen pose hum signatures: three low-frequency components per pose,
  // overlapping the lowest resonant mode so single-pose models overfit.
  Rng rng(0x706f73652d68756dull);
  m.pose_noise_profiles.resize(16);
  for (PoseNoise& hum : m.pose_noise_profiles) {
    for (std::size_t j = 0; j < 3; ++j) {
      hum.freq_hz[j] = 140.0 + 320.0 * rng.uniform();
      hum.amplitude[j] = 0.08 * (0.5 + rng.uniform());
      hum.phase[j] = 2.0 * kPi * rng.uniform();
    }
  }
  return m;
}

ActuatorModel default_model(const std::string& actuator_id, std::uint64_t seed) {
  ActuatorModel m = base_model();
  m.actuator_id = actuator_id;
  Rng rng(combine_seed(hash_string(actuator_id), seed));
  for (Resonance& r : m.resonances) {
    r.center_hz *= 1.0 + 0.05 * rng.uniform_signed();
    r.gain *= 1.0 + 0.20 * rng.uniform_signed();
  }
  return m;
}

}  // namespace asense
