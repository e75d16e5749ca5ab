#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asense/label.hpp"
#include "asense/signal.hpp"
#include "asense/waveform.hpp"

namespace asense {

/// Categorical contact locations understood by the default shift tables.
inline const std::vector<std::string>& location_names() {
  static const std::vector<std::string> names = {"base", "middle", "tip",
                                                 "left", "right", "top", "none"};
  return names;
}

/// Simulated actuator condition for one recording. The contact location is
/// either one of the categorical labels above or a continuous position in mm
/// along the finger.
struct ActuatorState {
  Label contact_location = Label::category("none");
  double contact_force_n = 0.0;
  double inflation_kpa = 0.0;
  double temperature_c = 20.0;
  std::string material = "none";
  int pose_id = 0;  // 0 = no robot noise

  static ActuatorState at(const std::string& location, double force_n = 1.0,
                          const std::string& material = "wood") {
    ActuatorState s;
    s.contact_location = Label::category(location);
    if (location == "none") {
      s.contact_force_n = 0.0;
      s.material = "none";
    } else {
      s.contact_force_n = force_n;
      s.material = material;
    }
    return s;
  }

  static ActuatorState at_mm(double position_mm, double force_n = 1.0,
                             const std::string& material = "wood") {
    ActuatorState s;
    s.contact_location = Label::number(position_mm);
    s.contact_force_n = force_n;
    s.material = material;
    return s;
  }
};

struct Resonance {
  double center_hz = 0.0;
  double q = 10.0;
  double gain = 1.0;
};

/// Three-component narrowband hum signature of one robot workspace pose.
struct PoseNoise {
  std::array<double, 3> freq_hz{};
  std::array<double, 3> amplitude{};
  std::array<double, 3> phase{};
};

/// Parametric acoustic response of one simulated actuator: a bank of
/// second-order resonators whose centers, widths, and gains move as a
/// deterministic function of the actuator state. Deliberately simple; it is
/// a test oracle that stands in for hardware, not a physical model.
struct ActuatorModel {
  std::string actuator_id;
  double sample_rate_hz = 48000.0;
  double finger_length_mm = 90.0;

  std::vector<Resonance> resonances;
  // Per categorical location, one additive center shift (Hz) per mode.
  std::map<std::string, std::vector<double>> location_shift_hz;
  // Continuous contact position: additive center shift per mode, Hz per mm.
  std::vector<double> position_shift_hz_per_mm;

  double force_q_coeff = 0.08;          // relative Q reduction per newton
  double inflation_shift_coeff = 1.2e-3;  // relative center shift per kPa
  double temperature_coeff = 1.8e-3;      // relative center shift per degC above 20
  // Per material, spectral tilt in dB per decade (referenced to 1 kHz),
  // applied to mode gains while in contact.
  std::map<std::string, double> material_gain_tilt_db;

  double insulation_db = 40.0;   // attenuation of external sound entering the chamber
  double mic_noise_rms = 2e-4;   // microphone noise floor (RMS amplitude)
  std::vector<PoseNoise> pose_noise_profiles;  // index pose_id - 1

  double nyquist_hz() const { return sample_rate_hz / 2.0; }
};

/// External sound present in the environment. `level_db` places the sound on
/// the simulator's absolute scale where 120 dB corresponds to RMS 1.0 (full
/// scale); the waveform itself is normalized to unit RMS before scaling, so
/// the level alone fixes its strength. Insulation is applied on top.
struct ExternalSound {
  Waveform waveform;
  double level_db = 0.0;
};

/// Reference level of the absolute dB scale used for external sounds.
inline constexpr double kFullScaleDb = 120.0;

enum class StimulusKind { Active, Passive, Dynamic, Raw };

std::string to_string(StimulusKind kind);
StimulusKind stimulus_kind_from_string(const std::string& name);

/// What drives the chamber during a recording: a synthesized stimulus, raw
/// samples, a tap transient (unit impulse), or nothing (passive).
class Stimulus {
public:
  static Stimulus active(const SoundSpec& spec);
  static Stimulus active(const SoundSpec& spec, Waveform prerendered);
  static Stimulus passive(double duration_s);
  static Stimulus dynamic_tap(double duration_s, double strength = 0.5);
  static Stimulus raw(Waveform waveform);

  StimulusKind kind() const { return kind_; }
  const std::optional<SoundSpec>& spec() const { return spec_; }
  const std::optional<Waveform>& waveform() const { return waveform_; }
  double duration_s() const { return duration_s_; }

private:
  Stimulus() = default;
  StimulusKind kind_ = StimulusKind::Passive;
  std::optional<SoundSpec> spec_;
  std::optional<Waveform> waveform_;
  double duration_s_ = 0.0;
};

/// Labeled mono recording produced by the simulator (or read from disk).
struct Recording {
  Waveform waveform;
  ActuatorState state;
  std::string actuator_id;
  StimulusKind stimulus_kind = StimulusKind::Passive;
  std::optional<SoundSpec> stimulus_spec;  // set for Active
  std::uint64_t noise_seed = 0;
};

/// Resonator parameters after applying the state-dependent shifts. Exposed
/// for inspection and tests; modulate() uses exactly these values.
std::vector<Resonance> effective_resonances(const ActuatorModel& model,
                                            const ActuatorState& state);

/// Runs the simulator for one recording:
///   output = sum_k resonator_k(stimulus) + insulated external + pose hum + mic noise
/// Deterministic given (model, state, stimulus, external, seed).
Recording modulate(const ActuatorModel& model, const ActuatorState& state,
                   const Stimulus& stimulus,
                   const std::optional<ExternalSound>& external, std::uint64_t seed);

/// |states| * repeats recordings with per-recording seeds derived from
/// (seed, state index, repeat index); output order is seed-shuffled. `jobs`
/// bounds worker parallelism; the result does not depend on it.
std::vector<Recording> sample_dataset(const ActuatorModel& model,
                                      const std::vector<ActuatorState>& states,
                                      const Stimulus& stimulus, int repeats,
                                      std::uint64_t seed, int jobs = 1);

/// Canonical model before per-actuator jitter (largest-gain mode at 2580 Hz).
ActuatorModel base_model();

/// Base model with per-actuator jitter seeded by (actuator_id, seed):
/// resonance centers perturbed within +-5 % and gains within +-20 %.
ActuatorModel default_model(const std::string& actuator_id, std::uint64_t seed);

}  // namespace asense
