#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asense/actuator.hpp"
#include "asense/eval.hpp"
#include "asense/features.hpp"
#include "asense/models.hpp"
#include "asense/waveform.hpp"

namespace asense {

/// Uncompressed RIFF/WAVE, IEEE float 32-bit, mono. Round-trips losslessly at
/// float precision (doubles are quantized to float32 on write).
void write_wav(const std::filesystem::path& path, const Waveform& w);
Waveform read_wav(const std::filesystem::path& path);

inline constexpr int kDatasetSchemaVersion = 1;

struct ManifestEntry {
  std::string audio_path;  // relative to the dataset directory
  ActuatorState state;
  std::string actuator_id;
  StimulusKind stimulus_kind = StimulusKind::Passive;
  std::optional<SoundSpec> stimulus_spec;
  double stimulus_duration_s = 0.0;  // passive/dynamic/raw
  std::uint64_t noise_seed = 0;
};

/// Line-delimited manifest: a header record with the schema version and
/// global defaults, then one record per recording. Field order is fixed, so
/// manifests are diffable.
struct Manifest {
  int schema_version = kDatasetSchemaVersion;
  double sample_rate_hz = 48000.0;
  std::vector<ManifestEntry> entries;
};

/// One WAV per recording plus manifest.jsonl in `directory`.
Manifest write_dataset(const std::vector<Recording>& recordings,
                       const std::filesystem::path& directory);

Manifest read_manifest(const std::filesystem::path& directory);
std::vector<Recording> read_dataset(const std::filesystem::path& directory);

/// Simulator parameters as a human-readable key-value document.
std::string model_params_to_json(const ActuatorModel& model);
ActuatorModel model_params_from_json(const std::string& text);
void write_model_params(const std::filesystem::path& path, const ActuatorModel& model);
ActuatorModel read_model_params(const std::filesystem::path& path);

/// Feature sets persist as CBOR (self-describing binary with a version tag).
void write_featureset(const std::filesystem::path& path, const FeatureSet& set);
FeatureSet read_featureset(const std::filesystem::path& path);

/// Trained models persist as CBOR carrying version, kind, hyperparameters,
/// and the stored training set (KNN) or weights (SVC).
void write_sensor_model(const std::filesystem::path& path, const SensorModel& model);
SensorModel read_sensor_model(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace asense
