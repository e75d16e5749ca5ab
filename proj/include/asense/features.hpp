#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "asense/actuator.hpp"
#include "asense/label.hpp"
#include "asense/waveform.hpp"

namespace asense {

/// Amplitude spectrum of one recording: DFT magnitudes at bins 1..floor(N/2)
/// scaled by 2/N (DC dropped, phase discarded). The model input vector.
struct SpectrumFeature {
  std::vector<double> amplitudes;
  double bin_hz = 0.0;
  double first_bin_hz = 0.0;
  double sample_rate_hz = 0.0;
};

/// Labels carried alongside each feature vector, copied from the recording.
struct SampleLabels {
  Label location = Label::category("none");
  double force_n = 0.0;
  double inflation_kpa = 0.0;
  double temperature_c = 20.0;
  std::string material = "none";
  int pose_id = 0;
  std::string actuator_id;
};

enum class Target { Location, Force, Inflation, Temperature, Material, PoseId, ActuatorId };

std::string to_string(Target t);
Target target_from_string(const std::string& name);

/// Target value as a class label (classification tasks).
Label label_of(const SampleLabels& labels, Target target);

/// Target value as a number (regression tasks). Throws WrongTargetType for
/// categorical-only targets or a categorical contact location.
double numeric_of(const SampleLabels& labels, Target target);

struct FeatureSet {
  std::vector<SpectrumFeature> features;
  std::vector<SampleLabels> labels;

  std::size_t size() const { return features.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features.front().amplitudes.size(); }
};

/// Truncates every waveform (keeping the onset) to target_len, default the
/// shortest length present.
std::vector<Recording> trim(const std::vector<Recording>& recordings,
                            std::optional<std::size_t> target_len = std::nullopt);

SpectrumFeature amplitude_spectrum(const Waveform& w);
SpectrumFeature amplitude_spectrum(const Recording& r);

SampleLabels labels_from(const Recording& r);

/// trim + per-recording amplitude spectrum + label copy. `normalize` scales
/// each spectrum to unit L2 norm (off by default; raw amplitudes are the
/// model input).
FeatureSet featurize(const std::vector<Recording>& recordings,
                     std::optional<std::size_t> target_len = std::nullopt,
                     bool normalize = false);

}  // namespace asense
