#include "asense/features.hpp"

#include <algorithm>
#include <cmath>

#include "asense/dsp.hpp"
#include "asense/errors.hpp"

namespace asense {

std::string to_string(Target t) {
  switch (t) {
    case Target::Location: return "location";
    case Target::Force: return "force";
    case Target::Inflation: return "inflation";
    case Target::Temperature: return "temperature";
    case Target::Material: return "material";
    case Target::PoseId: return "pose_id";
    case Target::ActuatorId: return "actuator_id";
  }
  return "unknown";
}

Target target_from_string(const std::string& name) {
  if (name == "location") return Target::Location;
  if (name == "force") return Target::Force;
  if (name == "inflation") return Target::Inflation;
  if (name == "temperature") return Target::Temperature;
  if (name == "material") return Target::Material;
  if (name == "pose_id" || name == "pose") return Target::PoseId;
  if (name == "actuator_id" || name == "actuator") return Target::ActuatorId;
  throw MissingTarget("unknown target '" + name + "'");
}

Label label_of(const SampleLabels& labels, Target target) {
  switch (target) {
    case Target::Location: return labels.location;
    case Target::Force: return Label::number(labels.force_n);
    case Target::Inflation: return Label::number(labels.inflation_kpa);
    case Target::Temperature: return Label::number(labels.temperature_c);
    case Target::Material: return Label::category(labels.material);
    case Target::PoseId: return Label::number(labels.pose_id);
    case Target::ActuatorId: return Label::category(labels.actuator_id);
  }
  throw MissingTarget("unhandled target");
}

double numeric_of(const SampleLabels& labels, Target target) {
  switch (target) {
    case Target::Location:
      if (!labels.location.is_number()) {
        throw WrongTargetType("contact location is categorical, not a position");
      }
      return labels.location.number();
    case Target::Force: return labels.force_n;
    case Target::Inflation: return labels.inflation_kpa;
    case Target::Temperature: return labels.temperature_c;
    case Target::PoseId: return labels.pose_id;
    case Target::Material:
    case Target::ActuatorId:
      throw WrongTargetType("target '" + to_string(target) + "' is categorical");
  }
  throw MissingTarget("unhandled target");
}

std::vector<Recording> trim(const std::vector<Recording>& recordings,
                            std::optional<std::size_t> target_len) {
  if (recordings.empty()) return {};
  const double rate = recordings.front().waveform.sample_rate_hz;
  std::size_t shortest = recordings.front().waveform.size();
  for (const Recording& r : recordings) {
    if (r.waveform.sample_rate_hz != rate) {
      throw MixedSampleRates("recordings do not share one sample rate");
    }
    shortest = std::min(shortest, r.waveform.size());
  }
  const std::size_t len = target_len.value_or(shortest);
  if (len > shortest) throw TargetTooLong("target length exceeds the shortest recording");

  std::vector<Recording> out = recordings;
  for (Recording& r : out) r.waveform.samples.resize(len);
  return out;
}

SpectrumFeature amplitude_spectrum(const Waveform& w) {
  const std::size_t n = w.size();
  if (n < 2) throw TooShort("waveform must have at least 2 samples");

  std::vector<dsp::cplx> spec = dsp::dft_real(w.samples);
  const std::size_t half = n / 2;
  SpectrumFeature f;
  f.sample_rate_hz = w.sample_rate_hz;
  f.bin_hz = w.sample_rate_hz / static_cast<double>(n);
  f.first_bin_hz = f.bin_hz;
  f.amplitudes.resize(half);
  const double scale = 2.0 / static_cast<double>(n);
  for (std::size_t k = 1; k <= half; ++k) {
    f.amplitudes[k - 1] = scale * std::abs(spec[k]);
  }
  return f;
}

SpectrumFeature amplitude_spectrum(const Recording& r) { return amplitude_spectrum(r.waveform); }

SampleLabels labels_from(const Recording& r) {
  SampleLabels l;
  l.location = r.state.contact_location;
  l.force_n = r.state.contact_force_n;
  l.inflation_kpa = r.state.inflation_kpa;
  l.temperature_c = r.state.temperature_c;
  l.material = r.state.material;
  l.pose_id = r.state.pose_id;
  l.actuator_id = r.actuator_id;
  return l;
}

FeatureSet featurize(const std::vector<Recording>& recordings,
                     std::optional<std::size_t> target_len, bool normalize) {
  if (recordings.empty()) throw EmptyData("featurize needs at least one recording");
  std::vector<Recording> trimmed = trim(recordings, target_len);

  FeatureSet set;
  set.features.resize(trimmed.size());
  set.labels.resize(trimmed.size());

  const std::size_t n = trimmed.front().waveform.size();
  if (n < 2) throw TooShort("trimmed recordings must have at least 2 samples");

  // Two real signals share one complex transform.
  const std::size_t half = n / 2;
  const double scale = 2.0 / static_cast<double>(n);
  const double bin_hz = trimmed.front().waveform.sample_rate_hz / static_cast<double>(n);
  auto fill = [&](std::size_t idx, const std::vector<dsp::cplx>& spec) {
    SpectrumFeature& f = set.features[idx];
    f.sample_rate_hz = trimmed[idx].waveform.sample_rate_hz;
    f.bin_hz = bin_hz;
    f.first_bin_hz = bin_hz;
    f.amplitudes.resize(half);
    for (std::size_t k = 1; k <= half; ++k) f.amplitudes[k - 1] = scale * std::abs(spec[k]);
  };

  std::vector<dsp::cplx> sx, sy;
  std::size_t i = 0;
  for (; i + 1 < trimmed.size(); i += 2) {
    dsp::dft_real_pair(trimmed[i].waveform.samples, trimmed[i + 1].waveform.samples, sx, sy);
    fill(i, sx);
    fill(i + 1, sy);
  }
  if (i < trimmed.size()) fill(i, dsp::dft_real(trimmed[i].waveform.samples));

  if (normalize) {
    for (SpectrumFeature& f : set.features) {
      double norm = 0.0;
      for (double a : f.amplitudes) norm += a * a;
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (double& a : f.amplitudes) a /= norm;
      }
    }
  }

  for (std::size_t j = 0; j < trimmed.size(); ++j) set.labels[j] = labels_from(trimmed[j]);
  return set;
}

}  // namespace asense
