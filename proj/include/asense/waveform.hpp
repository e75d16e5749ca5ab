#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace asense {

/// Mono audio buffer. Samples are amplitudes in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  double sample_rate_hz = 48000.0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }

  double peak() const {
    double p = 0.0;
    for (double s : samples) p = std::max(p, std::fabs(s));
    return p;
  }

  double rms() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double s : samples) acc += s * s;
    return std::sqrt(acc / static_cast<double>(samples.size()));
  }

  /// Mean squared amplitude.
  double power() const {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double s : samples) acc += s * s;
    return acc / static_cast<double>(samples.size());
  }
};

inline double db_from_power(double p_ratio) { return 10.0 * std::log10(p_ratio); }
inline double db_from_amplitude(double a_ratio) { return 20.0 * std::log10(a_ratio); }
inline double amplitude_from_db(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace asense
