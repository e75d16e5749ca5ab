#include "asense/dataset_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "asense/errors.hpp"
#include "json.hpp"

namespace asense {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t off) {
  return static_cast<std::uint8_t>(s[off]) | (static_cast<std::uint8_t>(s[off + 1]) << 8) |
         (static_cast<std::uint8_t>(s[off + 2]) << 16) |
         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[off + 3])) << 24);
}

std::uint16_t get_u16(const std::string& s, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<std::uint8_t>(s[off]) |
                                    (static_cast<std::uint8_t>(s[off + 1]) << 8));
}

ordered_json spec_to_json(const SoundSpec& spec) {
  ordered_json j;
  j["kind"] = to_string(spec.kind);
  j["duration_s"] = spec.duration_s;
  j["sample_rate_hz"] = spec.sample_rate_hz;
  j["volume"] = spec.volume;
  j["seed"] = spec.seed;
  j["f_start_hz"] = spec.f_start_hz;
  j["f_end_hz"] = spec.f_end_hz;
  j["band_low_hz"] = spec.band_low_hz;
  j["band_high_hz"] = spec.band_high_hz;
  j["sine_freq_hz"] = spec.sine_freq_hz;
  return j;
}

SoundSpec spec_from_json(const ordered_json& j) {
  SoundSpec spec;
  spec.kind = sound_kind_from_string(j.at("kind").get<std::string>());
  spec.duration_s = j.at("duration_s").get<double>();
  spec.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  spec.volume = j.at("volume").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.f_start_hz = j.at("f_start_hz").get<double>();
  spec.f_end_hz = j.at("f_end_hz").get<double>();
  spec.band_low_hz = j.at("band_low_hz").get<double>();
  spec.band_high_hz = j.at("band_high_hz").get<double>();
  spec.sine_freq_hz = j.at("sine_freq_hz").get<double>();
  return spec;
}

ordered_json label_to_json(const Label& label) {
  if (label.is_number()) return label.number();
  return label.category();
}

Label label_from_json(const ordered_json& j) {
  if (j.is_number()) return Label::number(j.get<double>());
  return Label::category(j.get<std::string>());
}

ordered_json state_to_json(const ActuatorState& state) {
  ordered_json j;
  j["location"] = label_to_json(state.contact_location);
  j["force_n"] = state.contact_force_n;
  j["inflation_kpa"] = state.inflation_kpa;
  j["temperature_c"] = state.temperature_c;
  j["material"] = state.material;
  j["pose_id"] = state.pose_id;
  return j;
}

ActuatorState state_from_json(const ordered_json& j) {
  ActuatorState s;
  s.contact_location = label_from_json(j.at("location"));
  s.contact_force_n = j.at("force_n").get<double>();
  s.inflation_kpa = j.at("inflation_kpa").get<double>();
  s.temperature_c = j.at("temperature_c").get<double>();
  s.material = j.at("material").get<std::string>();
  s.pose_id = j.at("pose_id").get<int>();
  return s;
}

ordered_json labels_to_json(const SampleLabels& l) {
  ordered_json j;
  j["location"] = label_to_json(l.location);
  j["force_n"] = l.force_n;
  j["inflation_kpa"] = l.inflation_kpa;
  j["temperature_c"] = l.temperature_c;
  j["material"] = l.material;
  j["pose_id"] = l.pose_id;
  j["actuator_id"] = l.actuator_id;
  return j;
}

SampleLabels labels_from_json(const ordered_json& j) {
  SampleLabels l;
  l.location = label_from_json(j.at("location"));
  l.force_n = j.at("force_n").get<double>();
  l.inflation_kpa = j.at("inflation_kpa").get<double>();
  l.temperature_c = j.at("temperature_c").get<double>();
  l.material = j.at("material").get<std::string>();
  l.pose_id = j.at("pose_id").get<int>();
  l.actuator_id = j.at("actuator_id").get<std::string>();
  return l;
}

ordered_json parse_json(const std::string& text, const std::string& what) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaMismatch("cannot parse " + what);
  return j;
}

}  // namespace

void write_wav(const fs::path& path, const Waveform& w) {
  if (!(w.sample_rate_hz > 0)) throw UnsupportedRate("sample rate must be positive");
  const auto rate = static_cast<std::uint32_t>(std::llround(w.sample_rate_hz));
  const auto n = static_cast<std::uint32_t>(w.size());
  const std::uint32_t data_bytes = n * 4;

  std::string out;
  out.reserve(58 + data_bytes);
  out += "RIFF";
  put_u32(out, 4 + 24 + 12 + 8 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 3);  // IEEE float
  put_u16(out, 1);  // mono
  put_u32(out, rate);
  put_u32(out, rate * 4);  // byte rate
  put_u16(out, 4);         // block align
  put_u16(out, 32);        // bits per sample
  out += "fact";
  put_u32(out, 4);
  put_u32(out, n);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : w.samples) {
    float f = static_cast<float>(s);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoFailure("cannot open '" + path.string() + "' for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoFailure("write failed for '" + path.string() + "'");
}

Waveform read_wav(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw MissingAudio("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  const std::string s = buf.str();

  if (s.size() < 12 || s.compare(0, 4, "RIFF") != 0 || s.compare(8, 4, "WAVE") != 0) {
    throw CorruptAudio("'" + path.string() + "' is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= s.size()) {
    const std::string id = s.substr(off, 4);
    const std::uint32_t len = get_u32(s, off + 4);
    const std::size_t body = off + 8;
    if (body + len > s.size()) throw CorruptAudio("truncated chunk in '" + path.string() + "'");
    if (id == "fmt ") {
      if (len < 16) throw CorruptAudio("short fmt chunk in '" + path.string() + "'");
      format = get_u16(s, body);
      channels = get_u16(s, body + 2);
      rate = get_u32(s, body + 4);
      bits = get_u16(s, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_off = body;
      data_len = len;
    }
    off = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) throw CorruptAudio("missing chunks in '" + path.string() + "'");
  if (format != 3 || channels != 1 || bits != 32) {
    throw CorruptAudio("'" + path.string() + "' is not mono 32-bit float");
  }
  if (data_len % 4 != 0) throw CorruptAudio("odd data size in '" + path.string() + "'");

  Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(data_len / 4);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    std::uint32_t b = get_u32(s, data_off + 4 * i);
    float f;
    std::memcpy(&f, &b, 4);
    w.samples[i] = f;
  }
  return w;
}

Manifest write_dataset(const std::vector<Recording>& recordings, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoFailure("cannot create '" + directory.string() + "': " + ec.message());

  Manifest manifest;
  manifest.sample_rate_hz =
      recordings.empty() ? 48000.0 : recordings.front().waveform.sample_rate_hz;

  std::ostringstream lines;
  ordered_json header;
  header["schema"] = "asense-dataset";
  header["version"] = kDatasetSchemaVersion;
  header["sample_rate_hz"] = manifest.sample_rate_hz;
  header["count"] = recordings.size();
  lines << header.dump() << "\n";

  for (std::size_t i = 0; i < recordings.size(); ++i) {
    const Recording& rec = recordings[i];
    char name[32];
    std::snprintf(name, sizeof(name), "rec_%05zu.wav", i);
    write_wav(directory / name, rec.waveform);

    ManifestEntry entry;
    entry.audio_path = name;
    entry.state = rec.state;
    entry.actuator_id = rec.actuator_id;
    entry.stimulus_kind = rec.stimulus_kind;
    entry.stimulus_spec = rec.stimulus_spec;
    entry.stimulus_duration_s = rec.waveform.duration_s();
    entry.noise_seed = rec.noise_seed;
    manifest.entries.push_back(entry);

    ordered_json j;
    j["audio"] = entry.audio_path;
    j["actuator_id"] = entry.actuator_id;
    ordered_json stim;
    stim["kind"] = to_string(entry.stimulus_kind);
    if (entry.stimulus_spec) {
      stim["sound"] = spec_to_json(*entry.stimulus_spec);
    } else {
      stim["duration_s"] = entry.stimulus_duration_s;
    }
    j["stimulus"] = stim;
    j["state"] = state_to_json(entry.state);
    j["seed"] = entry.noise_seed;
    lines << j.dump() << "\n";
  }

  write_text_file(directory / "manifest.jsonl", lines.str());
  return manifest;
}

Manifest read_manifest(const fs::path& directory) {
  const fs::path manifest_path = directory / "manifest.jsonl";
  if (!fs::exists(manifest_path)) {
    throw IoFailure("no manifest at '" + manifest_path.string() + "'");
  }
  std::istringstream in(read_text_file(manifest_path));
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("empty manifest");
  ordered_json header = parse_json(line, "manifest header");
  if (header.value("schema", "") != "asense-dataset" ||
      header.value("version", -1) != kDatasetSchemaVersion) {
    throw SchemaMismatch("unrecognized dataset schema/version");
  }

  Manifest manifest;
  manifest.sample_rate_hz = header.at("sample_rate_hz").get<double>();
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j = parse_json(line, "manifest record");
    ManifestEntry entry;
    entry.audio_path = j.at("audio").get<std::string>();
    if (!seen.insert(entry.audio_path).second) {
      throw SchemaMismatch("duplicate audio path '" + entry.audio_path + "'");
    }
    entry.actuator_id = j.at("actuator_id").get<std::string>();
    const ordered_json& stim = j.at("stimulus");
    entry.stimulus_kind = stimulus_kind_from_string(stim.at("kind").get<std::string>());
    if (stim.contains("sound")) {
      entry.stimulus_spec = spec_from_json(stim.at("sound"));
      entry.stimulus_duration_s = entry.stimulus_spec->duration_s;
    } else {
      entry.stimulus_duration_s = stim.at("duration_s").get<double>();
    }
    entry.state = state_from_json(j.at("state"));
    entry.noise_seed = j.at("seed").get<std::uint64_t>();
    manifest.entries.push_back(std::move(entry));
  }
  if (header.at("count").get<std::size_t>() != manifest.entries.size()) {
    throw SchemaMismatch("manifest count does not match record lines");
  }
  return manifest;
}

std::vector<Recording> read_dataset(const fs::path& directory) {
  Manifest manifest = read_manifest(directory);
  std::vector<Recording> out;
  out.reserve(manifest.entries.size());
  for (const ManifestEntry& entry : manifest.entries) {
    const fs::path audio = directory / entry.audio_path;
    if (!fs::exists(audio)) throw MissingAudio("missing audio file '" + audio.string() + "'");
    Recording rec;
    rec.waveform = read_wav(audio);
    rec.state = entry.state;
    rec.actuator_id = entry.actuator_id;
    rec.stimulus_kind = entry.stimulus_kind;
    rec.stimulus_spec = entry.stimulus_spec;
    rec.noise_seed = entry.noise_seed;
    out.push_back(std::move(rec));
  }
  return out;
}

std::string model_params_to_json(const ActuatorModel& model) {
  ordered_json j;
  j["schema"] = "asense-actuator-model";
  j["version"] = 1;
  j["actuator_id"] = model.actuator_id;
  j["sample_rate_hz"] = model.sample_rate_hz;
  j["finger_length_mm"] = model.finger_length_mm;
  ordered_json res = ordered_json::array();
  for (const Resonance& r : model.resonances) {
    res.push_back({{"center_hz", r.center_hz}, {"q", r.q}, {"gain", r.gain}});
  }
  j["resonances"] = res;
  j["location_shift_hz"] = model.location_shift_hz;
  j["position_shift_hz_per_mm"] = model.position_shift_hz_per_mm;
  j["force_q_coeff"] = model.force_q_coeff;
  j["inflation_shift_coeff"] = model.inflation_shift_coeff;
  j["temperature_coeff"] = model.temperature_coeff;
  j["material_gain_tilt_db"] = model.material_gain_tilt_db;
  j["insulation_db"] = model.insulation_db;
  j["mic_noise_rms"] = model.mic_noise_rms;
  ordered_json poses = ordered_json::array();
  for (const PoseNoise& p : model.pose_noise_profiles) {
    poses.push_back({{"freq_hz", p.freq_hz}, {"amplitude", p.amplitude}, {"phase", p.phase}});
  }
  j["pose_noise_profiles"] = poses;
  return j.dump(2) + "\n";
}

ActuatorModel model_params_from_json(const std::string& text) {
  ordered_json j = parse_json(text, "actuator model document");
  if (j.value("schema", "") != "asense-actuator-model" || j.value("version", -1) != 1) {
    throw SchemaMismatch("unrecognized actuator model schema/version");
  }
  ActuatorModel m;
  m.actuator_id = j.at("actuator_id").get<std::string>();
  m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  m.finger_length_mm = j.at("finger_length_mm").get<double>();
  for (const auto& r : j.at("resonances")) {
    m.resonances.push_back(
        {r.at("center_hz").get<double>(), r.at("q").get<double>(), r.at("gain").get<double>()});
  }
  m.location_shift_hz =
      j.at("location_shift_hz").get<std::map<std::string, std::vector<double>>>();
  m.position_shift_hz_per_mm = j.at("position_shift_hz_per_mm").get<std::vector<double>>();
  m.force_q_coeff = j.at("force_q_coeff").get<double>();
  m.inflation_shift_coeff = j.at("inflation_shift_coeff").get<double>();
  m.temperature_coeff = j.at("temperature_coeff").get<double>();
  m.material_gain_tilt_db = j.at("material_gain_tilt_db").get<std::map<std::string, double>>();
  m.insulation_db = j.at("insulation_db").get<double>();
  m.mic_noise_rms = j.at("mic_noise_rms").get<double>();
  for (const auto& p : j.at("pose_noise_profiles")) {
    PoseNoise pn;
    pn.freq_hz = p.at("freq_hz").get<std::array<double, 3>>();
    pn.amplitude = p.at("amplitude").get<std::array<double, 3>>();
    pn.phase = p.at("phase").get<std::array<double, 3>>();
    m.pose_noise_profiles.push_back(pn);
  }
  return m;
}

void write_model_params(const fs::path& path, const ActuatorModel& model) {
  write_text_file(path, model_params_to_json(model));
}

ActuatorModel read_model_params(const fs::path& path) {
  return model_params_from_json(read_text_file(path));
}

void write_featureset(const fs::path& path, const FeatureSet& set) {
  ordered_json j;
  j["schema"] = "asense-features";
  j["version"] = 1;
  j["bin_hz"] = set.features.empty() ? 0.0 : set.features.front().bin_hz;
  j["first_bin_hz"] = set.features.empty() ? 0.0 : set.features.front().first_bin_hz;
  j["sample_rate_hz"] = set.features.empty() ? 0.0 : set.features.front().sample_rate_hz;
  ordered_json rows = ordered_json::array();
  for (const SpectrumFeature& f : set.features) rows.push_back(f.amplitudes);
  j["amplitudes"] = rows;
  ordered_json labels = ordered_json::array();
  for (const SampleLabels& l : set.labels) labels.push_back(labels_to_json(l));
  j["labels"] = labels;

  std::vector<std::uint8_t> cbor = ordered_json::to_cbor(j);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoFailure("cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(cbor.data()), static_cast<std::streamsize>(cbor.size()));
  if (!file) throw IoFailure("write failed for '" + path.string() + "'");
}

FeatureSet read_featureset(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoFailure("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                  std::istreambuf_iterator<char>());
  ordered_json j = ordered_json::from_cbor(bytes, true, false);
  if (j.is_discarded()) throw SchemaMismatch("cannot parse feature container");
  if (j.value("schema", "") != "asense-features" || j.value("version", -1) != 1) {
    throw SchemaMismatch("unrecognized feature schema/version");
  }
  FeatureSet set;
  const double bin_hz = j.at("bin_hz").get<double>();
  const double first_bin_hz = j.at("first_bin_hz").get<double>();
  const double rate = j.at("sample_rate_hz").get<double>();
  for (const auto& row : j.at("amplitudes")) {
    SpectrumFeature f;
    f.amplitudes = row.get<std::vector<double>>();
    f.bin_hz = bin_hz;
    f.first_bin_hz = first_bin_hz;
    f.sample_rate_hz = rate;
    set.features.push_back(std::move(f));
  }
  for (const auto& l : j.at("labels")) set.labels.push_back(labels_from_json(l));
  if (set.features.size() != set.labels.size()) {
    throw SchemaMismatch("feature/label count mismatch");
  }
  return set;
}

void write_sensor_model(const fs::path& path, const SensorModel& model) {
  ordered_json j;
  j["schema"] = "asense-model";
  j["version"] = 1;
  j["kind"] = to_string(model.kind());
  j["target"] = to_string(model.target());
  j["dim"] = model.feature_dim();
  if (const KnnModel* knn = model.knn()) {
    j["k"] = knn->k;
    j["metric"] = to_string(knn->metric);
    j["train_x"] = knn->train_x;
    if (knn->mode == KnnMode::Classify) {
      ordered_json targets = ordered_json::array();
      for (const Label& l : knn->class_targets) targets.push_back(label_to_json(l));
      j["class_targets"] = targets;
    } else {
      j["value_targets"] = knn->value_targets;
    }
  } else if (const SvcModel* svc = model.svc()) {
    j["c"] = svc->c;
    ordered_json classes = ordered_json::array();
    for (const Label& l : svc->classes) classes.push_back(label_to_json(l));
    j["classes"] = classes;
    j["weights"] = svc->weights;
    j["bias"] = svc->bias;
    j["converged"] = svc->converged;
    j["epochs_used"] = svc->epochs_used;
  } else {
    throw IoFailure("custom predictors have no serialized form");
  }

  std::vector<std::uint8_t> cbor = ordered_json::to_cbor(j);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoFailure("cannot open '" + path.string() + "' for writing");
  file.write(reinterpret_cast<const char*>(cbor.data()), static_cast<std::streamsize>(cbor.size()));
  if (!file) throw IoFailure("write failed for '" + path.string() + "'");
}

SensorModel read_sensor_model(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoFailure("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                  std::istreambuf_iterator<char>());
  ordered_json j = ordered_json::from_cbor(bytes, true, false);
  if (j.is_discarded()) throw SchemaMismatch("cannot parse model container");
  if (j.value("schema", "") != "asense-model" || j.value("version", -1) != 1) {
    throw SchemaMismatch("unrecognized model schema/version");
  }

  const LearnerKind kind = learner_kind_from_string(j.at("kind").get<std::string>());
  const Target target = target_from_string(j.at("target").get<std::string>());
  if (kind == LearnerKind::LinearSvc) {
    SvcModel m;
    m.target = target;
    m.dim = j.at("dim").get<std::size_t>();
    m.c = j.at("c").get<double>();
    for (const auto& l : j.at("classes")) m.classes.push_back(label_from_json(l));
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    m.converged = j.at("converged").get<bool>();
    m.epochs_used = j.at("epochs_used").get<int>();
    if (m.weights.size() != m.classes.size() * m.dim || m.bias.size() != m.classes.size()) {
      throw SchemaMismatch("inconsistent SVC weight dimensions");
    }
    return SensorModel(std::move(m));
  }

  KnnModel m;
  m.mode = kind == LearnerKind::KnnRegressor ? KnnMode::Regress : KnnMode::Classify;
  m.target = target;
  m.dim = j.at("dim").get<std::size_t>();
  m.k = j.at("k").get<int>();
  m.metric = metric_from_string(j.at("metric").get<std::string>());
  m.train_x = j.at("train_x").get<std::vector<double>>();
  if (m.mode == KnnMode::Classify) {
    for (const auto& l : j.at("class_targets")) m.class_targets.push_back(label_from_json(l));
    if (m.class_targets.size() * m.dim != m.train_x.size()) {
      throw SchemaMismatch("inconsistent KNN dimensions");
    }
  } else {
    m.value_targets = j.at("value_targets").get<std::vector<double>>();
    if (m.value_targets.size() * m.dim != m.train_x.size()) {
      throw SchemaMismatch("inconsistent KNN dimensions");
    }
  }
  return SensorModel(std::move(m));
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoFailure("cannot open '" + path.string() + "' for writing");
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!file) throw IoFailure("write failed for '" + path.string() + "'");
}

std::string read_text_file(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoFailure("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

}  // namespace asense
