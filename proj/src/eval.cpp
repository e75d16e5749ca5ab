#include "asense/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "asense/errors.hpp"
#include "asense/rng.hpp"
#include "json.hpp"

namespace asense {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kDatasetTag = 0x646174617365740aull;
constexpr std::uint64_t kSplitTag = 0x73706c69742d7461ull;
constexpr std::uint64_t kExternalTag = 0x65787465726e616cull;
constexpr std::uint64_t kJitterTag = 0x6a69747465722d31ull;
constexpr std::uint64_t kPoseTag = 0x706f73652d646174ull;
constexpr std::uint64_t kCellTag = 0x63656c6c2d736565ull;
constexpr std::uint64_t kShuffleLabelTag = 0x7368756666732d6cull;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double std_error(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean_of(xs);
  double var = 0.0;
  for (double x : xs) var += (x - m) * (x - m);
  var /= static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

void for_each_combination(std::size_t n, std::size_t m,
                          const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (m > n || m == 0) return;
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t i = m;
    while (i > 0 && idx[i - 1] == n - m + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

FeatureSet concat(const std::vector<const FeatureSet*>& parts) {
  FeatureSet out;
  for (const FeatureSet* p : parts) {
    out.features.insert(out.features.end(), p->features.begin(), p->features.end());
    out.labels.insert(out.labels.end(), p->labels.begin(), p->labels.end());
  }
  return out;
}

std::vector<Recording> select(const std::vector<Recording>& recs,
                              const std::vector<std::size_t>& idx) {
  std::vector<Recording> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(recs[i]);
  return out;
}

SensorModel train_learner(const LearnerSpec& learner, const FeatureSet& data, Target target,
                          bool regression) {
  if (regression) {
    if (learner.kind == LearnerKind::LinearSvc) {
      throw WrongTargetType("linear SVC cannot train a regression target");
    }
    return knn_train(data, target, learner.k, learner.metric, KnnMode::Regress);
  }
  if (learner.kind == LearnerKind::LinearSvc) return svc_train(data, target, learner.c);
  return knn_train(data, target, learner.k, learner.metric, KnnMode::Classify);
}

std::string learner_name(const LearnerSpec& learner, bool regression) {
  if (learner.kind == LearnerKind::LinearSvc && !regression) {
    return "svc C=" + fmt(learner.c);
  }
  std::string base = regression ? "knn_regressor" : "knn";
  return base + " k=" + std::to_string(learner.k) + " " + to_string(learner.metric);
}

}  // namespace

std::string to_string(SenseMode mode) {
  switch (mode) {
    case SenseMode::Passive: return "passive";
    case SenseMode::Dynamic: return "dynamic";
    case SenseMode::Active: return "active";
  }
  return "unknown";
}

SenseMode sense_mode_from_string(const std::string& name) {
  if (name == "passive") return SenseMode::Passive;
  if (name == "dynamic") return SenseMode::Dynamic;
  if (name == "active") return SenseMode::Active;
  throw InvalidSpec("unknown sensing mode '" + name + "'");
}

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "# " << task << " [" << learner << "]\n";
  os << "n_test " << n_test << "\n";
  if (acr) os << "acr " << fmt6(*acr) << "\n";
  if (rmse) os << "rmse " << fmt6(*rmse) << "\n";
  if (!classes.empty()) {
    os << "per-class recall:\n";
    for (std::size_t i = 0; i < classes.size(); ++i) {
      os << "  " << classes[i].to_string() << " " << fmt6(confusion[i][i]) << " ("
         << per_class_counts[i] << ")\n";
    }
    os << "confusion (rows = true class):\n";
    for (std::size_t i = 0; i < classes.size(); ++i) {
      os << "  " << classes[i].to_string() << ":";
      for (double v : confusion[i]) os << " " << fmt6(v);
      os << "\n";
    }
  }
  return os.str();
}

std::string EvalReport::to_json_string() const {
  ordered_json j;
  j["task"] = task;
  j["learner"] = learner;
  j["n_test"] = n_test;
  if (acr) j["acr"] = *acr; else j["acr"] = nullptr;
  if (rmse) j["rmse"] = *rmse; else j["rmse"] = nullptr;
  ordered_json cls = ordered_json::array();
  for (const Label& c : classes) {
    if (c.is_number()) cls.push_back(c.number()); else cls.push_back(c.category());
  }
  j["classes"] = cls;
  j["per_class_counts"] = per_class_counts;
  j["confusion"] = confusion;
  return j.dump(2) + "\n";
}

std::string AblationResult::to_csv() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) os << ",";
    os << columns[i];
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      if (std::holds_alternative<double>(row[i])) {
        os << fmt(std::get<double>(row[i]));
      } else {
        os << std::get<std::string>(row[i]);
      }
    }
    os << "\n";
  }
  return os.str();
}

double AblationResult::num(std::size_t row, const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return std::get<double>(rows.at(row).at(i));
  }
  throw MissingTarget("no ablation column '" + column + "'");
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    const std::vector<Label>& strata, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidSpec("split ratio must be in (0, 1)");
  std::map<Label, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);

  std::vector<std::size_t> train, test;
  std::size_t gi = 0;
  for (auto& [label, idx] : groups) {
    if (idx.size() < 2) {
      throw ClassTooSmall("class '" + label.to_string() + "' has fewer than 2 samples");
    }
    Rng rng(combine_seed(seed, gi++));
    rng.shuffle(idx);
    auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      (j < n_train ? train : test).push_back(idx[j]);
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

std::pair<FeatureSet, FeatureSet> stratified_split(const FeatureSet& data,
                                                   const std::vector<Label>& strata,
                                                   double ratio, std::uint64_t seed) {
  auto [train_idx, test_idx] = split_indices(strata, ratio, seed);
  FeatureSet train, test;
  for (std::size_t i : train_idx) {
    train.features.push_back(data.features[i]);
    train.labels.push_back(data.labels[i]);
  }
  for (std::size_t i : test_idx) {
    test.features.push_back(data.features[i]);
    test.labels.push_back(data.labels[i]);
  }
  return {std::move(train), std::move(test)};
}

std::pair<FeatureSet, FeatureSet> stratified_split(const FeatureSet& data, Target target,
                                                   double ratio, std::uint64_t seed) {
  std::vector<Label> strata;
  strata.reserve(data.size());
  for (const SampleLabels& l : data.labels) strata.push_back(label_of(l, target));
  return stratified_split(data, strata, ratio, seed);
}

EvalReport evaluate(const SensorModel& model, const FeatureSet& test) {
  if (test.size() == 0) throw EmptyData("evaluate needs at least one test sample");
  EvalReport report;
  report.n_test = test.size();

  if (model.is_classifier()) {
    std::vector<Label> truth, pred;
    truth.reserve(test.size());
    pred.reserve(test.size());
    std::set<Label> class_set;
    for (std::size_t i = 0; i < test.size(); ++i) {
      truth.push_back(label_of(test.labels[i], model.target()));
      pred.push_back(model.predict_label(test.features[i]));
      class_set.insert(truth.back());
      class_set.insert(pred.back());
    }
    report.classes.assign(class_set.begin(), class_set.end());
    const std::size_t nc = report.classes.size();
    std::map<Label, std::size_t> index;
    for (std::size_t i = 0; i < nc; ++i) index[report.classes[i]] = i;

    std::vector<std::vector<double>> counts(nc, std::vector<double>(nc, 0.0));
    report.per_class_counts.assign(nc, 0);
    for (std::size_t i = 0; i < test.size(); ++i) {
      std::size_t t = index[truth[i]];
      counts[t][index[pred[i]]] += 1.0;
      report.per_class_counts[t] += 1;
    }
    report.confusion = counts;
    double recall_sum = 0.0;
    std::size_t populated = 0;
    for (std::size_t i = 0; i < nc; ++i) {
      if (report.per_class_counts[i] == 0) continue;
      const double total = static_cast<double>(report.per_class_counts[i]);
      for (double& v : report.confusion[i]) v /= total;
      recall_sum += report.confusion[i][i];
      ++populated;
    }
    report.acr = recall_sum / static_cast<double>(populated);
    return report;
  }

  double se = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    double truth;
    try {
      truth = numeric_of(test.labels[i], model.target());
    } catch (const WrongTargetType& e) {
      throw MissingTarget(std::string("no numeric truth for regression target: ") + e.what());
    }
    const double err = model.predict_value(test.features[i]) - truth;
    se += err * err;
  }
  report.rmse = std::sqrt(se / static_cast<double>(test.size()));
  return report;
}

double snr_estimate(const Recording& active, const Recording& passive) {
  if (active.waveform.sample_rate_hz != passive.waveform.sample_rate_hz) {
    throw RateMismatch("active and passive recordings have different sample rates");
  }
  if (active.waveform.size() == 0 || passive.waveform.size() == 0) {
    throw TooShort("snr_estimate needs non-empty recordings");
  }
  const std::size_t n = std::min(active.waveform.size(), passive.waveform.size());
  double pa = 0.0, pp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pa += active.waveform.samples[i] * active.waveform.samples[i];
    pp += passive.waveform.samples[i] * passive.waveform.samples[i];
  }
  if (pp == 0.0) return std::numeric_limits<double>::infinity();
  return db_from_power(pa / pp);
}

FeatureSet with_shuffled_labels(const FeatureSet& data, std::uint64_t seed) {
  FeatureSet out = data;
  std::vector<std::size_t> order(out.labels.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(combine_seed(seed, kShuffleLabelTag));
  rng.shuffle(order);
  for (std::size_t i = 0; i < order.size(); ++i) out.labels[i] = data.labels[order[i]];
  return out;
}

ActuatorModel ExperimentConfig::resolve_model() const {
  ActuatorModel m = model ? *model : default_model(actuator_id, model_seed);
  if (insulation_db) m.insulation_db = *insulation_db;
  return m;
}

SoundSpec ExperimentConfig::resolve_stimulus(const std::string& task_name) const {
  if (stimulus) return *stimulus;
  SoundSpec spec;
  spec.seed = 7;
  spec.volume = 1.0;
  if (task_name == "location6" || task_name == "regression30") {
    spec.kind = SoundKind::LogSweep;
    spec.duration_s = 1.0;
  } else if (task_name == "temperature") {
    spec.kind = SoundKind::WhiteNoise;
    spec.duration_s = 1.0;
  } else {
    spec.kind = SoundKind::WhiteNoise;
    spec.duration_s = 0.02;
  }
  return spec;
}

namespace {

std::vector<ActuatorState> contact_states(const std::vector<std::string>& locations,
                                          double force_n = 1.0,
                                          const std::string& material = "wood") {
  std::vector<ActuatorState> states;
  states.reserve(locations.size());
  for (const std::string& loc : locations) {
    states.push_back(ActuatorState::at(loc, force_n, material));
  }
  return states;
}

const std::vector<std::string> kSixLocations = {"base", "middle", "tip", "left", "right", "top"};
const std::vector<std::string> kSevenLocations = {"base",  "middle", "tip", "left",
                                                  "right", "top",    "none"};

Stimulus make_stimulus(const SoundSpec& spec, SenseMode mode) {
  switch (mode) {
    case SenseMode::Active: return Stimulus::active(spec);
    case SenseMode::Passive: return Stimulus::passive(spec.duration_s);
    case SenseMode::Dynamic: return Stimulus::dynamic_tap(spec.duration_s);
  }
  throw InvalidSpec("unhandled sensing mode");
}

struct TaskPlan {
  std::vector<ActuatorState> states;
  int repeats = 25;
  Target target = Target::Location;
  bool regression = false;
};

TaskPlan task_plan(const ExperimentConfig& cfg, const std::string& task) {
  TaskPlan plan;
  plan.repeats = cfg.repeats;
  if (task == "location6") {
    plan.states = contact_states(kSixLocations);
    return plan;
  }
  if (task == "location7") {
    plan.states = contact_states(kSevenLocations);
    return plan;
  }
  if (task == "regression30") {
    // 30 marks along the palmar side, 3 mm apart, 5 recordings each.
    for (int i = 0; i < 30; ++i) plan.states.push_back(ActuatorState::at_mm(3.0 * i));
    plan.repeats = 5;
    plan.regression = true;
    return plan;
  }
  if (task == "force3") {
    // Three forces, contact made from three sides of the middle mark; the
    // side is a nuisance factor realized as a small position offset.
    for (double force : {0.5, 1.5, 3.0}) {
      for (double offset : {-4.0, 0.0, 4.0}) {
        plan.states.push_back(ActuatorState::at_mm(45.0 + offset, force));
      }
    }
    plan.target = Target::Force;
    return plan;
  }
  if (task == "material3") {
    // Hand-placed contacts vary between repeats: placement force, ambient
    // temperature, inflation, and the recording-session hum all jitter, so
    // material must be read from the spectral tilt rather than from
    // memorized peak positions.
    Rng rng(combine_seed(cfg.seed, kJitterTag));
    const int n_profiles = static_cast<int>(cfg.resolve_model().pose_noise_profiles.size());
    for (const char* material : {"wood", "silicone", "aluminum"}) {
      for (const std::string& loc : kSixLocations) {
        for (int rep = 0; rep < cfg.repeats; ++rep) {
          ActuatorState s = ActuatorState::at(loc, 1.0 + 0.6 * rng.uniform_signed(), material);
          s.temperature_c = 20.0 + 6.0 * rng.uniform_signed();
          s.inflation_kpa = 15.0 + 14.0 * rng.uniform_signed();
          s.pose_id = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(n_profiles)));
          plan.states.push_back(s);
        }
      }
    }
    plan.repeats = 1;
    plan.target = Target::Material;
    return plan;
  }
  if (task == "temperature") {
    for (int i = 0; i < 50; ++i) {
      ActuatorState s;
      s.temperature_c = 20.0 + 75.0 * static_cast<double>(i) / 49.0;
      plan.states.push_back(s);
    }
    plan.repeats = 5;
    plan.target = Target::Temperature;
    plan.regression = true;
    return plan;
  }
  if (task == "simultaneous700") {
    for (const std::string& loc : kSevenLocations) {
      for (double force : {1.0, 3.0}) {
        for (double inflation : {0.0, 30.0}) {
          ActuatorState s = ActuatorState::at(loc, force);
          s.inflation_kpa = inflation;
          plan.states.push_back(s);
        }
      }
    }
    return plan;
  }
  throw InvalidSpec("unknown task '" + task + "'");
}

std::vector<Label> strata_for(const FeatureSet& data, const std::string& task, Target target) {
  std::vector<Label> strata;
  strata.reserve(data.size());
  if (task == "simultaneous700") {
    // Composite stratum keeps every (location, force, inflation) condition
    // balanced, which stratifies all three targets at once.
    for (const SampleLabels& l : data.labels) {
      strata.push_back(Label::category(l.location.to_string() + "|" +
                                       Label::number(l.force_n).to_string() + "|" +
                                       Label::number(l.inflation_kpa).to_string()));
    }
    return strata;
  }
  for (const SampleLabels& l : data.labels) strata.push_back(label_of(l, target));
  return strata;
}

EvalReport run_single_model_task(const ExperimentConfig& cfg, const std::string& task,
                                 SenseMode mode) {
  TaskPlan plan = task_plan(cfg, task);
  FeatureSet data = build_dataset(cfg, task, mode);
  auto [train, test] =
      stratified_split(data, strata_for(data, task, plan.target), cfg.split_ratio,
                       combine_seed(cfg.seed, kSplitTag));
  SensorModel model = train_learner(cfg.learner, train, plan.target, plan.regression);
  EvalReport report = evaluate(model, test);
  report.task = task + " (" + to_string(mode) + ")";
  report.learner = learner_name(cfg.learner, plan.regression);
  return report;
}

}  // namespace

std::vector<Recording> build_recordings(const ExperimentConfig& cfg, const std::string& task,
                                        SenseMode mode) {
  TaskPlan plan = task_plan(cfg, task);
  ActuatorModel model = cfg.resolve_model();
  Stimulus stim = make_stimulus(cfg.resolve_stimulus(task), mode);
  return sample_dataset(model, plan.states, stim, plan.repeats,
                        combine_seed(cfg.seed, kDatasetTag, hash_string(task)), cfg.jobs);
}

FeatureSet build_dataset(const ExperimentConfig& cfg, const std::string& task, SenseMode mode) {
  return featurize(build_recordings(cfg, task, mode));
}

EvalReport run_location_experiment(const ExperimentConfig& cfg, SenseMode mode) {
  return run_single_model_task(cfg, "location6", mode);
}

EvalReport run_regression_experiment(const ExperimentConfig& cfg, SenseMode mode) {
  return run_single_model_task(cfg, "regression30", mode);
}

EvalReport run_force_experiment(const ExperimentConfig& cfg) {
  return run_single_model_task(cfg, "force3", SenseMode::Active);
}

EvalReport run_material_experiment(const ExperimentConfig& cfg) {
  return run_single_model_task(cfg, "material3", SenseMode::Active);
}

EvalReport run_temperature_experiment(const ExperimentConfig& cfg, SenseMode mode) {
  return run_single_model_task(cfg, "temperature", mode);
}

SimultaneousReports run_simultaneous_experiment(const ExperimentConfig& cfg) {
  FeatureSet data = build_dataset(cfg, "simultaneous700", SenseMode::Active);
  auto [train, test] =
      stratified_split(data, strata_for(data, "simultaneous700", Target::Location),
                       cfg.split_ratio, combine_seed(cfg.seed, kSplitTag));

  SimultaneousReports out;
  const std::array<std::pair<Target, EvalReport*>, 3> jobs = {
      {{Target::Location, &out.location}, {Target::Force, &out.force},
       {Target::Inflation, &out.inflation}}};
  for (const auto& [target, slot] : jobs) {
    SensorModel model = train_learner(cfg.learner, train, target, false);
    *slot = evaluate(model, test);
    slot->task = "simultaneous700/" + to_string(target);
    slot->learner = learner_name(cfg.learner, false);
  }
  return out;
}

AblationResult run_noise_robustness(const ExperimentConfig& cfg,
                                    const std::vector<double>& levels_db) {
  AblationResult result;
  result.columns = {"level_db", "acr", "snr_db"};
  if (levels_db.empty()) return result;

  ActuatorModel model = cfg.resolve_model();
  SoundSpec spec = cfg.resolve_stimulus("noise");
  Stimulus stim = Stimulus::active(spec);
  std::vector<ActuatorState> states = contact_states(kSixLocations);
  std::vector<Recording> recs = sample_dataset(model, states, stim, cfg.repeats,
                                               combine_seed(cfg.seed, kDatasetTag), cfg.jobs);

  std::vector<Label> strata;
  strata.reserve(recs.size());
  for (const Recording& r : recs) strata.push_back(r.state.contact_location);
  auto [train_idx, test_idx] = split_indices(strata, cfg.split_ratio,
                                             combine_seed(cfg.seed, kSplitTag));

  std::size_t trim_len = recs.front().waveform.size();
  for (const Recording& r : recs) trim_len = std::min(trim_len, r.waveform.size());
  FeatureSet train = featurize(select(recs, train_idx), trim_len);
  SensorModel sensor = train_learner(cfg.learner, train, Target::Location, false);

  for (double level : levels_db) {
    std::vector<Recording> noisy;
    noisy.reserve(test_idx.size());
    std::vector<double> snrs;
    for (std::size_t i : test_idx) {
      const Recording& r = recs[i];
      SoundSpec ext_spec;
      ext_spec.kind = SoundKind::WhiteNoise;
      ext_spec.duration_s = spec.duration_s;
      ext_spec.sample_rate_hz = model.sample_rate_hz;
      ext_spec.volume = 1.0;
      ext_spec.seed = combine_seed(r.noise_seed, kExternalTag);
      ExternalSound ext{synthesize(ext_spec), level};
      noisy.push_back(modulate(model, r.state, stim, ext, r.noise_seed));
      Recording passive = modulate(model, r.state, Stimulus::passive(spec.duration_s), ext,
                                   r.noise_seed);
      snrs.push_back(snr_estimate(noisy.back(), passive));
    }
    FeatureSet test = featurize(noisy, trim_len);
    EvalReport report = evaluate(sensor, test);
    result.rows.push_back({level, *report.acr, mean_of(snrs)});
  }
  return result;
}

AblationResult run_pose_transfer(const ExperimentConfig& cfg) {
  ActuatorModel model = cfg.resolve_model();
  if (static_cast<std::size_t>(cfg.n_poses) > model.pose_noise_profiles.size()) {
    throw InvalidState("n_poses exceeds the model's pose noise profiles");
  }
  SoundSpec spec = cfg.resolve_stimulus("pose");
  Stimulus stim = Stimulus::active(spec);

  const std::size_t n_poses = static_cast<std::size_t>(cfg.n_poses);
  std::vector<FeatureSet> train_parts(n_poses), test_parts(n_poses);
  for (std::size_t p = 0; p < n_poses; ++p) {
    std::vector<ActuatorState> states = contact_states(kSevenLocations);
    for (ActuatorState& s : states) s.pose_id = static_cast<int>(p + 1);
    std::vector<Recording> recs = sample_dataset(model, states, stim, cfg.repeats,
                                                 combine_seed(cfg.seed, kPoseTag, p), cfg.jobs);
    FeatureSet fs = featurize(recs);
    auto [train, test] = stratified_split(fs, Target::Location, cfg.split_ratio,
                                          combine_seed(cfg.seed, kSplitTag, p));
    train_parts[p] = std::move(train);
    test_parts[p] = std::move(test);
  }

  AblationResult result;
  result.columns = {"combo_size", "n_combos", "same_acr", "same_se",
                    "transfer_acr", "transfer_se"};
  for (int m : cfg.combo_sizes) {
    std::vector<double> same_scores, transfer_scores;
    for_each_combination(n_poses, static_cast<std::size_t>(m),
                         [&](const std::vector<std::size_t>& combo) {
      std::vector<bool> in_combo(n_poses, false);
      std::vector<const FeatureSet*> train_sel, same_sel, transfer_sel;
      for (std::size_t p : combo) in_combo[p] = true;
      for (std::size_t p = 0; p < n_poses; ++p) {
        if (in_combo[p]) {
          train_sel.push_back(&train_parts[p]);
          same_sel.push_back(&test_parts[p]);
        } else {
          transfer_sel.push_back(&test_parts[p]);
        }
      }
      FeatureSet train = concat(train_sel);
      SensorModel sensor = train_learner(cfg.learner, train, Target::Location, false);
      same_scores.push_back(*evaluate(sensor, concat(same_sel)).acr);
      if (!transfer_sel.empty()) {
        transfer_scores.push_back(*evaluate(sensor, concat(transfer_sel)).acr);
      }
    });
    result.rows.push_back({static_cast<double>(m), static_cast<double>(same_scores.size()),
                           mean_of(same_scores), std_error(same_scores),
                           mean_of(transfer_scores), std_error(transfer_scores)});
  }
  return result;
}

AblationResult run_sound_ablation(const ExperimentConfig& cfg) {
  ActuatorModel model = cfg.resolve_model();
  std::vector<ActuatorState> states = contact_states(kSevenLocations);

  AblationResult result;
  result.columns = {"kind", "duration_s", "acr"};
  std::size_t cell = 0;
  for (SoundKind kind : cfg.ablation_kinds) {
    for (double duration : cfg.ablation_durations_s) {
      SoundSpec spec = cfg.resolve_stimulus("sound-grid");
      spec.kind = kind;
      spec.duration_s = duration;
      std::vector<Recording> recs =
          sample_dataset(model, states, Stimulus::active(spec), cfg.repeats,
                         combine_seed(cfg.seed, kCellTag, cell), cfg.jobs);
      FeatureSet data = featurize(recs);
      auto [train, test] = stratified_split(data, Target::Location, cfg.split_ratio,
                                            combine_seed(cfg.seed, kSplitTag, cell));
      SensorModel sensor = train_learner(cfg.learner, train, Target::Location, false);
      result.rows.push_back({to_string(kind), duration, *evaluate(sensor, test).acr});
      ++cell;
    }
  }
  return result;
}

AblationResult run_volume_ablation(const ExperimentConfig& cfg,
                                   const std::vector<double>& fractions) {
  ActuatorModel model = cfg.resolve_model();
  std::vector<ActuatorState> states = contact_states(kSixLocations);

  AblationResult result;
  result.columns = {"fraction", "acr"};
  std::size_t cell = 0;
  for (double fraction : fractions) {
    SoundSpec spec = cfg.resolve_stimulus("volume");
    Stimulus stim = Stimulus::passive(spec.duration_s);
    if (fraction > 0.0) {
      spec.volume = fraction;
      stim = Stimulus::active(spec);
    }
    std::vector<Recording> recs = sample_dataset(model, states, stim, cfg.repeats,
                                                 combine_seed(cfg.seed, kCellTag, cell), cfg.jobs);
    FeatureSet data = featurize(recs);
    auto [train, test] = stratified_split(data, Target::Location, cfg.split_ratio,
                                          combine_seed(cfg.seed, kSplitTag, cell));
    SensorModel sensor = train_learner(cfg.learner, train, Target::Location, false);
    result.rows.push_back({fraction, *evaluate(sensor, test).acr});
    ++cell;
  }
  return result;
}

AblationResult run_actuator_transfer(const ExperimentConfig& cfg) {
  SoundSpec spec = cfg.resolve_stimulus("transfer");
  Stimulus stim = Stimulus::active(spec);
  const std::vector<std::string> classes = {"tip", "middle", "base", "none"};

  const std::size_t n_ids = cfg.actuator_ids.size();
  std::vector<FeatureSet> train_parts(n_ids), test_parts(n_ids);
  for (std::size_t a = 0; a < n_ids; ++a) {
    ActuatorModel model = default_model(cfg.actuator_ids[a], cfg.model_seed);
    if (cfg.insulation_db) model.insulation_db = *cfg.insulation_db;
    std::vector<Recording> recs =
        sample_dataset(model, contact_states(classes), stim, cfg.repeats,
                       combine_seed(cfg.seed, kDatasetTag, hash_string(cfg.actuator_ids[a])),
                       cfg.jobs);
    FeatureSet fs = featurize(recs);
    auto [train, test] = stratified_split(fs, Target::Location, cfg.split_ratio,
                                          combine_seed(cfg.seed, kSplitTag, a));
    train_parts[a] = std::move(train);
    test_parts[a] = std::move(test);
  }

  AblationResult result;
  result.columns = {"combo_size", "n_combos", "same_acr", "cross_acr"};
  for (int m : cfg.combo_sizes) {
    if (static_cast<std::size_t>(m) > n_ids) continue;
    std::vector<double> same_scores, cross_scores;
    for_each_combination(n_ids, static_cast<std::size_t>(m),
                         [&](const std::vector<std::size_t>& combo) {
      std::vector<bool> in_combo(n_ids, false);
      for (std::size_t a : combo) in_combo[a] = true;
      std::vector<const FeatureSet*> train_sel, same_sel, cross_sel;
      for (std::size_t a = 0; a < n_ids; ++a) {
        if (in_combo[a]) {
          train_sel.push_back(&train_parts[a]);
          same_sel.push_back(&test_parts[a]);
        } else {
          cross_sel.push_back(&test_parts[a]);
        }
      }
      FeatureSet train = concat(train_sel);
      SensorModel sensor = train_learner(cfg.learner, train, Target::Location, false);
      same_scores.push_back(*evaluate(sensor, concat(same_sel)).acr);
      if (!cross_sel.empty()) {
        cross_scores.push_back(*evaluate(sensor, concat(cross_sel)).acr);
      }
    });
    result.rows.push_back({static_cast<double>(m), static_cast<double>(same_scores.size()),
                           mean_of(same_scores), mean_of(cross_scores)});
  }
  return result;
}

}  // namespace asense
