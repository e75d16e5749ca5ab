#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "asense/actuator.hpp"
#include "asense/features.hpp"
#include "asense/models.hpp"

namespace asense {

/// Test-set performance of one sensor model. Classification reports carry a
/// per-true-class normalized confusion matrix and the ACR (mean per-class
/// recall); regression reports carry the RMSE in target units.
struct EvalReport {
  std::string task;
  std::string learner;
  std::vector<Label> classes;                  // row/column order of `confusion`
  std::vector<std::vector<double>> confusion;  // rows normalized per true class
  std::vector<std::size_t> per_class_counts;
  std::optional<double> acr;
  std::optional<double> rmse;
  std::size_t n_test = 0;

  std::string to_text() const;
  std::string to_json_string() const;
};

/// One grid of scores from an ablation run; rows are grid cells.
struct AblationResult {
  using Cell = std::variant<double, std::string>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string to_csv() const;
  double num(std::size_t row, const std::string& column) const;
};

/// Per-stratum split of indices: round(ratio * n) to the first set (at least
/// one element on each side), seeded shuffle within each stratum.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    const std::vector<Label>& strata, double ratio, std::uint64_t seed);

std::pair<FeatureSet, FeatureSet> stratified_split(const FeatureSet& data, Target target,
                                                   double ratio, std::uint64_t seed);

/// Stratified by an explicit per-sample stratum label (e.g. a composite of
/// several state fields).
std::pair<FeatureSet, FeatureSet> stratified_split(const FeatureSet& data,
                                                   const std::vector<Label>& strata,
                                                   double ratio, std::uint64_t seed);

EvalReport evaluate(const SensorModel& model, const FeatureSet& test);

/// 10*log10(P_active / P_passive) over the common trimmed length; +infinity
/// when the passive power is zero.
double snr_estimate(const Recording& active, const Recording& passive);

/// Copy of `data` with the label rows permuted (chance-level control).
FeatureSet with_shuffled_labels(const FeatureSet& data, std::uint64_t seed);

enum class SenseMode { Passive, Dynamic, Active };

std::string to_string(SenseMode mode);
SenseMode sense_mode_from_string(const std::string& name);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::KnnClassifier;
  int k = 5;
  Metric metric = Metric::L2;
  double c = 100.0;
};

/// Everything an experiment run needs; a config plus a seed reproduces every
/// output byte for byte.
struct ExperimentConfig {
  std::string task = "location6";
  std::uint64_t seed = 0;
  std::string actuator_id = "A";
  std::uint64_t model_seed = 1;
  std::optional<ActuatorModel> model;     // overrides default_model(actuator_id, model_seed)
  std::optional<SoundSpec> stimulus;      // task default when unset
  SenseMode mode = SenseMode::Active;
  LearnerSpec learner;
  double split_ratio = 0.6;
  int repeats = 25;
  int jobs = 1;
  std::string out_dir;

  std::optional<double> insulation_db;    // override for noise ablation
  std::vector<double> levels_db = {50.0, 70.0, 90.0};
  std::vector<double> volume_fractions = {1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 0.0};
  int n_poses = 6;
  std::vector<int> combo_sizes = {1, 2, 3, 4};
  std::vector<std::string> actuator_ids = {"A", "B", "C", "D", "E"};
  std::vector<SoundKind> ablation_kinds = {SoundKind::LogSweep, SoundKind::WhiteNoise,
                                           SoundKind::BandNoise, SoundKind::Sine};
  std::vector<double> ablation_durations_s = {0.005, 0.02, 0.05, 0.5, 1.0};

  ActuatorModel resolve_model() const;
  SoundSpec resolve_stimulus(const std::string& task_name) const;
};

/// Labeled recordings for one named task (pre-split); used by the runners,
/// the CLI `simulate` subcommand, and the acceptance suite.
std::vector<Recording> build_recordings(const ExperimentConfig& cfg, const std::string& task,
                                        SenseMode mode);
FeatureSet build_dataset(const ExperimentConfig& cfg, const std::string& task, SenseMode mode);

EvalReport run_location_experiment(const ExperimentConfig& cfg, SenseMode mode);
EvalReport run_regression_experiment(const ExperimentConfig& cfg, SenseMode mode);
EvalReport run_force_experiment(const ExperimentConfig& cfg);
EvalReport run_material_experiment(const ExperimentConfig& cfg);
EvalReport run_temperature_experiment(const ExperimentConfig& cfg, SenseMode mode);

struct SimultaneousReports {
  EvalReport location;
  EvalReport force;
  EvalReport inflation;
};
SimultaneousReports run_simultaneous_experiment(const ExperimentConfig& cfg);

/// Trains on quiet data, evaluates on test recordings regenerated with
/// external white noise at each level. Columns: level_db, acr, snr_db.
AblationResult run_noise_robustness(const ExperimentConfig& cfg,
                                    const std::vector<double>& levels_db);

/// Columns: combo_size, n_combos, same_acr, same_se, transfer_acr, transfer_se.
AblationResult run_pose_transfer(const ExperimentConfig& cfg);

/// Columns: kind, duration_s, acr.
AblationResult run_sound_ablation(const ExperimentConfig& cfg);

/// Columns: fraction, acr. Fraction 0 runs as passive sensing.
AblationResult run_volume_ablation(const ExperimentConfig& cfg,
                                   const std::vector<double>& fractions);

/// Columns: combo_size, n_combos, same_acr, cross_acr.
AblationResult run_actuator_transfer(const ExperimentConfig& cfg);

}  // namespace asense
