#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "asense/features.hpp"
#include "asense/label.hpp"

namespace asense {

enum class Metric { L1, L2 };
enum class KnnMode { Classify, Regress };
enum class LearnerKind { KnnClassifier, KnnRegressor, LinearSvc };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& name);
std::string to_string(LearnerKind k);
LearnerKind learner_kind_from_string(const std::string& name);

/// Memorized training set. Prediction is majority vote (classify) or
/// unweighted mean (regress) over the k nearest stored vectors. Vote ties
/// break by smallest summed distance, then by label order; boundary ties in
/// the neighbor set break by training index.
struct KnnModel {
  KnnMode mode = KnnMode::Classify;
  int k = 5;
  Metric metric = Metric::L2;
  Target target = Target::Location;
  std::size_t dim = 0;
  std::vector<double> train_x;   // row-major, size() = n * dim
  std::vector<Label> class_targets;   // classify
  std::vector<double> value_targets;  // regress

  std::size_t train_size() const { return dim == 0 ? 0 : train_x.size() / dim; }
};

/// One-vs-rest linear classifiers minimizing
///   0.5*||w||^2 + C * sum_i max(0, 1 - y_i*(w.x_i + b)).
struct SvcModel {
  double c = 100.0;
  Target target = Target::Location;
  std::size_t dim = 0;
  std::vector<Label> classes;      // sorted
  std::vector<double> weights;     // classes.size() * dim, row-major
  std::vector<double> bias;        // per class
  std::vector<std::vector<double>> loss_traces;  // per class, per accepted epoch
  bool converged = true;
  int epochs_used = 0;
};

/// Interface for plugging in third-party predictors (none ship here).
class CustomPredictor {
public:
  virtual ~CustomPredictor() = default;
  virtual Label predict_label(const std::vector<double>& x) const = 0;
  virtual double predict_value(const std::vector<double>& x) const = 0;
  virtual bool is_classifier() const = 0;
  virtual Target target() const = 0;
  virtual std::size_t feature_dim() const = 0;
};

/// Trained sensor model: maps a spectrum feature vector to a measurement.
class SensorModel {
public:
  SensorModel() = default;
  explicit SensorModel(KnnModel m) : impl_(std::move(m)) {}
  explicit SensorModel(SvcModel m) : impl_(std::move(m)) {}
  explicit SensorModel(std::shared_ptr<CustomPredictor> m) : impl_(std::move(m)) {}

  LearnerKind kind() const;
  bool is_classifier() const;
  Target target() const;
  std::size_t feature_dim() const;

  Label predict_label(const std::vector<double>& x) const;
  double predict_value(const std::vector<double>& x) const;
  Label predict_label(const SpectrumFeature& f) const { return predict_label(f.amplitudes); }
  double predict_value(const SpectrumFeature& f) const { return predict_value(f.amplitudes); }

  const KnnModel* knn() const { return std::get_if<KnnModel>(&impl_); }
  const SvcModel* svc() const { return std::get_if<SvcModel>(&impl_); }

private:
  std::variant<KnnModel, SvcModel, std::shared_ptr<CustomPredictor>> impl_;
};

struct SvcOptions {
  double tolerance = 1e-3;  // relative objective progress defining convergence
  int max_epochs = 400;
};

SensorModel knn_train(const FeatureSet& data, Target target, int k = 5,
                      Metric metric = Metric::L2, KnnMode mode = KnnMode::Classify);

SensorModel svc_train(const FeatureSet& data, Target target, double c = 100.0,
                      const SvcOptions& options = {});

/// Hyperparameter lists searched by grid_search. Points are enumerated in
/// declaration order (outer loop over the first list).
struct ParamGrid {
  LearnerKind kind = LearnerKind::KnnClassifier;
  std::vector<int> ks = {1, 2, 3, 5, 10};
  std::vector<Metric> metrics = {Metric::L1, Metric::L2};
  std::vector<double> cs;  // LinearSvc

  static ParamGrid knn() { return {}; }
  static ParamGrid svc(std::vector<double> c_values);
};

struct GridPoint {
  LearnerKind kind = LearnerKind::KnnClassifier;
  int k = 5;
  Metric metric = Metric::L2;
  double c = 100.0;

  std::string describe() const;
  SensorModel train(const FeatureSet& data, Target target) const;
};

struct GridSearchResult {
  GridPoint best;
  double best_score = 0.0;
  std::vector<std::pair<GridPoint, double>> table;  // grid order, mean CV ACR
};

/// Stratified k-fold cross validation over every grid point; score is mean
/// ACR across folds. Ties keep the earlier grid point. Deterministic given
/// the shuffle seed; `jobs` bounds parallel evaluation of grid points.
GridSearchResult grid_search(const FeatureSet& data, Target target, const ParamGrid& grid,
                             int folds = 5, std::uint64_t seed = 0, int jobs = 1);

}  // namespace asense
