#include "asense/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "asense/errors.hpp"
#include "asense/parallel.hpp"
#include "asense/rng.hpp"

namespace asense {

namespace {

double distance(const double* a, const double* b, std::size_t dim, Metric metric) {
  double acc = 0.0;
  if (metric == Metric::L2) {
    for (std::size_t i = 0; i < dim; ++i) {
      double d = a[i] - b[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  for (std::size_t i = 0; i < dim; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

// k nearest training rows as (distance, index), sorted by (distance, index).
std::vector<std::pair<double, std::size_t>> nearest(const KnnModel& m,
                                                    const std::vector<double>& x) {
  if (x.size() != m.dim) throw DimMismatch("query dimension differs from training dimension");
  const std::size_t n = m.train_size();
  std::vector<std::pair<double, std::size_t>> dists(n);
  for (std::size_t i = 0; i < n; ++i) {
    dists[i] = {distance(m.train_x.data() + i * m.dim, x.data(), m.dim, m.metric), i};
  }
  const std::size_t k = static_cast<std::size_t>(m.k);
  std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
  dists.resize(k);
  return dists;
}

Label knn_vote(const KnnModel& m, const std::vector<double>& x) {
  auto nn = nearest(m, x);
  std::map<Label, std::pair<int, double>> votes;  // label -> (count, summed distance)
  for (const auto& [d, idx] : nn) {
    auto& v = votes[m.class_targets[idx]];
    v.first += 1;
    v.second += d;
  }
  // Majority; ties by smallest summed distance, then label order. std::map
  // iterates labels in order, so keeping strict improvements realizes the
  // final tie-break.
  const Label* best = nullptr;
  int best_count = -1;
  double best_sum = 0.0;
  for (const auto& [label, v] : votes) {
    if (v.first > best_count || (v.first == best_count && v.second < best_sum)) {
      best = &label;
      best_count = v.first;
      best_sum = v.second;
    }
  }
  return *best;
}

double knn_mean(const KnnModel& m, const std::vector<double>& x) {
  auto nn = nearest(m, x);
  double acc = 0.0;
  for (const auto& [d, idx] : nn) acc += m.value_targets[idx];
  return acc / static_cast<double>(nn.size());
}

struct SvcProblem {
  const std::vector<double>& x;  // n * dim
  std::vector<double> y;         // +-1
  std::size_t n;
  std::size_t dim;
  double c;
};

double svc_objective(const SvcProblem& p, const std::vector<double>& w, double b) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const double* xi = p.x.data() + i * p.dim;
    double s = b;
    for (std::size_t j = 0; j < p.dim; ++j) s += w[j] * xi[j];
    hinge += std::max(0.0, 1.0 - p.y[i] * s);
  }
  return 0.5 * reg + p.c * hinge;
}

// Exact minimizer of f(t) = 0.5*||w + t*dw||^2 + C*sum_i max(0, r_i + t*u_i)
// over t >= 0. Piecewise quadratic and convex, so walking the breakpoints of
// the hinge terms finds the minimum in one pass.
double exact_line_search(const std::vector<double>& r, const std::vector<double>& u,
                         double w_dot_d, double d_norm2, double c) {
  const std::size_t n = r.size();
  double slope_sum = 0.0;  // sum of u_i over active hinges at t -> 0+
  std::vector<std::pair<double, double>> events;  // (t, slope delta)
  events.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] == 0.0) continue;  // hinge term constant along d
    double t_i = -r[i] / u[i];
    if (u[i] > 0.0) {
      if (t_i <= 0.0) {
        slope_sum += u[i];  // already active
      } else {
        events.emplace_back(t_i, u[i]);  // activates at t_i
      }
    } else {
      if (t_i > 0.0) {
        slope_sum += u[i];               // active now,
        events.emplace_back(t_i, -u[i]);  // deactivates at t_i
      }
    }
  }
  std::sort(events.begin(), events.end());

  double t_prev = 0.0;
  std::size_t e = 0;
  while (true) {
    double seg_end = e < events.size() ? events[e].first : std::numeric_limits<double>::infinity();
    // f'(t) = w_dot_d + t*d_norm2 + C*slope_sum on [t_prev, seg_end).
    if (d_norm2 > 0.0) {
      double t_star = -(w_dot_d + c * slope_sum) / d_norm2;
      if (t_star < t_prev) return t_prev;
      if (t_star < seg_end) return t_star;
    } else {
      if (w_dot_d + c * slope_sum >= 0.0) return t_prev;
      if (e >= events.size()) return t_prev;  // cannot happen for coercive f
    }
    slope_sum += events[e].second;
    t_prev = events[e].first;
    ++e;
  }
}

// Steepest descent with exact line search. The descent direction is the
// negative of the minimum-norm subgradient: hinge terms sitting exactly on
// the margin enter the gradient with a weight in [0, 1] chosen (by a small
// box-constrained QP, solved coordinatewise) to minimize the gradient norm.
// That makes -g a genuine descent direction whenever the current point is
// not optimal, so the recorded objective trace never increases, and the
// minimum subgradient norm doubles as the convergence measure.
void svc_train_binary(const SvcProblem& p, const SvcOptions& opt, std::vector<double>& w,
                      double& b, std::vector<double>& trace, bool& converged, int& epochs) {
  w.assign(p.dim, 0.0);
  b = 0.0;
  double obj = svc_objective(p, w, b);
  trace.clear();
  trace.push_back(obj);
  converged = false;
  epochs = 0;

  constexpr double kBoundaryEps = 1e-9;
  std::vector<double> scores(p.n), grad(p.dim), q(p.n), r(p.n), u(p.n);
  double grad0_norm = -1.0;

  for (int epoch = 0; epoch < opt.max_epochs; ++epoch) {
    epochs = epoch + 1;
    for (std::size_t i = 0; i < p.n; ++i) {
      const double* xi = p.x.data() + i * p.dim;
      double s = b;
      for (std::size_t j = 0; j < p.dim; ++j) s += w[j] * xi[j];
      scores[i] = s;
      r[i] = 1.0 - p.y[i] * s;
    }

    // Fixed gradient part: regularizer plus strict margin violators.
    grad = w;
    double grad_b = 0.0;
    std::vector<std::size_t> boundary;
    for (std::size_t i = 0; i < p.n; ++i) {
      if (std::fabs(r[i]) <= kBoundaryEps) {
        boundary.push_back(i);
      } else if (r[i] > 0.0) {
        const double* xi = p.x.data() + i * p.dim;
        for (std::size_t j = 0; j < p.dim; ++j) grad[j] -= p.c * p.y[i] * xi[j];
        grad_b -= p.c * p.y[i];
      }
    }

    // Minimum-norm subgradient over the boundary weights theta in [0, 1]:
    // g(theta) = grad + sum_i theta_i * c_i with c_i = -C * y_i * x_i.
    if (!boundary.empty()) {
      std::vector<double> theta(boundary.size(), 0.0);
      for (int pass = 0; pass < 50; ++pass) {
        double max_delta = 0.0;
        for (std::size_t bi = 0; bi < boundary.size(); ++bi) {
          const std::size_t i = boundary[bi];
          const double* xi = p.x.data() + i * p.dim;
          double cg = 0.0, cc = 0.0;
          for (std::size_t j = 0; j < p.dim; ++j) {
            const double cj = -p.c * p.y[i] * xi[j];
            cg += cj * grad[j];
            cc += cj * cj;
          }
          const double cb = -p.c * p.y[i];
          cg += cb * grad_b;
          cc += cb * cb;
          if (cc == 0.0) continue;
          double next = std::clamp(theta[bi] - cg / cc, 0.0, 1.0);
          double delta = next - theta[bi];
          if (delta != 0.0) {
            for (std::size_t j = 0; j < p.dim; ++j) grad[j] += delta * (-p.c * p.y[i] * xi[j]);
            grad_b += delta * cb;
            theta[bi] = next;
            max_delta = std::max(max_delta, std::fabs(delta));
          }
        }
        if (max_delta < 1e-12) break;
      }
    }

    double grad_norm2 = grad_b * grad_b;
    for (double g : grad) grad_norm2 += g * g;
    const double grad_norm = std::sqrt(grad_norm2);
    if (grad0_norm < 0.0) grad0_norm = grad_norm;
    if (grad_norm <= opt.tolerance * std::max(1.0, grad0_norm)) {
      converged = true;
      break;
    }

    // Direction d = -grad; per-sample hinge slopes u_i along d.
    double d_norm2 = 0.0, w_dot_d = 0.0;
    for (std::size_t j = 0; j < p.dim; ++j) {
      d_norm2 += grad[j] * grad[j];
      w_dot_d -= w[j] * grad[j];
    }
    for (std::size_t i = 0; i < p.n; ++i) {
      const double* xi = p.x.data() + i * p.dim;
      double s = -grad_b;
      for (std::size_t j = 0; j < p.dim; ++j) s -= grad[j] * xi[j];
      q[i] = s;
      u[i] = -p.y[i] * q[i];
    }

    double t = exact_line_search(r, u, w_dot_d, d_norm2, p.c);
    if (!(t > 0.0)) {
      converged = true;  // no descent within line-search resolution
      break;
    }
    std::vector<double> w_new(p.dim);
    for (std::size_t j = 0; j < p.dim; ++j) w_new[j] = w[j] - t * grad[j];
    double b_new = b - t * grad_b;
    double obj_new = svc_objective(p, w_new, b_new);
    if (!(obj_new < obj)) {
      converged = true;
      break;
    }
    w = std::move(w_new);
    b = b_new;
    obj = obj_new;
    trace.push_back(obj);
  }
}

}  // namespace

std::string to_string(Metric m) { return m == Metric::L1 ? "l1" : "l2"; }

Metric metric_from_string(const std::string& name) {
  if (name == "l1" || name == "L1" || name == "manhattan") return Metric::L1;
  if (name == "l2" || name == "L2" || name == "euclidean") return Metric::L2;
  throw InvalidSpec("unknown metric '" + name + "'");
}

std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::KnnClassifier: return "knn_classifier";
    case LearnerKind::KnnRegressor: return "knn_regressor";
    case LearnerKind::LinearSvc: return "linear_svc";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "knn_classifier" || name == "knn") return LearnerKind::KnnClassifier;
  if (name == "knn_regressor") return LearnerKind::KnnRegressor;
  if (name == "linear_svc" || name == "svc") return LearnerKind::LinearSvc;
  throw InvalidSpec("unknown learner kind '" + name + "'");
}

LearnerKind SensorModel::kind() const {
  if (const KnnModel* m = knn()) {
    return m->mode == KnnMode::Classify ? LearnerKind::KnnClassifier : LearnerKind::KnnRegressor;
  }
  if (svc()) return LearnerKind::LinearSvc;
  return LearnerKind::KnnClassifier;
}

bool SensorModel::is_classifier() const {
  if (const KnnModel* m = knn()) return m->mode == KnnMode::Classify;
  if (svc()) return true;
  return std::get<std::shared_ptr<CustomPredictor>>(impl_)->is_classifier();
}

Target SensorModel::target() const {
  if (const KnnModel* m = knn()) return m->target;
  if (const SvcModel* m = svc()) return m->target;
  return std::get<std::shared_ptr<CustomPredictor>>(impl_)->target();
}

std::size_t SensorModel::feature_dim() const {
  if (const KnnModel* m = knn()) return m->dim;
  if (const SvcModel* m = svc()) return m->dim;
  return std::get<std::shared_ptr<CustomPredictor>>(impl_)->feature_dim();
}

Label SensorModel::predict_label(const std::vector<double>& x) const {
  if (const KnnModel* m = knn()) {
    if (m->mode != KnnMode::Classify) throw WrongTargetType("regressor cannot predict a label");
    return knn_vote(*m, x);
  }
  if (const SvcModel* m = svc()) {
    if (x.size() != m->dim) throw DimMismatch("query dimension differs from training dimension");
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m->classes.size(); ++c) {
      const double* wc = m->weights.data() + c * m->dim;
      double s = m->bias[c];
      for (std::size_t j = 0; j < m->dim; ++j) s += wc[j] * x[j];
      if (s > best_score) {  // classes sorted; ties keep the earlier label
        best_score = s;
        best = c;
      }
    }
    return m->classes[best];
  }
  return std::get<std::shared_ptr<CustomPredictor>>(impl_)->predict_label(x);
}

double SensorModel::predict_value(const std::vector<double>& x) const {
  if (const KnnModel* m = knn()) {
    if (m->mode != KnnMode::Regress) throw WrongTargetType("classifier cannot predict a value");
    return knn_mean(*m, x);
  }
  if (svc()) throw WrongTargetType("linear SVC cannot predict a value");
  return std::get<std::shared_ptr<CustomPredictor>>(impl_)->predict_value(x);
}

SensorModel knn_train(const FeatureSet& data, Target target, int k, Metric metric, KnnMode mode) {
  if (data.size() == 0) throw EmptyData("knn_train needs at least one sample");
  if (k < 1) throw InvalidSpec("k must be >= 1");
  if (static_cast<std::size_t>(k) > data.size()) {
    throw KTooLarge("k exceeds the training-set size");
  }

  KnnModel m;
  m.mode = mode;
  m.k = k;
  m.metric = metric;
  m.target = target;
  m.dim = data.dim();
  m.train_x.reserve(data.size() * m.dim);
  for (const SpectrumFeature& f : data.features) {
    if (f.amplitudes.size() != m.dim) throw DimMismatch("inconsistent feature dimensions");
    m.train_x.insert(m.train_x.end(), f.amplitudes.begin(), f.amplitudes.end());
  }
  if (mode == KnnMode::Classify) {
    m.class_targets.reserve(data.size());
    for (const SampleLabels& l : data.labels) m.class_targets.push_back(label_of(l, target));
  } else {
    m.value_targets.reserve(data.size());
    for (const SampleLabels& l : data.labels) m.value_targets.push_back(numeric_of(l, target));
  }
  return SensorModel(std::move(m));
}

SensorModel svc_train(const FeatureSet& data, Target target, double c, const SvcOptions& options) {
  if (data.size() == 0) throw EmptyData("svc_train needs at least one sample");
  if (!(c > 0)) throw InvalidSpec("C must be > 0");

  std::set<Label> class_set;
  std::vector<Label> sample_labels;
  sample_labels.reserve(data.size());
  for (const SampleLabels& l : data.labels) {
    sample_labels.push_back(label_of(l, target));
    class_set.insert(sample_labels.back());
  }
  if (class_set.size() < 2) throw SingleClass("training data contains fewer than two classes");

  SvcModel m;
  m.c = c;
  m.target = target;
  m.dim = data.dim();
  m.classes.assign(class_set.begin(), class_set.end());

  std::vector<double> x;
  x.reserve(data.size() * m.dim);
  for (const SpectrumFeature& f : data.features) {
    if (f.amplitudes.size() != m.dim) throw DimMismatch("inconsistent feature dimensions");
    x.insert(x.end(), f.amplitudes.begin(), f.amplitudes.end());
  }

  m.weights.assign(m.classes.size() * m.dim, 0.0);
  m.bias.assign(m.classes.size(), 0.0);
  m.loss_traces.resize(m.classes.size());
  m.converged = true;
  m.epochs_used = 0;

  for (std::size_t ci = 0; ci < m.classes.size(); ++ci) {
    SvcProblem p{x, {}, data.size(), m.dim, c};
    p.y.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      p.y[i] = sample_labels[i] == m.classes[ci] ? 1.0 : -1.0;
    }
    std::vector<double> w;
    double b = 0.0;
    bool converged = false;
    int epochs = 0;
    svc_train_binary(p, options, w, b, m.loss_traces[ci], converged, epochs);
    std::copy(w.begin(), w.end(), m.weights.begin() + ci * m.dim);
    m.bias[ci] = b;
    m.converged = m.converged && converged;
    m.epochs_used = std::max(m.epochs_used, epochs);
  }
  return SensorModel(std::move(m));
}

ParamGrid ParamGrid::svc(std::vector<double> c_values) {
  ParamGrid g;
  g.kind = LearnerKind::LinearSvc;
  g.ks.clear();
  g.metrics.clear();
  g.cs = std::move(c_values);
  return g;
}

std::string GridPoint::describe() const {
  if (kind == LearnerKind::LinearSvc) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "svc C=%g", c);
    return buf;
  }
  std::string s = kind == LearnerKind::KnnRegressor ? "knn_regressor" : "knn";
  return s + " k=" + std::to_string(k) + " metric=" + to_string(metric);
}

SensorModel GridPoint::train(const FeatureSet& data, Target target) const {
  switch (kind) {
    case LearnerKind::KnnClassifier:
      return knn_train(data, target, k, metric, KnnMode::Classify);
    case LearnerKind::KnnRegressor:
      return knn_train(data, target, k, metric, KnnMode::Regress);
    case LearnerKind::LinearSvc:
      return svc_train(data, target, c);
  }
  throw InvalidSpec("unhandled learner kind");
}

namespace {

std::vector<GridPoint> enumerate_grid(const ParamGrid& grid) {
  std::vector<GridPoint> points;
  if (grid.kind == LearnerKind::LinearSvc) {
    if (grid.cs.empty()) throw InvalidSpec("SVC grid has no C values");
    for (double c : grid.cs) {
      GridPoint gp;
      gp.kind = grid.kind;
      gp.c = c;
      points.push_back(gp);
    }
    return points;
  }
  if (grid.ks.empty() || grid.metrics.empty()) throw InvalidSpec("KNN grid has an empty list");
  for (int k : grid.ks) {
    for (Metric metric : grid.metrics) {
      GridPoint gp;
      gp.kind = grid.kind;
      gp.k = k;
      gp.metric = metric;
      points.push_back(gp);
    }
  }
  return points;
}

FeatureSet subset(const FeatureSet& data, const std::vector<std::size_t>& idx) {
  FeatureSet out;
  out.features.reserve(idx.size());
  out.labels.reserve(idx.size());
  for (std::size_t i : idx) {
    out.features.push_back(data.features[i]);
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

double macro_recall(const std::vector<Label>& truth, const std::vector<Label>& pred) {
  std::map<Label, std::pair<std::size_t, std::size_t>> per_class;  // (correct, total)
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto& pc = per_class[truth[i]];
    pc.second += 1;
    if (pred[i] == truth[i]) pc.first += 1;
  }
  double acc = 0.0;
  for (const auto& [label, pc] : per_class) {
    acc += static_cast<double>(pc.first) / static_cast<double>(pc.second);
  }
  return acc / static_cast<double>(per_class.size());
}

}  // namespace

GridSearchResult grid_search(const FeatureSet& data, Target target, const ParamGrid& grid,
                             int folds, std::uint64_t seed, int jobs) {
  if (folds < 2) throw InvalidSpec("folds must be >= 2");
  const bool regression = grid.kind == LearnerKind::KnnRegressor;

  // Stratified fold assignment: shuffle within each stratum, then deal
  // round-robin. Strata are target labels (distinct values for regression).
  std::map<Label, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < data.size(); ++i) {
    strata[label_of(data.labels[i], target)].push_back(i);
  }
  for (const auto& [label, idx] : strata) {
    if (idx.size() < static_cast<std::size_t>(folds)) {
      throw TooFewPerClass("class '" + label.to_string() + "' has fewer samples than folds");
    }
  }
  std::vector<std::vector<std::size_t>> fold_idx(static_cast<std::size_t>(folds));
  std::size_t stratum_i = 0;
  for (auto& [label, idx] : strata) {
    Rng rng(combine_seed(seed, stratum_i++));
    rng.shuffle(idx);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      fold_idx[j % static_cast<std::size_t>(folds)].push_back(idx[j]);
    }
  }

  std::vector<FeatureSet> fold_train(fold_idx.size()), fold_test(fold_idx.size());
  for (std::size_t f = 0; f < fold_idx.size(); ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < fold_idx.size(); ++g) {
      if (g == f) continue;
      train_rows.insert(train_rows.end(), fold_idx[g].begin(), fold_idx[g].end());
    }
    fold_train[f] = subset(data, train_rows);
    fold_test[f] = subset(data, fold_idx[f]);
  }

  std::vector<GridPoint> points = enumerate_grid(grid);
  std::vector<double> scores(points.size(), 0.0);
  parallel_for(points.size(), jobs, [&](std::size_t pi) {
    const GridPoint& gp = points[pi];
    double mean_score = 0.0;
    for (std::size_t f = 0; f < fold_idx.size(); ++f) {
      SensorModel model = gp.train(fold_train[f], target);
      if (regression) {
        double se = 0.0;
        for (std::size_t i = 0; i < fold_test[f].size(); ++i) {
          double err = model.predict_value(fold_test[f].features[i]) -
                       numeric_of(fold_test[f].labels[i], target);
          se += err * err;
        }
        mean_score -= std::sqrt(se / static_cast<double>(fold_test[f].size()));
      } else {
        std::vector<Label> truth, pred;
        truth.reserve(fold_test[f].size());
        pred.reserve(fold_test[f].size());
        for (std::size_t i = 0; i < fold_test[f].size(); ++i) {
          truth.push_back(label_of(fold_test[f].labels[i], target));
          pred.push_back(model.predict_label(fold_test[f].features[i]));
        }
        mean_score += macro_recall(truth, pred);
      }
    }
    scores[pi] = mean_score / static_cast<double>(fold_idx.size());
  });

  GridSearchResult result;
  bool have_best = false;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    result.table.emplace_back(points[pi], scores[pi]);
    if (!have_best || scores[pi] > result.best_score) {
      have_best = true;
      result.best = points[pi];
      result.best_score = scores[pi];
    }
  }
  return result;
}

}  // namespace asense
