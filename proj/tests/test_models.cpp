#include <cmath>

#include "asense/errors.hpp"
#include "asense/models.hpp"
#include "asense/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asense;

namespace {

// FeatureSet from plain vectors; the location field carries the class label
// and the force field the regression target.
FeatureSet toy_set(const std::vector<std::vector<double>>& xs,
                   const std::vector<Label>& labels, const std::vector<double>& values = {}) {
  FeatureSet set;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    SpectrumFeature f;
    f.amplitudes = xs[i];
    f.bin_hz = 1.0;
    f.first_bin_hz = 1.0;
    f.sample_rate_hz = 48000.0;
    set.features.push_back(f);
    SampleLabels l;
    if (!labels.empty()) l.location = labels[i];
    if (!values.empty()) l.force_n = values[i];
    set.labels.push_back(l);
  }
  return set;
}

std::vector<double> vec1(double x) { return {x}; }

}  // namespace

TEST_SUITE_BEGIN("models");

TEST_CASE("knn stores the training set") {
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  Rng rng(1);
  for (int i = 0; i < 90; ++i) {
    xs.push_back({rng.uniform(), rng.uniform()});
    labels.push_back(Label::category(i % 2 ? "a" : "b"));
  }
  SensorModel m = knn_train(toy_set(xs, labels), Target::Location, 5);
  REQUIRE(m.knn() != nullptr);
  CHECK(m.knn()->train_size() == 90);
}

TEST_CASE("knn preconditions") {
  std::vector<std::vector<double>> xs = {{0.0}, {1.0}};
  std::vector<Label> labels = {Label::category("a"), Label::category("b")};
  FeatureSet data = toy_set(xs, labels);
  CHECK_THROWS_AS(knn_train(FeatureSet{}, Target::Location, 1), EmptyData);
  CHECK_THROWS_AS(knn_train(data, Target::Location, 3), KTooLarge);
  CHECK_THROWS_AS(knn_train(data, Target::Location, 1, Metric::L2, KnnMode::Regress),
                  WrongTargetType);  // categorical location as regression target
  CHECK_THROWS_AS(knn_train(data, Target::Material, 1, Metric::L2, KnnMode::Regress),
                  WrongTargetType);
}

TEST_CASE("knn exact matches and toy regressions") {
  // Query equal to a training vector with k=1 returns that label.
  std::vector<std::vector<double>> xs = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
  std::vector<Label> labels = {Label::category("a"), Label::category("b"), Label::category("c")};
  SensorModel m1 = knn_train(toy_set(xs, labels), Target::Location, 1);
  CHECK(m1.predict_label({1.0, 1.0}) == Label::category("b"));

  // Duplicated two-point set: all five neighbors identical.
  std::vector<std::vector<double>> xr;
  std::vector<double> targets;
  for (int i = 0; i < 5; ++i) {
    xr.push_back(vec1(0.0));
    targets.push_back(0.0);
    xr.push_back(vec1(10.0));
    targets.push_back(30.0);
  }
  SensorModel mr = knn_train(toy_set(xr, {}, targets), Target::Force, 5, Metric::L2,
                             KnnMode::Regress);
  CHECK(mr.predict_value(vec1(0.0)) == doctest::Approx(0.0));

  // Five-point line, k=3 around the middle.
  std::vector<std::vector<double>> xl;
  std::vector<double> tl;
  for (int i = 0; i < 5; ++i) {
    xl.push_back(vec1(i));
    tl.push_back(3.0 * i);
  }
  SensorModel ml = knn_train(toy_set(xl, {}, tl), Target::Force, 3, Metric::L2,
                             KnnMode::Regress);
  CHECK(ml.predict_value(vec1(2.0)) == doctest::Approx(6.0));
}

TEST_CASE("knn matches the brute-force oracle on random instances") {
  Rng rng(424242);
  int checked = 0;
  for (int instance = 0; instance < 60; ++instance) {
    const std::size_t n = 5 + rng.below(16);   // <= 20 points
    const std::size_t dim = 1 + rng.below(5);  // <= 5 dims
    const int k = 1 + static_cast<int>(rng.below(n));
    const Metric metric = rng.below(2) ? Metric::L2 : Metric::L1;
    const bool regress = instance % 3 == 0;

    oracle::BruteKnn brute;
    brute.use_l1 = metric == Metric::L1;
    std::vector<std::vector<double>> xs;
    std::vector<Label> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(dim);
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      xs.push_back(x);
      brute.x.push_back(x);
      Label lab = Label::category(std::string(1, static_cast<char>('a' + rng.below(4))));
      labels.push_back(lab);
      brute.labels.push_back(lab);
      values.push_back(rng.uniform(0.0, 10.0));
      brute.values.push_back(values.back());
    }

    SensorModel model =
        regress ? knn_train(toy_set(xs, labels, values), Target::Force, k, metric,
                            KnnMode::Regress)
                : knn_train(toy_set(xs, labels, values), Target::Location, k, metric,
                            KnnMode::Classify);
    for (int q = 0; q < 5; ++q) {
      std::vector<double> query(dim);
      for (double& v : query) v = rng.uniform(-1.0, 1.0);
      if (regress) {
        CHECK(model.predict_value(query) == brute.regress(query, k));
      } else {
        CHECK(model.predict_label(query) == brute.classify(query, k));
      }
      ++checked;
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("knn prediction is invariant under training permutation") {
  Rng rng(7);
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  for (int i = 0; i < 30; ++i) {
    xs.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    labels.push_back(Label::category(std::string(1, static_cast<char>('a' + i % 3))));
  }
  SensorModel m = knn_train(toy_set(xs, labels), Target::Location, 5);

  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::vector<double>> xs_p;
  std::vector<Label> labels_p;
  for (std::size_t i : order) {
    xs_p.push_back(xs[i]);
    labels_p.push_back(labels[i]);
  }
  SensorModel mp = knn_train(toy_set(xs_p, labels_p), Target::Location, 5);

  for (int q = 0; q < 50; ++q) {
    std::vector<double> query = {rng.uniform(), rng.uniform(), rng.uniform()};
    CHECK(m.predict_label(query) == mp.predict_label(query));
  }
}

TEST_CASE("knn k=1 reproduces training labels on training inputs") {
  Rng rng(11);
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  for (int i = 0; i < 40; ++i) {
    xs.push_back({rng.uniform(), rng.uniform()});
    labels.push_back(Label::category(std::string(1, static_cast<char>('a' + i % 4))));
  }
  SensorModel m = knn_train(toy_set(xs, labels), Target::Location, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(m.predict_label(xs[i]) == labels[i]);
}

TEST_CASE("knn dimension mismatch") {
  std::vector<std::vector<double>> xs = {{0.0, 0.0}, {1.0, 1.0}};
  std::vector<Label> labels = {Label::category("a"), Label::category("b")};
  SensorModel m = knn_train(toy_set(xs, labels), Target::Location, 1);
  CHECK_THROWS_AS(m.predict_label({1.0, 2.0, 3.0}), DimMismatch);
}

TEST_CASE("svc separates two separable classes perfectly") {
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  for (int i = 0; i < 5; ++i) {
    xs.push_back({0.0, 0.0});
    labels.push_back(Label::category("a"));
    xs.push_back({10.0, 10.0});
    labels.push_back(Label::category("b"));
  }
  FeatureSet data = toy_set(xs, labels);
  SensorModel m = svc_train(data, Target::Location, 100.0);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(m.predict_label(xs[i]) == labels[i]);

  // Decision values: the "a" classifier scores its own points positive and
  // higher than the "b" classifier does.
  const SvcModel* svc = m.svc();
  REQUIRE(svc != nullptr);
  auto score = [&](std::size_t cls, const std::vector<double>& x) {
    double s = svc->bias[cls];
    for (std::size_t j = 0; j < svc->dim; ++j) s += svc->weights[cls * svc->dim + j] * x[j];
    return s;
  };
  CHECK(score(0, {0.0, 0.0}) > 0.0);
  CHECK(score(0, {0.0, 0.0}) > score(1, {0.0, 0.0}));

  // Loss traces never increase.
  for (const auto& trace : svc->loss_traces) {
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
  }
}

TEST_CASE("svc on XOR stays at most 75 percent and does not throw") {
  std::vector<std::vector<double>> xs = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  std::vector<Label> labels = {Label::category("a"), Label::category("a"),
                               Label::category("b"), Label::category("b")};
  std::vector<std::vector<double>> xs_rep;
  std::vector<Label> labels_rep;
  for (int rep = 0; rep < 3; ++rep) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs_rep.push_back(xs[i]);
      labels_rep.push_back(labels[i]);
    }
  }
  SensorModel m = svc_train(toy_set(xs_rep, labels_rep), Target::Location, 100.0);
  int correct = 0;
  for (std::size_t i = 0; i < xs_rep.size(); ++i) {
    if (m.predict_label(xs_rep[i]) == labels_rep[i]) ++correct;
  }
  CHECK(correct <= 9);  // 75 % of 12
}

TEST_CASE("svc single class is rejected") {
  std::vector<std::vector<double>> xs = {{0.0}, {1.0}};
  std::vector<Label> labels = {Label::category("a"), Label::category("a")};
  CHECK_THROWS_AS(svc_train(toy_set(xs, labels), Target::Location, 1.0), SingleClass);
}

TEST_CASE("svc reports non-convergence but still returns a model") {
  Rng rng(3);
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  for (int i = 0; i < 30; ++i) {
    xs.push_back({rng.uniform(), rng.uniform()});
    labels.push_back(Label::category(i % 2 ? "a" : "b"));
  }
  SvcOptions opt;
  opt.max_epochs = 1;
  SensorModel m = svc_train(toy_set(xs, labels), Target::Location, 100.0, opt);
  REQUIRE(m.svc() != nullptr);
  CHECK_FALSE(m.svc()->converged);
  CHECK(m.svc()->epochs_used == 1);
  m.predict_label(xs[0]);  // usable regardless
}

TEST_CASE("svc decision is invariant to duplication with C halved") {
  Rng rng(5);
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  for (int i = 0; i < 20; ++i) {
    double cls = i % 2 ? 1.0 : -1.0;
    xs.push_back({cls + 0.3 * rng.uniform_signed(), cls + 0.3 * rng.uniform_signed()});
    labels.push_back(Label::category(i % 2 ? "pos" : "neg"));
  }
  SensorModel m1 = svc_train(toy_set(xs, labels), Target::Location, 10.0);

  std::vector<std::vector<double>> xs2;
  std::vector<Label> labels2;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs2.push_back(xs[i]);
    xs2.push_back(xs[i]);
    labels2.push_back(labels[i]);
    labels2.push_back(labels[i]);
  }
  SensorModel m2 = svc_train(toy_set(xs2, labels2), Target::Location, 5.0);

  for (int q = 0; q < 50; ++q) {
    std::vector<double> query = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    CHECK(m1.predict_label(query) == m2.predict_label(query));
  }
}

TEST_CASE("trained predictors are deterministic") {
  Rng rng(13);
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  for (int i = 0; i < 24; ++i) {
    xs.push_back({rng.uniform(), rng.uniform()});
    labels.push_back(Label::category(i % 3 == 0 ? "a" : (i % 3 == 1 ? "b" : "c")));
  }
  FeatureSet data = toy_set(xs, labels);
  SensorModel knn = knn_train(data, Target::Location, 3);
  SensorModel svc = svc_train(data, Target::Location, 10.0);
  std::vector<double> query = {0.4, 0.6};
  for (int i = 0; i < 5; ++i) {
    CHECK(knn.predict_label(query) == knn.predict_label(query));
    CHECK(svc.predict_label(query) == svc.predict_label(query));
  }
}

TEST_CASE("grid search basics") {
  // Tight, well-separated clusters: every sensible config scores 1.0 and the
  // first grid point wins ties.
  Rng rng(17);
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  for (int i = 0; i < 60; ++i) {
    double center = (i % 3) * 100.0;
    xs.push_back({center + rng.uniform(), center + rng.uniform()});
    labels.push_back(Label::category(std::string(1, static_cast<char>('a' + i % 3))));
  }
  FeatureSet data = toy_set(xs, labels);

  ParamGrid singleton;
  singleton.ks = {5};
  singleton.metrics = {Metric::L2};
  GridSearchResult single = grid_search(data, Target::Location, singleton, 5, 1);
  CHECK(single.table.size() == 1);
  CHECK(single.best.k == 5);
  CHECK(single.best_score == doctest::Approx(1.0));

  ParamGrid two;
  two.ks = {1, 5};
  two.metrics = {Metric::L2};
  GridSearchResult both = grid_search(data, Target::Location, two, 5, 1);
  CHECK(both.table.size() == 2);
  CHECK(both.table[0].second == doctest::Approx(1.0));
  CHECK(both.table[1].second == doctest::Approx(1.0));
  CHECK(both.best.k == 1);  // tie -> first in grid order

  GridSearchResult again = grid_search(data, Target::Location, two, 5, 1);
  CHECK(again.best_score == both.best_score);
  CHECK(again.table[0].second == both.table[0].second);

  GridSearchResult threaded = grid_search(data, Target::Location, two, 5, 1, 2);
  CHECK(threaded.best.k == both.best.k);
  CHECK(threaded.table[1].second == both.table[1].second);

  ParamGrid knn_grid;
  CHECK_THROWS_AS(grid_search(data, Target::Location, knn_grid, 25, 1), TooFewPerClass);
}

TEST_SUITE_END();
