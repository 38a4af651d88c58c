// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgesim/forecast.hpp"
#include "edgesim/sim.hpp"

using namespace edgesim;
using Row = std::array<double, FeatureVector::kDim>;

namespace {

double gauss(SeededRng& rng) {
  double u1 = std::max(rng.uniform01(), 1e-300);
  double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

Row random_row(SeededRng& rng, double spread = 1.0) {
  Row r;
  for (auto& v : r) v = spread * (2.0 * rng.uniform01() - 1.0);
  return r;
}

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> idx(d.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

// Two well-separated blobs in features 0 and 1, noise elsewhere.
Dataset blob_dataset(std::size_t per_class, std::uint64_t seed) {
  Dataset d;
  SeededRng rng(seed, "blobs");
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool second = i >= per_class;
    Row r;
    r[0] = (second ? 2.0 : -2.0) + 0.5 * gauss(rng);
    r[1] = (second ? 2.0 : -2.0) + 0.5 * gauss(rng);
    for (int j = 2; j < FeatureVector::kDim; ++j) r[static_cast<std::size_t>(j)] = gauss(rng);
    d.x.push_back(r);
    d.y.push_back(second ? 5.5 : 1.4);
  }
  return d;
}

}  // namespace

TEST_CASE("label_values returns the sorted unique labels") {
  Dataset d;
  for (double v : {5.5, 1.4, 5.5, 0.5, 1.4}) {
    d.x.push_back(Row{});
    d.y.push_back(v);
  }
  CHECK(d.label_values() == std::vector<double>{0.5, 1.4, 5.5});
}

TEST_CASE("model kind strings round-trip") {
  for (auto k : {ModelKind::kRandomForest, ModelKind::kKnn, ModelKind::kLda, ModelKind::kSvm}) {
    CHECK(model_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(model_kind_from_string("boost"), std::invalid_argument);
}

TEST_CASE("stratified split keeps per-class proportions") {
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) y.push_back(1.0);
  for (int i = 0; i < 5; ++i) y.push_back(2.0);
  for (int i = 0; i < 2; ++i) y.push_back(3.0);
  y.push_back(4.0);

  SplitIndices s = stratified_split(y, 0.8, 7);
  CHECK(s.train.size() == 14);  // 8 + 4 + 1 + 1
  CHECK(s.test.size() == 4);    // 2 + 1 + 1 + 0

  std::map<double, int> train_counts, test_counts;
  std::set<std::size_t> seen;
  for (std::size_t i : s.train) {
    ++train_counts[y[i]];
    CHECK(seen.insert(i).second);
  }
  for (std::size_t i : s.test) {
    ++test_counts[y[i]];
    CHECK(seen.insert(i).second);
  }
  CHECK(seen.size() == y.size());  // disjoint and exhaustive
  CHECK(train_counts[1.0] == 8);
  CHECK(test_counts[1.0] == 2);
  CHECK(train_counts[2.0] == 4);
  CHECK(test_counts[2.0] == 1);
  // a two-sample class keeps one on each side despite round(0.8*2) = 2
  CHECK(train_counts[3.0] == 1);
  CHECK(test_counts[3.0] == 1);
  // a singleton class goes to training
  CHECK(train_counts[4.0] == 1);
  CHECK(test_counts[4.0] == 0);
}

TEST_CASE("stratified split is seed-deterministic and seed-sensitive") {
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) y.push_back(i % 3 == 0 ? 1.0 : (i % 3 == 1 ? 2.0 : 3.0));
  SplitIndices a = stratified_split(y, 0.8, 11);
  SplitIndices b = stratified_split(y, 0.8, 11);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);

  bool any_differs = false;
  for (std::uint64_t seed = 12; seed < 22 && !any_differs; ++seed) {
    any_differs = stratified_split(y, 0.8, seed).train != a.train;
  }
  CHECK(any_differs);

  CHECK_THROWS_AS(stratified_split(y, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(stratified_split(y, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(stratified_split({}, 0.8, 1), std::invalid_argument);
}

TEST_CASE("a one-tree depth-one forest equals the exhaustively searched stump") {
  // three classes, cleanly ordered along feature 0, noise elsewhere
  Dataset d;
  SeededRng gen(99, "stump-data");
  for (int i = 0; i < 40; ++i) {
    const int cls = i % 3;
    Row r = random_row(gen);
    r[0] = static_cast<double>(cls) + 0.5 * gen.uniform01();
    d.x.push_back(r);
    d.y.push_back(cls == 0 ? 0.5 : (cls == 1 ? 1.4 : 5.5));
  }

  ForecastHyper hyper;
  hyper.rf_trees = 1;
  hyper.rf_max_depth = 1;
  hyper.rf_min_samples_leaf = 2;
  const std::uint64_t seed = 1234;
  TrainedModel m = train_model(d, all_rows(d), ModelKind::kRandomForest, hyper, seed);
  REQUIRE(m.forest.trees.size() == 1);
  const DecisionTree& tree = m.forest.trees[0];
  REQUIRE(tree.nodes.size() == 3);  // root plus two leaves

  // rebuild the bootstrap sample the forest drew
  SeededRng rng(seed, "rf-bootstrap");
  const std::size_t n = d.size();
  std::vector<std::size_t> sample(n);
  for (std::size_t i = 0; i < n; ++i) sample[i] = rng.uniform_below(n);

  auto class_id = [&](std::size_t i) {
    return static_cast<int>(std::lower_bound(m.labels.begin(), m.labels.end(), d.y[i] - 1e-9) -
                            m.labels.begin());
  };

  // brute-force stump: every feature, every boundary in the sorted multiset
  const int min_leaf = hyper.rf_min_samples_leaf;
  double best_impurity = 1e18;
  int best_feature = -1;
  double best_threshold = 0.0;
  for (int f = 0; f < FeatureVector::kDim; ++f) {
    std::vector<std::pair<double, int>> col;
    for (std::size_t i : sample) col.emplace_back(d.x[i][static_cast<std::size_t>(f)], class_id(i));
    std::sort(col.begin(), col.end());
    const int total = static_cast<int>(col.size());
    for (int cut = 1; cut < total; ++cut) {
      if (col[static_cast<std::size_t>(cut)].first == col[static_cast<std::size_t>(cut - 1)].first)
        continue;
      if (cut < min_leaf || total - cut < min_leaf) continue;
      auto gini_of = [&](int lo, int hi) {
        std::map<int, int> counts;
        for (int i = lo; i < hi; ++i) ++counts[col[static_cast<std::size_t>(i)].second];
        double ss = 0.0;
        for (auto& [c, k] : counts) {
          double p = static_cast<double>(k) / static_cast<double>(hi - lo);
          ss += p * p;
        }
        return 1.0 - ss;
      };
      const double g = (cut * gini_of(0, cut) + (total - cut) * gini_of(cut, total)) / total;
      if (g < best_impurity) {
        best_impurity = g;
        best_feature = f;
        double thr = 0.5 * (col[static_cast<std::size_t>(cut - 1)].first +
                            col[static_cast<std::size_t>(cut)].first);
        if (!(thr > col[static_cast<std::size_t>(cut - 1)].first))
          thr = col[static_cast<std::size_t>(cut)].first;
        best_threshold = thr;
      }
    }
  }
  REQUIRE(best_feature >= 0);
  CHECK(tree.nodes[0].feature == best_feature);
  CHECK(tree.nodes[0].threshold == doctest::Approx(best_threshold).epsilon(1e-15));

  // and the achieved impurity matches: recompute it from the tree's own split
  {
    std::map<int, int> lc, rc;
    int ln = 0, rn = 0;
    for (std::size_t i : sample) {
      if (d.x[i][static_cast<std::size_t>(tree.nodes[0].feature)] < tree.nodes[0].threshold) {
        ++lc[class_id(i)];
        ++ln;
      } else {
        ++rc[class_id(i)];
        ++rn;
      }
    }
    auto gini_counts = [](const std::map<int, int>& counts, int total) {
      double ss = 0.0;
      for (auto& [c, k] : counts) {
        double p = static_cast<double>(k) / static_cast<double>(total);
        ss += p * p;
      }
      return 1.0 - ss;
    };
    const double achieved =
        (ln * gini_counts(lc, ln) + rn * gini_counts(rc, rn)) / static_cast<double>(ln + rn);
    CHECK(achieved == doctest::Approx(best_impurity).epsilon(1e-12));
  }
}

TEST_CASE("forest vote ties resolve to the lower bitrate") {
  TrainedModel m;
  m.kind = ModelKind::kRandomForest;
  m.labels = {1.4, 5.5};
  m.standardizer.mean.fill(0.0);
  m.standardizer.scale.fill(1.0);
  DecisionTree low, high;
  low.nodes.push_back({-1, 0.0, -1, -1, 0});
  high.nodes.push_back({-1, 0.0, -1, -1, 1});
  m.forest.trees = {low, high};
  CHECK(m.predict(Row{}) == 1.4);
  m.forest.trees = {high, low};  // order must not matter
  CHECK(m.predict(Row{}) == 1.4);
}

TEST_CASE("knn matches an independent brute-force scan") {
  Dataset d;
  SeededRng gen(41, "knn-data");
  const double ladder[] = {0.5, 1.4, 5.5, 11.0};
  for (int i = 0; i < 60; ++i) {
    d.x.push_back(random_row(gen, 3.0));
    d.y.push_back(ladder[gen.uniform_below(4)]);
  }
  ForecastHyper hyper;
  hyper.knn_neighbors = 5;
  SplitIndices s = stratified_split(d.y, 0.8, 3);
  TrainedModel m = train_model(d, s.train, ModelKind::kKnn, hyper, 1);

  // standardizer must reflect the training rows only
  for (int j = 0; j < FeatureVector::kDim; ++j) {
    double mean = 0.0;
    for (std::size_t i : s.train) mean += d.x[i][static_cast<std::size_t>(j)];
    mean /= static_cast<double>(s.train.size());
    CHECK(m.standardizer.mean[static_cast<std::size_t>(j)] == doctest::Approx(mean).epsilon(1e-12));
  }

  SeededRng qgen(42, "knn-queries");
  for (int q = 0; q < 200; ++q) {
    Row query = random_row(qgen, 3.0);
    const Row std_q = m.standardizer.apply(query);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < m.knn.points.size(); ++i) {
      double d2 = 0.0;
      for (int j = 0; j < FeatureVector::kDim; ++j) {
        const auto k = static_cast<std::size_t>(j);
        const double delta = m.knn.points[i][k] - std_q[k];
        d2 += delta * delta;
      }
      dist.emplace_back(d2, i);
    }
    std::sort(dist.begin(), dist.end());
    std::map<int, int> votes;
    for (std::size_t i = 0; i < 5 && i < dist.size(); ++i) ++votes[m.knn.classes[dist[i].second]];
    int best_class = -1, best_votes = -1;
    for (auto& [cls, v] : votes) {
      if (v > best_votes) {
        best_class = cls;
        best_votes = v;
      }
    }
    CHECK(m.predict(query) == m.labels[static_cast<std::size_t>(best_class)]);
  }
}

TEST_CASE("knn clamps the neighbourhood to the training size") {
  Dataset d;
  for (int i = 0; i < 3; ++i) {
    Row r{};
    r[0] = static_cast<double>(i);
    d.x.push_back(r);
    d.y.push_back(i < 2 ? 1.4 : 5.5);
  }
  ForecastHyper hyper;
  hyper.knn_neighbors = 5;
  TrainedModel m = train_model(d, all_rows(d), ModelKind::kKnn, hyper, 1);
  Row q{};
  q[0] = 10.0;
  CHECK(m.predict(q) == 1.4);  // majority of all three points
}

TEST_CASE("lda separates blobs and puts the boundary near the midpoint") {
  Dataset d = blob_dataset(60, 5);
  SplitIndices s = stratified_split(d.y, 0.8, 9);
  TrainedModel m = train_model(d, s.train, ModelKind::kLda, ForecastHyper{}, 1);

  EvalResult res = evaluate_model(m, d, s.test);
  CHECK(res.n == s.test.size());
  CHECK(res.accuracy >= 0.95);

  // walk the segment between the class means: the decision flips near halfway
  Row lo{}, hi{};
  lo[0] = lo[1] = -2.0;
  hi[0] = hi[1] = 2.0;
  auto lerp = [&](double a) {
    Row r{};
    for (int j = 0; j < FeatureVector::kDim; ++j) {
      const auto k = static_cast<std::size_t>(j);
      r[k] = lo[k] + a * (hi[k] - lo[k]);
    }
    return r;
  };
  CHECK(m.predict(lerp(0.40)) == 1.4);
  CHECK(m.predict(lerp(0.60)) == 5.5);
}

TEST_CASE("training rows alone define the class set") {
  Dataset d;
  for (int i = 0; i < 8; ++i) {
    Row r{};
    r[0] = static_cast<double>(i);
    d.x.push_back(r);
    d.y.push_back(i < 6 ? (i % 2 == 0 ? 1.4 : 5.5) : 27.5);
  }
  std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5};  // leaves 27.5 out
  TrainedModel m = train_model(d, rows, ModelKind::kKnn, ForecastHyper{}, 1);
  CHECK(m.labels == std::vector<double>{1.4, 5.5});

  // evaluation widens the label set for the confusion matrix
  EvalResult res = evaluate_model(m, d, {6, 7});
  CHECK(res.confusion.labels == std::vector<double>{1.4, 5.5, 27.5});
  CHECK(res.accuracy == 0.0);  // the model cannot emit 27.5
  CHECK(res.majority_baseline == 1.0);
}

TEST_CASE("confusion matrix counts and row normalization") {
  Dataset d = blob_dataset(30, 17);
  SplitIndices s = stratified_split(d.y, 0.8, 2);
  TrainedModel m = train_model(d, s.train, ModelKind::kKnn, ForecastHyper{}, 1);
  EvalResult res = evaluate_model(m, d, s.test);

  std::uint64_t total = 0, diag = 0;
  for (std::size_t r = 0; r < res.confusion.counts.size(); ++r) {
    for (std::size_t c = 0; c < res.confusion.counts[r].size(); ++c) {
      total += res.confusion.counts[r][c];
      if (r == c) diag += res.confusion.counts[r][c];
    }
  }
  CHECK(total == res.n);
  CHECK(res.accuracy == doctest::Approx(static_cast<double>(diag) / static_cast<double>(res.n)));

  auto rows = res.confusion.row_normalized();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::uint64_t support = 0;
    for (std::uint64_t c : res.confusion.counts[r]) support += c;
    if (support == 0) continue;
    double sum = 0.0;
    for (double v : rows[r]) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
  CHECK(res.majority_baseline == doctest::Approx(0.5));

  CHECK_THROWS_AS(evaluate_model(m, d, {}), std::invalid_argument);
}

TEST_CASE("correlation matrix properties") {
  Dataset d;
  SeededRng gen(8, "corr");
  for (int i = 0; i < 50; ++i) {
    Row r = random_row(gen, 2.0);
    r[1] = 2.0 * r[0];   // exact linear dependence
    r[6] = 3.0;          // constant column
    d.x.push_back(r);
    d.y.push_back(r[0] > 0 ? 5.5 : 1.4);
  }
  auto corr = correlation_matrix(d);
  REQUIRE(corr.size() == 8);
  for (int a = 0; a < 8; ++a) {
    REQUIRE(corr[static_cast<std::size_t>(a)].size() == 8);
    for (int b = 0; b < 8; ++b) {
      const double v = corr[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      const double w = corr[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
      if (a == 6 || b == 6) {
        CHECK(std::isnan(v));
      } else {
        CHECK(v == doctest::Approx(w).epsilon(1e-12));  // symmetric
        CHECK(v >= -1.0 - 1e-12);
        CHECK(v <= 1.0 + 1e-12);
      }
    }
    if (a != 6) CHECK(corr[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(corr[0][1] == doctest::Approx(1.0).epsilon(1e-12));

  Dataset tiny;
  tiny.x.push_back(Row{});
  tiny.y.push_back(1.0);
  CHECK_THROWS_AS(correlation_matrix(tiny), std::invalid_argument);
}

TEST_CASE("dataset hash is stable and content-sensitive") {
  Dataset a = blob_dataset(10, 3);
  Dataset b = blob_dataset(10, 3);
  CHECK(dataset_hash(a) == dataset_hash(b));
  CHECK(dataset_hash(a).size() == 16);
  b.y[0] = b.y[0] == 1.4 ? 5.5 : 1.4;
  CHECK(dataset_hash(a) != dataset_hash(b));
}

TEST_CASE("svm is registered but refuses to train") {
  Dataset d = blob_dataset(5, 1);
  CHECK_THROWS_WITH_AS(train_model(d, all_rows(d), ModelKind::kSvm, ForecastHyper{}, 1),
                       "svm: registered but not implemented", std::runtime_error);
}

TEST_CASE("hyperparameter guards") {
  Dataset d = blob_dataset(5, 1);
  ForecastHyper bad;
  bad.rf_trees = 0;
  CHECK_THROWS_AS(train_model(d, all_rows(d), ModelKind::kRandomForest, bad, 1),
                  std::invalid_argument);
  bad = ForecastHyper{};
  bad.knn_neighbors = 0;
  CHECK_THROWS_AS(train_model(d, all_rows(d), ModelKind::kKnn, bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(train_model(d, {}, ModelKind::kKnn, ForecastHyper{}, 1), std::invalid_argument);
}

TEST_CASE("saved models load back with identical predictions") {
  Dataset d = blob_dataset(40, 21);
  SplitIndices s = stratified_split(d.y, 0.8, 5);
  ForecastHyper hyper;
  hyper.rf_trees = 10;

  SeededRng qgen(13, "roundtrip-queries");
  std::vector<Row> queries;
  for (int i = 0; i < 300; ++i) queries.push_back(random_row(qgen, 4.0));

  for (auto kind : {ModelKind::kRandomForest, ModelKind::kKnn, ModelKind::kLda}) {
    TrainedModel m = train_model(d, s.train, kind, hyper, 7);
    m.split_seed = 5;
    const std::string path = "tmp_model_" + to_string(kind) + ".json";
    save_model(m, path);
    TrainedModel back = load_model(path);
    std::remove(path.c_str());

    CHECK(back.kind == m.kind);
    CHECK(back.labels == m.labels);
    CHECK(back.train_seed == m.train_seed);
    CHECK(back.split_seed == m.split_seed);
    CHECK(back.dataset_hash == m.dataset_hash);
    for (const Row& q : queries) {
      CHECK(back.predict(q) == m.predict(q));  // bitwise identical labels
    }
  }
}

TEST_CASE("model loader rejects broken files") {
  CHECK_THROWS_AS(load_model("tmp_no_such_model.json"), std::runtime_error);

  {
    std::ofstream out("tmp_model_garbage.json");
    out << "not json at all {";
  }
  CHECK_THROWS_AS(load_model("tmp_model_garbage.json"), std::runtime_error);
  std::remove("tmp_model_garbage.json");

  {
    std::ofstream out("tmp_model_format.json");
    out << R"({"format": "something-else", "version": 1})";
  }
  CHECK_THROWS_AS(load_model("tmp_model_format.json"), std::runtime_error);
  std::remove("tmp_model_format.json");

  {
    std::ofstream out("tmp_model_version.json");
    out << R"({"format": "edgesim-model", "version": 2})";
  }
  CHECK_THROWS_AS(load_model("tmp_model_version.json"), std::runtime_error);
  std::remove("tmp_model_version.json");
}
