// SPDX-License-Identifier: Apache-2.0
#include "edgesim/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "forecast_internal.hpp"

namespace edgesim {

using detail::Row;
using nlohmann::json;

std::vector<double> Dataset::label_values() const {
  std::vector<double> out(y);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "rf") return ModelKind::kRandomForest;
  if (s == "knn") return ModelKind::kKnn;
  if (s == "lda") return ModelKind::kLda;
  if (s == "svm") return ModelKind::kSvm;
  throw std::invalid_argument("unknown model kind: " + s);
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kRandomForest: return "rf";
    case ModelKind::kKnn: return "knn";
    case ModelKind::kLda: return "lda";
    case ModelKind::kSvm: return "svm";
  }
  throw std::logic_error("bad model kind value");
}

SplitIndices stratified_split(const std::vector<double>& y, double train_fraction,
                              std::uint64_t split_seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("stratified_split: train_fraction must be in (0, 1)");
  if (y.empty()) throw std::invalid_argument("stratified_split: empty labels");

  std::map<double, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);

  SeededRng rng(split_seed, "stratified-split");
  SplitIndices out;
  for (auto& [label, idx] : by_class) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.uniform_below(i)]);
    }
    const auto n = idx.size();
    std::size_t n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(n)));
    if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    else n_train = n;
    for (std::size_t i = 0; i < n; ++i) {
      (i < n_train ? out.train : out.test).push_back(idx[i]);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::array<double, FeatureVector::kDim> Standardizer::apply(
    const std::array<double, FeatureVector::kDim>& x) const {
  std::array<double, FeatureVector::kDim> out;
  for (int i = 0; i < FeatureVector::kDim; ++i) {
    const auto j = static_cast<std::size_t>(i);
    out[j] = (x[j] - mean[j]) / scale[j];
  }
  return out;
}

namespace {

Standardizer identity_standardizer() {
  Standardizer s;
  s.mean.fill(0.0);
  s.scale.fill(1.0);
  return s;
}

Standardizer fit_standardizer(const std::vector<Row>& x, const std::vector<std::size_t>& rows) {
  Standardizer s;
  s.mean.fill(0.0);
  s.scale.fill(0.0);
  const double n = static_cast<double>(rows.size());
  for (std::size_t i : rows) {
    for (int j = 0; j < FeatureVector::kDim; ++j) s.mean[static_cast<std::size_t>(j)] += x[i][static_cast<std::size_t>(j)];
  }
  for (auto& m : s.mean) m /= n;
  for (std::size_t i : rows) {
    for (int j = 0; j < FeatureVector::kDim; ++j) {
      const auto k = static_cast<std::size_t>(j);
      const double d = x[i][k] - s.mean[k];
      s.scale[k] += d * d;
    }
  }
  for (auto& v : s.scale) {
    v = std::sqrt(v / n);
    if (v < 1e-12) v = 1.0;  // constant column: leave centered values at zero
  }
  return s;
}

int class_of(const std::vector<double>& labels, double y) {
  auto it = std::lower_bound(labels.begin(), labels.end(), y - 1e-9);
  if (it == labels.end() || std::abs(*it - y) > 1e-9)
    throw std::logic_error("label not in model class set");
  return static_cast<int>(it - labels.begin());
}

int argmax_scores(const std::vector<double>& scores) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(scores.size()); ++c) {
    if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) best = c;
  }
  return best;  // ties resolve to the lower class id
}

}  // namespace

double TrainedModel::predict(const std::array<double, FeatureVector::kDim>& x) const {
  if (labels.empty()) throw std::logic_error("predict: model has no classes");
  const int n_classes = static_cast<int>(labels.size());
  int cls = 0;

  switch (kind) {
    case ModelKind::kRandomForest: {
      std::vector<double> votes(static_cast<std::size_t>(n_classes), 0.0);
      for (const auto& t : forest.trees) ++votes[static_cast<std::size_t>(t.predict_class(x))];
      cls = argmax_scores(votes);
      break;
    }
    case ModelKind::kKnn: {
      const Row q = standardizer.apply(x);
      std::vector<std::pair<double, std::size_t>> dist;
      dist.reserve(knn.points.size());
      for (std::size_t i = 0; i < knn.points.size(); ++i) {
        double d2 = 0.0;
        for (int j = 0; j < FeatureVector::kDim; ++j) {
          const auto k = static_cast<std::size_t>(j);
          const double d = knn.points[i][k] - q[k];
          d2 += d * d;
        }
        dist.emplace_back(d2, i);
      }
      std::sort(dist.begin(), dist.end());
      const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(hyper.knn_neighbors),
                                                  dist.size());
      std::vector<double> votes(static_cast<std::size_t>(n_classes), 0.0);
      for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(knn.classes[dist[i].second])];
      cls = argmax_scores(votes);
      break;
    }
    case ModelKind::kLda: {
      const Row q = standardizer.apply(x);
      std::vector<double> scores(static_cast<std::size_t>(n_classes), 0.0);
      for (int c = 0; c < n_classes; ++c) {
        double s = lda.intercept[static_cast<std::size_t>(c)];
        for (int j = 0; j < FeatureVector::kDim; ++j) {
          const auto jj = static_cast<std::size_t>(j);
          s += lda.coef[static_cast<std::size_t>(c)][jj] * q[jj];
        }
        scores[static_cast<std::size_t>(c)] = s;
      }
      cls = argmax_scores(scores);
      break;
    }
    case ModelKind::kSvm:
      throw std::runtime_error("svm: registered but not implemented");
  }
  return labels[static_cast<std::size_t>(cls)];
}

TrainedModel train_model(const Dataset& data, const std::vector<std::size_t>& rows,
                         ModelKind kind, const ForecastHyper& hyper, std::uint64_t seed) {
  if (rows.empty()) throw std::invalid_argument("train_model: no training rows");
  if (data.x.size() != data.y.size()) throw std::invalid_argument("train_model: ragged dataset");
  if (kind == ModelKind::kSvm) throw std::runtime_error("svm: registered but not implemented");
  if (hyper.rf_trees < 1 || hyper.rf_min_samples_leaf < 1 || hyper.knn_neighbors < 1 ||
      hyper.rf_max_depth < 0)
    throw std::invalid_argument("train_model: bad hyperparameters");

  TrainedModel m;
  m.kind = kind;
  m.hyper = hyper;
  m.train_seed = seed;
  m.dataset_hash = dataset_hash(data);

  {
    std::vector<double> lv;
    lv.reserve(rows.size());
    for (std::size_t i : rows) lv.push_back(data.y[i]);
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    m.labels = std::move(lv);
  }
  const int n_classes = static_cast<int>(m.labels.size());

  std::vector<int> yc(data.y.size(), 0);
  for (std::size_t i : rows) yc[i] = class_of(m.labels, data.y[i]);

  switch (kind) {
    case ModelKind::kRandomForest: {
      m.standardizer = identity_standardizer();
      // Trees index a compacted copy of the training rows.
      std::vector<Row> xs;
      std::vector<int> ys;
      xs.reserve(rows.size());
      ys.reserve(rows.size());
      for (std::size_t i : rows) {
        xs.push_back(data.x[i]);
        ys.push_back(yc[i]);
      }
      m.forest = detail::train_forest(xs, ys, n_classes, hyper, seed);
      break;
    }
    case ModelKind::kKnn: {
      m.standardizer = fit_standardizer(data.x, rows);
      for (std::size_t i : rows) {
        m.knn.points.push_back(m.standardizer.apply(data.x[i]));
        m.knn.classes.push_back(yc[i]);
      }
      break;
    }
    case ModelKind::kLda: {
      m.standardizer = fit_standardizer(data.x, rows);
      std::vector<Row> xs;
      std::vector<int> ys;
      for (std::size_t i : rows) {
        xs.push_back(m.standardizer.apply(data.x[i]));
        ys.push_back(yc[i]);
      }
      m.lda = detail::train_lda(xs, ys, n_classes);
      break;
    }
    case ModelKind::kSvm:
      break;  // unreachable
  }
  return m;
}

std::vector<std::vector<double>> ConfusionMatrix::row_normalized() const {
  std::vector<std::vector<double>> out(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) {
    std::uint64_t total = 0;
    for (std::uint64_t c : counts[r]) total += c;
    out[r].resize(counts[r].size(), 0.0);
    for (std::size_t c = 0; c < counts[r].size(); ++c) {
      out[r][c] = total > 0 ? static_cast<double>(counts[r][c]) / static_cast<double>(total) : 0.0;
    }
  }
  return out;
}

EvalResult evaluate_model(const TrainedModel& model, const Dataset& data,
                          const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw std::invalid_argument("evaluate_model: no rows");

  std::vector<double> labels = model.labels;
  for (std::size_t i : rows) {
    auto it = std::lower_bound(labels.begin(), labels.end(), data.y[i] - 1e-9);
    if (it == labels.end() || std::abs(*it - data.y[i]) > 1e-9) labels.insert(it, data.y[i]);
  }

  auto index_of = [&](double v) {
    auto it = std::lower_bound(labels.begin(), labels.end(), v - 1e-9);
    return static_cast<std::size_t>(it - labels.begin());
  };

  EvalResult res;
  res.n = rows.size();
  res.confusion.labels = labels;
  res.confusion.counts.assign(labels.size(), std::vector<std::uint64_t>(labels.size(), 0));

  std::vector<std::uint64_t> truth_counts(labels.size(), 0);
  std::uint64_t correct = 0;
  for (std::size_t i : rows) {
    const double pred = model.predict(data.x[i]);
    const std::size_t t = index_of(data.y[i]);
    const std::size_t p = index_of(pred);
    ++res.confusion.counts[t][p];
    ++truth_counts[t];
    if (std::abs(pred - data.y[i]) < 1e-9) ++correct;
  }
  res.accuracy = static_cast<double>(correct) / static_cast<double>(res.n);
  res.majority_baseline =
      static_cast<double>(*std::max_element(truth_counts.begin(), truth_counts.end())) /
      static_cast<double>(res.n);
  return res;
}

std::vector<std::vector<double>> correlation_matrix(const Dataset& data) {
  constexpr int kCols = FeatureVector::kDim + 1;
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("correlation_matrix: needs at least 2 rows");

  auto col = [&](int c, std::size_t i) {
    return c < FeatureVector::kDim ? data.x[i][static_cast<std::size_t>(c)] : data.y[i];
  };

  std::array<double, kCols> mean{};
  for (int c = 0; c < kCols; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += col(c, i);
    mean[static_cast<std::size_t>(c)] = s / static_cast<double>(n);
  }
  std::array<double, kCols> dev{};
  for (int c = 0; c < kCols; ++c) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = col(c, i) - mean[static_cast<std::size_t>(c)];
      ss += d * d;
    }
    dev[static_cast<std::size_t>(c)] = std::sqrt(ss);
  }

  std::vector<std::vector<double>> out(kCols, std::vector<double>(kCols, 0.0));
  for (int a = 0; a < kCols; ++a) {
    for (int b = 0; b < kCols; ++b) {
      if (dev[static_cast<std::size_t>(a)] == 0.0 || dev[static_cast<std::size_t>(b)] == 0.0) {
        out[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
            std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += (col(a, i) - mean[static_cast<std::size_t>(a)]) *
             (col(b, i) - mean[static_cast<std::size_t>(b)]);
      }
      out[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          s / (dev[static_cast<std::size_t>(a)] * dev[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

std::string dataset_hash(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t n = data.size();
  mix(&n, sizeof n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    mix(data.x[i].data(), sizeof(double) * FeatureVector::kDim);
    mix(&data.y[i], sizeof(double));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

json tree_to_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
  return nodes;
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree t;
  for (const auto& n : j) {
    t.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                       n.at(3).get<int>(), n.at(4).get<int>()});
  }
  if (t.nodes.empty()) throw std::runtime_error("model file: empty tree");
  return t;
}

template <std::size_t N>
std::array<double, N> array_from_json(const json& j) {
  if (j.size() != N) throw std::runtime_error("model file: bad array length");
  std::array<double, N> a;
  for (std::size_t i = 0; i < N; ++i) a[i] = j.at(i).get<double>();
  return a;
}

}  // namespace

void save_model(const TrainedModel& m, const std::string& path) {
  json j;
  j["format"] = "edgesim-model";
  j["version"] = 1;
  j["kind"] = to_string(m.kind);
  j["labels"] = m.labels;
  j["standardizer"] = {{"mean", m.standardizer.mean}, {"scale", m.standardizer.scale}};
  j["hyper"] = {{"rf_trees", m.hyper.rf_trees},
                {"rf_max_depth", m.hyper.rf_max_depth},
                {"rf_min_samples_leaf", m.hyper.rf_min_samples_leaf},
                {"knn_neighbors", m.hyper.knn_neighbors}};
  j["train_seed"] = m.train_seed;
  j["split_seed"] = m.split_seed;
  j["dataset_hash"] = m.dataset_hash;

  switch (m.kind) {
    case ModelKind::kRandomForest: {
      json trees = json::array();
      for (const auto& t : m.forest.trees) trees.push_back(tree_to_json(t));
      j["forest"] = {{"trees", std::move(trees)}};
      break;
    }
    case ModelKind::kKnn: {
      json pts = json::array();
      for (const auto& p : m.knn.points) pts.push_back(p);
      j["knn"] = {{"points", std::move(pts)}, {"classes", m.knn.classes}};
      break;
    }
    case ModelKind::kLda: {
      json coef = json::array();
      for (const auto& w : m.lda.coef) coef.push_back(w);
      j["lda"] = {{"coef", std::move(coef)}, {"intercept", m.lda.intercept}};
      break;
    }
    case ModelKind::kSvm:
      throw std::runtime_error("svm: registered but not implemented");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing model file: " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("model file " + path + ": " + e.what());
  }

  if (j.value("format", "") != "edgesim-model")
    throw std::runtime_error("model file " + path + ": unrecognized format");
  if (j.value("version", 0) != 1)
    throw std::runtime_error("model file " + path + ": unsupported version");

  TrainedModel m;
  m.kind = model_kind_from_string(j.at("kind").get<std::string>());
  m.labels = j.at("labels").get<std::vector<double>>();
  m.standardizer.mean = array_from_json<FeatureVector::kDim>(j.at("standardizer").at("mean"));
  m.standardizer.scale = array_from_json<FeatureVector::kDim>(j.at("standardizer").at("scale"));
  const json& h = j.at("hyper");
  m.hyper.rf_trees = h.at("rf_trees").get<int>();
  m.hyper.rf_max_depth = h.at("rf_max_depth").get<int>();
  m.hyper.rf_min_samples_leaf = h.at("rf_min_samples_leaf").get<int>();
  m.hyper.knn_neighbors = h.at("knn_neighbors").get<int>();
  m.train_seed = j.at("train_seed").get<std::uint64_t>();
  m.split_seed = j.at("split_seed").get<std::uint64_t>();
  m.dataset_hash = j.at("dataset_hash").get<std::string>();

  switch (m.kind) {
    case ModelKind::kRandomForest:
      for (const auto& t : j.at("forest").at("trees")) m.forest.trees.push_back(tree_from_json(t));
      if (m.forest.trees.empty()) throw std::runtime_error("model file: no trees");
      break;
    case ModelKind::kKnn:
      for (const auto& p : j.at("knn").at("points"))
        m.knn.points.push_back(array_from_json<FeatureVector::kDim>(p));
      m.knn.classes = j.at("knn").at("classes").get<std::vector<int>>();
      if (m.knn.classes.size() != m.knn.points.size())
        throw std::runtime_error("model file: knn points/classes mismatch");
      break;
    case ModelKind::kLda:
      for (const auto& w : j.at("lda").at("coef"))
        m.lda.coef.push_back(array_from_json<FeatureVector::kDim>(w));
      m.lda.intercept = j.at("lda").at("intercept").get<std::vector<double>>();
      if (m.lda.coef.size() != m.labels.size() || m.lda.intercept.size() != m.labels.size())
        throw std::runtime_error("model file: lda shape mismatch");
      break;
    case ModelKind::kSvm:
      throw std::runtime_error("svm: registered but not implemented");
  }
  return m;
}

}  // namespace edgesim
