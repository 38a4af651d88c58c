// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "edgesim/features.hpp"
#include "edgesim/sim.hpp"

namespace edgesim {

/// Column-labelled training data; x rows parallel y, provenance optional.
struct Dataset {
  std::vector<std::array<double, FeatureVector::kDim>> x;
  std::vector<double> y;  // next-segment bitrate labels
  std::vector<std::uint64_t> run_seeds;
  std::vector<int> player_ids;

  std::size_t size() const { return x.size(); }
  /// Sorted unique labels present in y.
  std::vector<double> label_values() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per-class proportional split; every class with at least one sample keeps
/// at least one test sample when it has two or more.
SplitIndices stratified_split(const std::vector<double>& y, double train_fraction,
                              std::uint64_t split_seed);

enum class ModelKind { kRandomForest, kKnn, kLda, kSvm };
ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind k);

struct ForecastHyper {
  int rf_trees = 100;
  int rf_max_depth = 0;  // 0 = unbounded
  int rf_min_samples_leaf = 2;
  int knn_neighbors = 5;
};

struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;          // class id at leaves
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  int predict_class(const std::array<double, FeatureVector::kDim>& x) const;
};

struct Standardizer {
  std::array<double, FeatureVector::kDim> mean{};
  std::array<double, FeatureVector::kDim> scale{};  // std, floored at tiny
  std::array<double, FeatureVector::kDim> apply(
      const std::array<double, FeatureVector::kDim>& x) const;
};

struct RandomForestParams {
  std::vector<DecisionTree> trees;
};

struct KnnParams {
  std::vector<std::array<double, FeatureVector::kDim>> points;  // standardized
  std::vector<int> classes;
};

struct LdaParams {
  // Linear discriminant per class on standardized features: score = w.x + b.
  std::vector<std::array<double, FeatureVector::kDim>> coef;
  std::vector<double> intercept;
};

struct TrainedModel {
  ModelKind kind = ModelKind::kRandomForest;
  std::vector<double> labels;  // ascending class id -> bitrate
  Standardizer standardizer;   // identity for the forest
  ForecastHyper hyper;
  std::uint64_t train_seed = 0;
  std::uint64_t split_seed = 0;
  std::string dataset_hash;

  RandomForestParams forest;
  KnnParams knn;
  LdaParams lda;

  double predict(const std::array<double, FeatureVector::kDim>& x) const;
  double predict(const FeatureVector& fv) const { return predict(fv.as_array()); }
};

/// Fits the requested classifier on the given rows. Throws
/// std::runtime_error for kinds that are registered but not implemented.
TrainedModel train_model(const Dataset& data, const std::vector<std::size_t>& rows,
                         ModelKind kind, const ForecastHyper& hyper, std::uint64_t seed);

struct ConfusionMatrix {
  std::vector<double> labels;                       // ascending
  std::vector<std::vector<std::uint64_t>> counts;   // [truth][predicted]
  std::vector<std::vector<double>> row_normalized() const;
};

struct EvalResult {
  double accuracy = 0.0;
  double majority_baseline = 0.0;  // share of the most common true label
  std::size_t n = 0;
  ConfusionMatrix confusion;
};

EvalResult evaluate_model(const TrainedModel& model, const Dataset& data,
                          const std::vector<std::size_t>& rows);

/// Pearson correlations over the 7 features plus the label (8x8). Entries
/// involving a constant column are NaN.
std::vector<std::vector<double>> correlation_matrix(const Dataset& data);

/// FNV-1a over the dataset's canonical byte serialization.
std::string dataset_hash(const Dataset& data);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

/// Adapter so a TrainedModel can drive the cache's predictive prefetch.
class ModelPredictor final : public Predictor {
 public:
  explicit ModelPredictor(TrainedModel model) : model_(std::move(model)) {}
  double predict_next_bitrate(const FeatureVector& fv) override { return model_.predict(fv); }
  const TrainedModel& model() const { return model_; }

 private:
  TrainedModel model_;
};

}  // namespace edgesim
