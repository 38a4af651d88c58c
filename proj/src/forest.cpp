// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "edgesim/sim.hpp"
#include "forecast_internal.hpp"

namespace edgesim {

int DecisionTree::predict_class(const std::array<double, FeatureVector::kDim>& x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

namespace detail {

namespace {

int majority_class(const std::vector<int>& counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
  }
  return best;  // ties resolve to the lower class id
}

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

Split best_split(const std::vector<Row>& x, const std::vector<int>& yc,
                 const std::vector<std::size_t>& idx, int n_classes, int min_leaf) {
  const int n = static_cast<int>(idx.size());
  Split best;
  std::vector<std::pair<double, int>> col(idx.size());
  std::vector<int> left(static_cast<std::size_t>(n_classes));
  std::vector<int> right(static_cast<std::size_t>(n_classes));

  for (int f = 0; f < FeatureVector::kDim; ++f) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      col[i] = {x[idx[i]][static_cast<std::size_t>(f)], yc[idx[i]]};
    }
    std::sort(col.begin(), col.end());
    if (col.front().first == col.back().first) continue;

    std::fill(left.begin(), left.end(), 0);
    std::fill(right.begin(), right.end(), 0);
    for (const auto& [v, c] : col) ++right[static_cast<std::size_t>(c)];

    for (int i = 1; i < n; ++i) {
      const auto& prev = col[static_cast<std::size_t>(i - 1)];
      ++left[static_cast<std::size_t>(prev.second)];
      --right[static_cast<std::size_t>(prev.second)];
      if (col[static_cast<std::size_t>(i)].first == prev.first) continue;
      if (i < min_leaf || n - i < min_leaf) continue;
      const double g =
          (static_cast<double>(i) * gini(left, i) + static_cast<double>(n - i) * gini(right, n - i)) /
          static_cast<double>(n);
      if (g < best.impurity) {
        double thr = 0.5 * (prev.first + col[static_cast<std::size_t>(i)].first);
        if (!(thr > prev.first)) thr = col[static_cast<std::size_t>(i)].first;
        best = {true, f, thr, g};
      }
    }
  }
  return best;
}

}  // namespace

DecisionTree build_cart(const std::vector<Row>& x, const std::vector<int>& yc,
                        const std::vector<std::size_t>& sample, int n_classes, int min_leaf,
                        int max_depth) {
  DecisionTree tree;

  struct Frame {
    std::vector<std::size_t> idx;
    int depth;
    int node;
  };

  auto class_counts = [&](const std::vector<std::size_t>& idx) {
    std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
    for (std::size_t i : idx) ++counts[static_cast<std::size_t>(yc[i])];
    return counts;
  };

  tree.nodes.push_back({});
  std::vector<Frame> stack;
  stack.push_back({sample, 0, 0});

  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();

    const std::vector<int> counts = class_counts(fr.idx);
    const int present = static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                                       [](int c) { return c > 0; }));
    const bool depth_capped = max_depth > 0 && fr.depth >= max_depth;
    Split split;
    if (present > 1 && !depth_capped && static_cast<int>(fr.idx.size()) >= 2 * min_leaf) {
      split = best_split(x, yc, fr.idx, n_classes, min_leaf);
    }
    if (!split.found) {
      TreeNode& leaf = tree.nodes[static_cast<std::size_t>(fr.node)];
      leaf.feature = -1;
      leaf.label = majority_class(counts);
      continue;
    }

    std::vector<std::size_t> li, ri;
    for (std::size_t i : fr.idx) {
      (x[i][static_cast<std::size_t>(split.feature)] < split.threshold ? li : ri).push_back(i);
    }

    const int left_id = static_cast<int>(tree.nodes.size());
    const int right_id = left_id + 1;
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    TreeNode& node = tree.nodes[static_cast<std::size_t>(fr.node)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.label = majority_class(counts);
    node.left = left_id;
    node.right = right_id;
    stack.push_back({std::move(ri), fr.depth + 1, right_id});
    stack.push_back({std::move(li), fr.depth + 1, left_id});
  }
  return tree;
}

RandomForestParams train_forest(const std::vector<Row>& x, const std::vector<int>& yc,
                                int n_classes, const ForecastHyper& hyper, std::uint64_t seed) {
  RandomForestParams params;
  SeededRng rng(seed, "rf-bootstrap");
  const std::size_t n = x.size();
  params.trees.reserve(static_cast<std::size_t>(hyper.rf_trees));
  for (int t = 0; t < hyper.rf_trees; ++t) {
    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = rng.uniform_below(n);
    params.trees.push_back(
        build_cart(x, yc, sample, n_classes, hyper.rf_min_samples_leaf, hyper.rf_max_depth));
  }
  return params;
}

}  // namespace detail
}  // namespace edgesim
