// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "edgesim/forecast.hpp"

namespace edgesim::detail {

using Row = std::array<double, FeatureVector::kDim>;

DecisionTree build_cart(const std::vector<Row>& x, const std::vector<int>& yc,
                        const std::vector<std::size_t>& sample, int n_classes, int min_leaf,
                        int max_depth);

RandomForestParams train_forest(const std::vector<Row>& x, const std::vector<int>& yc,
                                int n_classes, const ForecastHyper& hyper, std::uint64_t seed);

/// Expects standardized rows.
LdaParams train_lda(const std::vector<Row>& x, const std::vector<int>& yc, int n_classes);

/// Jacobi eigendecomposition of a symmetric matrix: a is overwritten, columns
/// of v hold eigenvectors, returns eigenvalues.
std::vector<double> jacobi_eigen(std::vector<std::vector<double>>& a,
                                 std::vector<std::vector<double>>& v);

}  // namespace edgesim::detail
