// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forecast_internal.hpp"

namespace edgesim::detail {

std::vector<double> jacobi_eigen(std::vector<std::vector<double>>& a,
                                 std::vector<std::vector<double>>& v) {
  const std::size_t n = a.size();
  v.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  return eig;
}

LdaParams train_lda(const std::vector<Row>& x, const std::vector<int>& yc, int n_classes) {
  constexpr int d = FeatureVector::kDim;
  const std::size_t n = x.size();
  if (static_cast<int>(n) <= n_classes)
    throw std::invalid_argument("lda: needs more samples than classes");

  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  std::vector<std::array<double, d>> means(static_cast<std::size_t>(n_classes));
  for (auto& m : means) m.fill(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(yc[i]);
    ++counts[c];
    for (int j = 0; j < d; ++j) means[c][static_cast<std::size_t>(j)] += x[i][static_cast<std::size_t>(j)];
  }
  for (std::size_t c = 0; c < means.size(); ++c) {
    if (counts[c] == 0) throw std::invalid_argument("lda: empty class");
    for (int j = 0; j < d; ++j) means[c][static_cast<std::size_t>(j)] /= static_cast<double>(counts[c]);
  }

  // Pooled within-class covariance.
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mu = means[static_cast<std::size_t>(yc[i])];
    for (int a = 0; a < d; ++a) {
      const double da = x[i][static_cast<std::size_t>(a)] - mu[static_cast<std::size_t>(a)];
      for (int b = a; b < d; ++b) {
        const double db = x[i][static_cast<std::size_t>(b)] - mu[static_cast<std::size_t>(b)];
        cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += da * db;
      }
    }
  }
  const double denom = static_cast<double>(n) - static_cast<double>(n_classes);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] /= denom;
      cov[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
          cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
  }

  // Pseudo-inverse via eigendecomposition, dropping near-null directions.
  std::vector<std::vector<double>> vecs;
  std::vector<double> eig = jacobi_eigen(cov, vecs);
  double eig_max = 0.0;
  for (double e : eig) eig_max = std::max(eig_max, std::abs(e));
  const double tol = eig_max > 0.0 ? eig_max * 1e-10 : 1.0;

  std::vector<std::vector<double>> pinv(d, std::vector<double>(d, 0.0));
  for (int k = 0; k < d; ++k) {
    if (std::abs(eig[static_cast<std::size_t>(k)]) <= tol) continue;
    const double inv = 1.0 / eig[static_cast<std::size_t>(k)];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        pinv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
            inv * vecs[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] *
            vecs[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
      }
    }
  }

  LdaParams params;
  params.coef.resize(static_cast<std::size_t>(n_classes));
  params.intercept.resize(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    auto& w = params.coef[static_cast<std::size_t>(c)];
    w.fill(0.0);
    const auto& mu = means[static_cast<std::size_t>(c)];
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        w[static_cast<std::size_t>(a)] += pinv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                                          mu[static_cast<std::size_t>(b)];
      }
    }
    double dot = 0.0;
    for (int a = 0; a < d; ++a) dot += mu[static_cast<std::size_t>(a)] * w[static_cast<std::size_t>(a)];
    const double prior = static_cast<double>(counts[static_cast<std::size_t>(c)]) / static_cast<double>(n);
    params.intercept[static_cast<std::size_t>(c)] = -0.5 * dot + std::log(prior);
  }
  return params;
}

}  // namespace edgesim::detail
