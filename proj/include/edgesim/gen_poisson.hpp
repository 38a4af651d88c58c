// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "edgesim/sim.hpp"

namespace edgesim {

/// Generalized Poisson distribution (Consul-Jain form).
///
///   P(k) = theta * (theta + k*lambda)^(k-1) * exp(-(theta + k*lambda)) / k!
///
/// with theta > 0 and 0 <= lambda < 1. lambda = 0 reduces to Poisson(theta).
/// Mean is theta/(1-lambda), variance theta/(1-lambda)^3.
///
/// Sampling tabulates the pmf once, truncating where the cumulative mass
/// exceeds 1 - 1e-12, and draws by inverse CDF.
class GeneralizedPoisson {
 public:
  GeneralizedPoisson(double theta, double lambda);

  double theta() const { return theta_; }
  double lambda() const { return lambda_; }
  double mean() const { return theta_ / (1.0 - lambda_); }
  double variance() const {
    double q = 1.0 - lambda_;
    return theta_ / (q * q * q);
  }

  /// Probability mass at k over the truncated support (0 beyond it).
  double pmf(std::uint64_t k) const {
    return k < pmf_.size() ? pmf_[k] : 0.0;
  }

  /// Largest k carried by the truncated table.
  std::uint64_t support_max() const { return pmf_.empty() ? 0 : pmf_.size() - 1; }

  std::uint64_t sample(SeededRng& rng) const;

 private:
  double theta_;
  double lambda_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// One-shot draw from GeneralizedPoisson(theta, lambda).
std::uint64_t gp_sample(double theta, double lambda, SeededRng& rng);

}  // namespace edgesim
