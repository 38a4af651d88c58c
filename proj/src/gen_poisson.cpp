// SPDX-License-Identifier: Apache-2.0
#include "edgesim/gen_poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

GeneralizedPoisson::GeneralizedPoisson(double theta, double lambda)
    : theta_(theta), lambda_(lambda) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("GeneralizedPoisson: theta must be > 0");
  }
  if (!(lambda >= 0.0) || lambda >= 1.0) {
    throw std::invalid_argument("GeneralizedPoisson: lambda must be in [0, 1)");
  }

  // log P(k) = log(theta) + (k-1)*log(theta + k*lambda) - (theta + k*lambda) - lgamma(k+1)
  const double target = 1.0 - 1e-12;
  const std::uint64_t hard_cap = 1u << 20;
  double cum = 0.0;
  for (std::uint64_t k = 0; k < hard_cap; ++k) {
    double kk = static_cast<double>(k);
    double logp = std::log(theta_) + (kk - 1.0) * std::log(theta_ + kk * lambda_) -
                  (theta_ + kk * lambda_) - std::lgamma(kk + 1.0);
    double p = std::exp(logp);
    pmf_.push_back(p);
    cum += p;
    cdf_.push_back(cum);
    if (cum >= target) break;
  }
  if (cdf_.empty() || cdf_.back() < target) {
    throw std::runtime_error("GeneralizedPoisson: pmf tabulation failed to converge");
  }
}

std::uint64_t GeneralizedPoisson::sample(SeededRng& rng) const {
  double u = rng.uniform01() * cdf_.back();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return cdf_.size() - 1;
  return static_cast<std::uint64_t>(it - cdf_.begin());
}

std::uint64_t gp_sample(double theta, double lambda, SeededRng& rng) {
  return GeneralizedPoisson(theta, lambda).sample(rng);
}

}  // namespace edgesim
