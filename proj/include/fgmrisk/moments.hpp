#pragma once

#include <cstddef>

#include "fgmrisk/portfolio.hpp"

namespace fgmrisk {

/// Which representation evaluates the dependence factor of each composition:
/// the stochastic forms mix over the Bernoulli scheme, the natural forms sum
/// over the stored theta subsets.
enum class MomentForm { stochastic_min, stochastic_max, natural_a1, natural_a2 };

struct MomentRequest {
  int order = 1;
  MomentForm form = MomentForm::stochastic_min;
  std::size_t composition_cap = 10'000'000;
};

/// E[S^order] by enumerating the compositions of the order across the
/// coordinates; exact whenever every marginal has closed-form moments and
/// order-statistic moments up to `order`.
double aggregate_moment(const Portfolio& p, const MomentRequest& request);
double aggregate_moment(const Portfolio& p, int order);

/// Cov(X_j, X_k) = theta_{jk} (E[X_j] - mu_{j,min}) (E[X_k] - mu_{k,min}).
double covariance(const Portfolio& p, int j, int k);

/// Var(S) via the aggregate second moment.
double aggregate_variance(const Portfolio& p);

}  // namespace fgmrisk
