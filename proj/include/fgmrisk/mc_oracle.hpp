#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "fgmrisk/portfolio.hpp"

namespace fgmrisk {

/// n x d matrix of portfolio realizations, row-major, with the seed and the
/// generator documented in the Rng class. Replays bit-exactly for one build.
struct SampleBatch {
  std::size_t n = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // row-major

  double value(std::size_t row, int column) const {
    return values[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(column)];
  }
  double row_sum(std::size_t row) const;
};

/// Draws from the portfolio law by the stochastic representation: a scheme
/// draw I per row, then per coordinate a uniform V mapped to
/// U = 1 - sqrt(1 - V) (I_k = 0) or U = sqrt(V) (I_k = 1) and through the
/// marginal quantile. Coordinates use SplitMix-derived substreams.
SampleBatch sample_portfolio(const Portfolio& p, std::size_t n, std::uint64_t seed,
                             const NumericOptions& options = {});

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct MeanOfSum {};
struct VarianceOfSum {};
struct RawMomentOfSum {
  int order = 1;
};
struct CdfAt {
  double x = 0.0;
};
struct TvarAt {
  double kappa = 0.99;
};
/// E[X_k 1{S > threshold}]
struct TailAllocation {
  int k = 0;
  double threshold = 0.0;
};
/// E[X_k | S in (s - half_width, s + half_width)]
struct ConditionalMean {
  int k = 0;
  double s = 0.0;
  double half_width = 0.0;
};

using Statistic = std::variant<MeanOfSum, VarianceOfSum, RawMomentOfSum, CdfAt, TvarAt,
                               TailAllocation, ConditionalMean>;

Estimate estimate(const SampleBatch& batch, const Statistic& statistic);

/// Default conditioning half-width for CMRS checks: 0.25 sd(S) / n^(1/4).
double default_band_half_width(const SampleBatch& batch);

}  // namespace fgmrisk
