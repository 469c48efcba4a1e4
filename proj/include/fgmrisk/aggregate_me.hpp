#pragma once

#include <cstdint>
#include <span>

#include "fgmrisk/marginals.hpp"
#include "fgmrisk/portfolio.hpp"

namespace fgmrisk {

/// Exact law of S = X_1 + ... + X_d for a mixed-Erlang portfolio, itself a
/// mixed Erlang at twice the unified marginal rate.
struct AggregateME {
  MixedErlang law;

  struct Provenance {
    std::uint64_t portfolio_hash = 0;
    double trunc_eps = 0.0;
    std::size_t dft_length = 0;
    double min_raw_weight = 0.0;
    double max_imag_residue = 0.0;
    double raw_weight_sum = 0.0;
  };
  Provenance provenance;

  double mean() const { return me_mean(law); }
  double variance() const { return me_variance(law); }
  double cdf(double x) const { return me_cdf(law, x); }
  double pdf(double x) const { return me_pdf(law, x); }
  double lst(double t) const { return me_lst(law, t); }
  double value_at_risk(double kappa, const NumericOptions& options = {}) const {
    return me_value_at_risk(law, kappa, options);
  }
  double tail_value_at_risk(double kappa, const NumericOptions& options = {}) const {
    return me_tail_value_at_risk(law, kappa, options);
  }
};

/// Aggregates a portfolio whose marginals are Exponential or MixedErlang
/// (rates unified by rescaling to the largest one). The aggregate weights are
/// computed in transform space: per-coordinate order-statistic weight pairs,
/// one forward transform each, the scheme's expected product per node, one
/// inverse transform.
AggregateME aggregate(const Portfolio& p, const NumericOptions& options = {});

/// Fast path for d iid Exponential(rate) marginals: only the law of
/// N = sum I_k enters, and the aggregate shape count is d plus a sum of N
/// shifted-geometric(1/2) counts.
AggregateME exp_iid_fast(int dimension, double rate, std::span<const double> count_pmf,
                         const NumericOptions& options = {});
AggregateME exp_iid_fast(int dimension, double rate, const BernoulliScheme& scheme,
                         const NumericOptions& options = {});

namespace detail {
/// Order-statistic weight pairs of all marginals after unifying rates; the
/// shared front end of the aggregation and allocation engines. Returns the
/// unified marginal rate through `unified_rate`.
std::vector<std::pair<MixedErlang, MixedErlang>> unified_order_weights(
    const Portfolio& p, const NumericOptions& options, double* unified_rate);

/// Transform length for value-indexed pmf vectors with the given maximal
/// support index; at least support+1 and at least d*omega, rounded to a power
/// of two.
std::size_t choose_dft_length(std::size_t support, std::size_t d_times_omega,
                              const NumericOptions& options);
}  // namespace detail

}  // namespace fgmrisk
