#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "fgmrisk/errors.hpp"
#include "fgmrisk/options.hpp"

namespace fgmrisk {

struct Exponential {
  double rate;
};

/// Countable mixture of Erlang(j, rate) laws; weights[i] is the mass of
/// shape i + 1 and the sequence is kept truncated.
struct MixedErlang {
  double rate;
  std::vector<double> weights;
};

/// Survival function [1 + ((x - location)/scale)^(1/inequality)]^(-shape)
/// for x > location. Moments of order m exist for m < shape / inequality.
struct ParetoIV {
  double location;
  double scale;
  double inequality;
  double shape;
};

/// Survival function exp(-(rate * x)^shape).
struct Weibull {
  double rate;
  double shape;
};

struct LogNormal {
  double log_mean;
  double log_sd;
};

/// Lattice law on {0, span, 2*span, ...}; masses[j] sits at j * span.
struct Discrete {
  double span;
  std::vector<double> masses;
};

using Marginal = std::variant<Exponential, MixedErlang, ParetoIV, Weibull, LogNormal, Discrete>;

/// Parameter positivity and weight-sum checks; throws validation_error.
void validate(const Marginal& m);
const char* variant_name(const Marginal& m);

double cdf(const Marginal& m, double x);
/// Density of the continuous variants; Discrete raises validation_error.
double pdf(const Marginal& m, double x);
/// Generalized inverse inf{x : F(x) >= u} for u in (0, 1). Closed form where
/// available, otherwise bisection to an absolute tolerance of
/// bisect_tol * max(1, scale of the distribution).
double quantile(const Marginal& m, double u, const NumericOptions& options = {});
double moment(const Marginal& m, int order);
double mean(const Marginal& m);
double variance(const Marginal& m);

enum class OrderStat { min = 1, max = 2 };

/// cdf of the minimum or maximum of two iid copies:
/// F_min = 1 - (1 - F)^2, F_max = F^2.
double os_cdf(const Marginal& m, OrderStat which, double x);

/// Moment of the minimum or maximum of two iid copies. Closed form for
/// Exponential, MixedErlang, ParetoIV and Weibull; LogNormal and Discrete
/// raise validation_error. Weibull uses the true-minimum convention: the
/// minimum of two iid Weibull(rate, shape) is Weibull(2^(1/shape) * rate,
/// shape), and the maximum follows from min + max = 2 E[X^m].
double os_moment(const Marginal& m, OrderStat which, int order);

/// Mixed-Erlang weight sequences of the minimum and maximum of two iid
/// copies, both at rate 2 * m.rate. Truncated at options.trunc_eps tail mass
/// and renormalized; exceeding options.shape_cap raises numeric_error.
std::pair<MixedErlang, MixedErlang> me_order_weights(const MixedErlang& m,
                                                     const NumericOptions& options = {});

/// Re-expresses the same distribution at a higher rate, new_rate >= m.rate.
MixedErlang rescale_rate(const MixedErlang& m, double new_rate,
                         const NumericOptions& options = {});

/// Exact lattice pmf of the minimum or maximum of two iid copies.
Discrete discrete_os_pmf(const Discrete& m, OrderStat which);

/// Exponential wrapped as a single-weight mixture; MixedErlang passed through.
MixedErlang as_mixed_erlang(const Marginal& m);

// Mixed-Erlang law evaluations shared by the aggregation and allocation
// engines. All run in O(weights length) via a mode-anchored Poisson sweep.
double me_cdf(const MixedErlang& m, double x);
double me_pdf(const MixedErlang& m, double x);
double me_lst(const MixedErlang& m, double t);
double me_mean(const MixedErlang& m);
double me_variance(const MixedErlang& m);
double me_value_at_risk(const MixedErlang& m, double kappa, const NumericOptions& options = {});
double me_tail_value_at_risk(const MixedErlang& m, double kappa,
                             const NumericOptions& options = {});

}  // namespace fgmrisk
