#pragma once

#include "fgmrisk/bernoulli.hpp"
#include "fgmrisk/marginals.hpp"
#include "fgmrisk/portfolio.hpp"
#include "fgmrisk/transform.hpp"

namespace fgmrisk {

/// d lattice marginals on one shared span plus a dependence scheme.
struct DiscretePortfolio {
  std::vector<Discrete> marginals;
  BernoulliScheme scheme;
};

void validate(const DiscretePortfolio& p);

enum class DiscretizationMethod { lower, upper };

struct DiscretizationSpec {
  DiscretizationMethod method = DiscretizationMethod::upper;
  double span = 1.0;
};

/// Lattice approximation of a continuous marginal. The lower method places
/// F(jh) - F((j-1)h) at jh with nothing at zero, so the discretized variable
/// dominates the original stochastically; the upper method places F(h) at
/// zero and F((j+1)h) - F(jh) at jh, so it is dominated. Tails below
/// options.trunc_eps are folded into the last grid point.
Discrete discretize(const Marginal& m, const DiscretizationSpec& spec,
                    const NumericOptions& options = {});

/// pmf of S = X_1 + ... + X_d: per marginal the min/max order-statistic pmfs
/// and their forward transforms, the scheme's expected product per frequency,
/// one inverse transform. Negative masses above -1e-9 are clipped and the
/// result renormalized.
Discrete aggregate_pmf(const DiscretePortfolio& p, const NumericOptions& options = {},
                       detail::TransformDiagnostics* diagnostics = nullptr);

struct RiskMeasures {
  double value_at_risk = 0.0;
  double tail_value_at_risk = 0.0;
};

/// VaR as the smallest grid point with cdf >= kappa; TVaR with the
/// atom-splitting convention so it is continuous in kappa:
/// TVaR = (E[S 1{S > VaR}] + VaR (Pr(S <= VaR) - kappa)) / (1 - kappa).
RiskMeasures risk_measures(const Discrete& pmf, double kappa);

struct TvarSandwich {
  double lower = 0.0;  // TVaR of the upper-method aggregate
  double upper = 0.0;  // TVaR of the lower-method aggregate
};

/// Bounds TVaR_kappa(S) for a portfolio of continuous marginals by
/// discretizing both ways at span h; the interval shrinks as h does.
TvarSandwich tvar_sandwich(const Portfolio& p, double span, double kappa,
                           const NumericOptions& options = {});

}  // namespace fgmrisk
