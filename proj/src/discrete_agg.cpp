#include "fgmrisk/discrete_agg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fgmrisk/aggregate_me.hpp"
#include "fgmrisk/numeric.hpp"

namespace fgmrisk {

void validate(const DiscretePortfolio& p) {
  if (p.marginals.empty()) {
    throw validation_error("DiscretePortfolio: at least one marginal is required");
  }
  if (p.scheme.dimension() != static_cast<int>(p.marginals.size())) {
    throw validation_error("DiscretePortfolio: scheme dimension does not match marginal count");
  }
  const double h = p.marginals.front().span;
  for (const Discrete& m : p.marginals) {
    validate(Marginal{m});
    if (std::abs(m.span - h) > 1e-12 * h) {
      throw validation_error("DiscretePortfolio: marginals must share one span");
    }
  }
}

Discrete discretize(const Marginal& m, const DiscretizationSpec& spec,
                    const NumericOptions& options) {
  validate(m);
  if (!(spec.span > 0.0)) throw validation_error("discretize: span must be positive");
  if (std::holds_alternative<Discrete>(m)) {
    throw validation_error("discretize: marginal is already on a lattice");
  }
  const double h = spec.span;
  const double x_hi = quantile(m, 1.0 - options.trunc_eps, options);
  const auto grid_len = static_cast<std::size_t>(std::ceil(x_hi / h)) + 2;
  if (grid_len > options.grid_cap) {
    std::ostringstream os;
    os << "discretize: " << grid_len << " grid points exceed the cap " << options.grid_cap
       << "; increase the span";
    throw numeric_error(os.str());
  }

  std::vector<double> masses;
  masses.reserve(grid_len);
  if (spec.method == DiscretizationMethod::lower) {
    masses.push_back(0.0);
    double prev = cdf(m, 0.0);
    for (std::size_t j = 1; j < grid_len; ++j) {
      const double next = cdf(m, static_cast<double>(j) * h);
      masses.push_back(next - prev);
      prev = next;
    }
    masses.back() += 1.0 - prev;  // fold the truncated tail
  } else {
    double prev = cdf(m, h);
    masses.push_back(prev);
    for (std::size_t j = 1; j < grid_len; ++j) {
      const double next = cdf(m, static_cast<double>(j + 1) * h);
      masses.push_back(next - prev);
      prev = next;
    }
    masses.back() += 1.0 - prev;
  }
  for (double& x : masses) x = std::max(x, 0.0);
  while (masses.size() > 1 && masses.back() == 0.0) masses.pop_back();
  return Discrete{h, std::move(masses)};
}

Discrete aggregate_pmf(const DiscretePortfolio& p, const NumericOptions& options,
                       detail::TransformDiagnostics* diagnostics) {
  validate(p);
  const std::size_t d = p.marginals.size();
  std::size_t omega = 0;  // common zero-tail index across marginals
  std::size_t support = 0;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  pairs.reserve(d);
  for (const Discrete& m : p.marginals) {
    omega = std::max(omega, m.masses.size());
    support += m.masses.size() - 1;
    pairs.emplace_back(discrete_os_pmf(m, OrderStat::min).masses,
                       discrete_os_pmf(m, OrderStat::max).masses);
  }
  const std::size_t needed = std::max(support + 1, d * (omega - 1) + 1);
  const std::size_t n = detail::choose_dft_length(needed - 1, d * omega, options);

  detail::TransformDiagnostics diag;
  std::vector<double> pmf = detail::dependent_convolution(p.scheme, pairs, n, &diag);
  if (diagnostics != nullptr) *diagnostics = diag;

  pmf.resize(support + 1);  // indices beyond the exact support are transform noise
  num::Accumulator sum;
  for (double x : pmf) sum.add(x);
  if (std::abs(sum.total() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "aggregate_pmf: mass sum " << sum.total() << " drifted from 1";
    throw numeric_error(os.str());
  }
  for (double& x : pmf) x /= sum.total();
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  return Discrete{p.marginals.front().span, std::move(pmf)};
}

RiskMeasures risk_measures(const Discrete& pmf, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw validation_error("risk_measures: level must lie in (0, 1)");
  }
  const std::vector<double>& p = pmf.masses;
  const double h = pmf.span;

  std::size_t var_idx = p.size() - 1;
  double cdf_at_var = 1.0;
  {
    num::Accumulator c;
    for (std::size_t j = 0; j < p.size(); ++j) {
      c.add(p[j]);
      if (c.total() >= kappa) {
        var_idx = j;
        cdf_at_var = std::min(c.total(), 1.0);
        break;
      }
    }
  }
  const double var = static_cast<double>(var_idx) * h;

  // Upper-tail expectation, summed from the top for accuracy.
  num::Accumulator tail;
  for (std::size_t j = p.size(); j-- > var_idx + 1;) {
    tail.add(p[j] * static_cast<double>(j) * h);
  }
  const double tvar = (tail.total() + var * (cdf_at_var - kappa)) / (1.0 - kappa);
  return RiskMeasures{var, std::max(tvar, var)};
}

TvarSandwich tvar_sandwich(const Portfolio& p, double span, double kappa,
                           const NumericOptions& options) {
  validate(p);
  const BernoulliScheme scheme = portfolio_scheme(p);
  const auto aggregate_tvar = [&](DiscretizationMethod method) {
    DiscretePortfolio dp{{}, scheme};
    dp.marginals.reserve(p.marginals.size());
    for (const Marginal& m : p.marginals) {
      dp.marginals.push_back(discretize(m, {method, span}, options));
    }
    return risk_measures(aggregate_pmf(dp, options), kappa).tail_value_at_risk;
  };
  return TvarSandwich{aggregate_tvar(DiscretizationMethod::upper),
                      aggregate_tvar(DiscretizationMethod::lower)};
}

}  // namespace fgmrisk
