#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "fgmrisk/copula.hpp"
#include "fgmrisk/marginals.hpp"

namespace fgmrisk {

/// d marginals plus one dependence structure, the unit every aggregation and
/// allocation operation consumes. The dependence is either a Bernoulli scheme
/// (stochastic form) or a natural-parameter copula.
struct Portfolio {
  std::vector<Marginal> marginals;
  std::variant<BernoulliScheme, FgmCopula> dependence;

  int dimension() const { return static_cast<int>(marginals.size()); }
};

/// Validates marginal parameters and the dependence dimension.
void validate(const Portfolio& p);

/// Dependence as a scheme; bridges natural parameters through the dense
/// reconstruction (dimension <= 20) when needed.
BernoulliScheme portfolio_scheme(const Portfolio& p);

/// Dependence as natural parameters; bridges schemes through the central
/// mixed moments when needed.
FgmCopula portfolio_copula(const Portfolio& p);

/// theta of a coordinate pair, regardless of the dependence form.
double portfolio_pair_theta(const Portfolio& p, int j, int k);

/// Cheap content hash for provenance records.
std::uint64_t portfolio_hash(const Portfolio& p);

}  // namespace fgmrisk
