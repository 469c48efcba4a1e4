#include "fgmrisk/portfolio.hpp"

#include <array>

#include "fgmrisk/numeric.hpp"

namespace fgmrisk {

void validate(const Portfolio& p) {
  if (p.marginals.empty()) {
    throw validation_error("Portfolio: at least one marginal is required");
  }
  for (const Marginal& m : p.marginals) validate(m);
  const int dep_dim = std::visit([](const auto& d) { return d.dimension(); }, p.dependence);
  if (dep_dim != p.dimension()) {
    throw validation_error("Portfolio: dependence dimension does not match marginal count");
  }
}

BernoulliScheme portfolio_scheme(const Portfolio& p) {
  if (const auto* s = std::get_if<BernoulliScheme>(&p.dependence)) return *s;
  return scheme_from_theta(std::get<FgmCopula>(p.dependence));
}

FgmCopula portfolio_copula(const Portfolio& p) {
  if (const auto* c = std::get_if<FgmCopula>(&p.dependence)) return *c;
  return theta_from_scheme(std::get<BernoulliScheme>(p.dependence));
}

double portfolio_pair_theta(const Portfolio& p, int j, int k) {
  if (j == k || j < 0 || k < 0 || j >= p.dimension() || k >= p.dimension()) {
    throw validation_error("portfolio_pair_theta: invalid coordinate pair");
  }
  const std::array<int, 2> pair{std::min(j, k), std::max(j, k)};
  if (const auto* c = std::get_if<FgmCopula>(&p.dependence)) return c->theta(pair);
  // theta_{jk} = (-2)^2 E[(I_j - 1/2)(I_k - 1/2)]
  return 4.0 * std::get<BernoulliScheme>(p.dependence).central_mixed_moment(pair);
}

namespace {

std::uint64_t hash_marginal(std::uint64_t h, const Marginal& m) {
  h = num::hash_u64(h, static_cast<std::uint64_t>(m.index()));
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
          h = num::hash_double(h, v.rate);
        } else if constexpr (std::is_same_v<V, MixedErlang>) {
          h = num::hash_double(h, v.rate);
          for (double w : v.weights) h = num::hash_double(h, w);
        } else if constexpr (std::is_same_v<V, ParetoIV>) {
          h = num::hash_double(h, v.location);
          h = num::hash_double(h, v.scale);
          h = num::hash_double(h, v.inequality);
          h = num::hash_double(h, v.shape);
        } else if constexpr (std::is_same_v<V, Weibull>) {
          h = num::hash_double(h, v.rate);
          h = num::hash_double(h, v.shape);
        } else if constexpr (std::is_same_v<V, LogNormal>) {
          h = num::hash_double(h, v.log_mean);
          h = num::hash_double(h, v.log_sd);
        } else {
          h = num::hash_double(h, v.span);
          for (double w : v.masses) h = num::hash_double(h, w);
        }
      },
      m);
  return h;
}

std::uint64_t hash_scheme(std::uint64_t h, const BernoulliScheme& s) {
  h = num::hash_u64(h, static_cast<std::uint64_t>(s.dimension()));
  h = num::hash_u64(h, static_cast<std::uint64_t>(s.variant().index()));
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, BernoulliScheme::Dense>) {
          for (double m : v.mass) h = num::hash_double(h, m);
        } else if constexpr (std::is_same_v<V, BernoulliScheme::Exchangeable>) {
          for (double m : v.count_pmf) h = num::hash_double(h, m);
        } else if constexpr (std::is_same_v<V, BernoulliScheme::Markov>) {
          h = num::hash_double(h, v.alpha);
        }
      },
      s.variant());
  return h;
}

}  // namespace

std::uint64_t portfolio_hash(const Portfolio& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const Marginal& m : p.marginals) h = hash_marginal(h, m);
  if (const auto* s = std::get_if<BernoulliScheme>(&p.dependence)) {
    h = hash_scheme(h, *s);
  } else {
    const auto& c = std::get<FgmCopula>(p.dependence);
    h = num::hash_u64(h, static_cast<std::uint64_t>(c.dimension()));
    for (const auto& [mask, value] : c.entries()) {
      h = num::hash_u64(h, mask);
      h = num::hash_double(h, value);
    }
  }
  return h;
}

}  // namespace fgmrisk
