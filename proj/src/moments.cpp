#include "fgmrisk/moments.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "fgmrisk/numeric.hpp"

namespace fgmrisk {

namespace {

struct MomentTables {
  // raw[k][j] = E[X_k^j]; delta[k][j] = os-min moment ratio - 1 (min form) or
  // 1 - os-max moment ratio (max form); both vanish at j = 0.
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> delta;
};

MomentTables build_tables(const Portfolio& p, int order, MomentForm form) {
  MomentTables t;
  const std::size_t d = p.marginals.size();
  t.raw.assign(d, std::vector<double>(static_cast<std::size_t>(order) + 1, 1.0));
  t.delta.assign(d, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
  for (std::size_t k = 0; k < d; ++k) {
    for (int j = 1; j <= order; ++j) {
      const double raw = moment(p.marginals[k], j);
      t.raw[k][static_cast<std::size_t>(j)] = raw;
      double delta;
      if (form == MomentForm::stochastic_max || form == MomentForm::natural_a2) {
        delta = 1.0 - os_moment(p.marginals[k], OrderStat::max, j) / raw;
      } else {
        delta = os_moment(p.marginals[k], OrderStat::min, j) / raw - 1.0;
      }
      t.delta[k][static_cast<std::size_t>(j)] = delta;
    }
  }
  return t;
}

double composition_count(int order, int d) {
  return std::exp(num::lchoose(static_cast<std::size_t>(order + d - 1),
                               static_cast<std::size_t>(d - 1)));
}

// Dependence factor of one composition under the natural representation:
// 1 + sum over stored subsets of theta_A prod_{n in A} delta_{n, j_n}.
double natural_factor(const FgmCopula& copula, const MomentTables& t,
                      std::span<const int> composition) {
  num::Accumulator acc;
  acc.add(1.0);
  for (const auto& [mask, value] : copula.entries()) {
    if (value == 0.0) continue;
    double prod = value;
    SubsetMask m = mask;
    for (int k = 0; m != 0 && prod != 0.0; ++k, m >>= 1) {
      if (m & 1u) {
        prod *= t.delta[static_cast<std::size_t>(k)]
                       [static_cast<std::size_t>(composition[static_cast<std::size_t>(k)])];
      }
    }
    acc.add(prod);
  }
  return acc.total();
}

}  // namespace

double aggregate_moment(const Portfolio& p, const MomentRequest& request) {
  validate(p);
  const int order = request.order;
  if (order < 1) throw validation_error("aggregate_moment: order must be >= 1");
  const int d = p.dimension();
  if (composition_count(order, d) > static_cast<double>(request.composition_cap)) {
    std::ostringstream os;
    os << "aggregate_moment: " << composition_count(order, d)
       << " compositions exceed the cap " << request.composition_cap;
    throw validation_error(os.str());
  }

  const bool natural =
      request.form == MomentForm::natural_a1 || request.form == MomentForm::natural_a2;
  const MomentTables tables = build_tables(p, order, request.form);

  std::optional<BernoulliScheme> scheme;
  std::optional<FgmCopula> copula;
  if (natural) {
    copula = portfolio_copula(p);
  } else {
    scheme = portfolio_scheme(p);
  }

  std::vector<int> composition(static_cast<std::size_t>(d), 0);
  std::vector<std::pair<double, double>> g(static_cast<std::size_t>(d));
  num::Accumulator total;

  // Lexicographic recursion over j_1 + ... + j_d = order, carrying the
  // multinomial coefficient as the telescoping product of prefix binomials
  // C(j_1 + ... + j_k, j_k) and the product of raw moments.
  auto recurse = [&](auto&& self, int k, int remaining, double coeff, double raw_prod) -> void {
    if (k == d - 1) {
      composition[static_cast<std::size_t>(k)] = remaining;
      const double c =
          coeff * std::exp(num::lchoose(static_cast<std::size_t>(order),
                                        static_cast<std::size_t>(remaining)));
      const double raw =
          raw_prod * tables.raw[static_cast<std::size_t>(k)][static_cast<std::size_t>(remaining)];
      double factor;
      if (natural) {
        factor = natural_factor(*copula, tables, composition);
      } else {
        for (int i = 0; i < d; ++i) {
          const double delta = tables.delta[static_cast<std::size_t>(i)]
                                           [static_cast<std::size_t>(
                                               composition[static_cast<std::size_t>(i)])];
          g[static_cast<std::size_t>(i)] = {1.0 + delta, 1.0 - delta};
        }
        factor = scheme->expected_product<double>(g);
      }
      total.add(c * raw * factor);
      return;
    }
    const int consumed = order - remaining;
    for (int j = 0; j <= remaining; ++j) {
      composition[static_cast<std::size_t>(k)] = j;
      const double c =
          coeff * std::exp(num::lchoose(static_cast<std::size_t>(consumed + j),
                                        static_cast<std::size_t>(j)));
      self(self, k + 1, remaining - j, c,
           raw_prod * tables.raw[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
    }
  };
  recurse(recurse, 0, order, 1.0, 1.0);
  return total.total();
}

double aggregate_moment(const Portfolio& p, int order) {
  return aggregate_moment(p, MomentRequest{.order = order});
}

double covariance(const Portfolio& p, int j, int k) {
  validate(p);
  if (j == k) return variance(p.marginals[static_cast<std::size_t>(j)]);
  const double theta = portfolio_pair_theta(p, j, k);
  const Marginal& mj = p.marginals[static_cast<std::size_t>(j)];
  const Marginal& mk = p.marginals[static_cast<std::size_t>(k)];
  return theta * (mean(mj) - os_moment(mj, OrderStat::min, 1)) *
         (mean(mk) - os_moment(mk, OrderStat::min, 1));
}

double aggregate_variance(const Portfolio& p) {
  const double m1 = aggregate_moment(p, 1);
  return aggregate_moment(p, 2) - m1 * m1;
}

}  // namespace fgmrisk
