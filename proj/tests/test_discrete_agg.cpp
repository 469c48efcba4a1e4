#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fgmrisk/aggregate_me.hpp"
#include "fgmrisk/discrete_agg.hpp"
#include "test_support.hpp"

using namespace fgmrisk;

namespace {

// Joint pmf oracle: rectangle probabilities of the copula cdf over the
// lattice, accumulated into the sum's pmf.
std::vector<double> brute_aggregate_pmf(const DiscretePortfolio& p) {
  const int d = static_cast<int>(p.marginals.size());
  std::vector<std::vector<double>> cdfs(static_cast<std::size_t>(d));
  std::size_t support = 1;
  for (int k = 0; k < d; ++k) {
    const auto& masses = p.marginals[static_cast<std::size_t>(k)].masses;
    std::vector<double> c(masses.size() + 1, 0.0);
    for (std::size_t j = 0; j < masses.size(); ++j) c[j + 1] = c[j] + masses[j];
    cdfs[static_cast<std::size_t>(k)] = std::move(c);
    support += masses.size() - 1;
  }
  std::vector<double> out(support, 0.0);
  std::vector<std::size_t> point(static_cast<std::size_t>(d), 0);
  std::vector<double> corner(static_cast<std::size_t>(d));
  const auto lattice_mass = [&]() {
    // Inclusion-exclusion over the cell corners.
    double mass = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      int sign = 1;
      for (int k = 0; k < d; ++k) {
        const std::size_t j = point[static_cast<std::size_t>(k)];
        if ((mask >> k) & 1u) {
          corner[static_cast<std::size_t>(k)] =
              std::min(cdfs[static_cast<std::size_t>(k)][j], 1.0);
        } else {
          corner[static_cast<std::size_t>(k)] =
              std::min(cdfs[static_cast<std::size_t>(k)][j + 1], 1.0);
          sign = -sign;
        }
      }
      mass += (std::popcount(mask) % 2 == 0 ? 1.0 : -1.0) * cdf(p.scheme, corner);
      (void)sign;
    }
    return mass;
  };
  bool done = false;
  while (!done) {
    std::size_t total = 0;
    for (int k = 0; k < d; ++k) total += point[static_cast<std::size_t>(k)];
    out[total] += lattice_mass();
    int k = 0;
    for (; k < d; ++k) {
      auto& j = point[static_cast<std::size_t>(k)];
      if (j + 1 < p.marginals[static_cast<std::size_t>(k)].masses.size()) {
        ++j;
        break;
      }
      j = 0;
    }
    done = k == d;
  }
  return out;
}

}  // namespace

TEST_CASE("discretization examples") {
  const Marginal e = Exponential{1.0};
  const Discrete upper = discretize(e, {DiscretizationMethod::upper, 1.0});
  CHECK(upper.masses[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  const Discrete lower = discretize(e, {DiscretizationMethod::lower, 1.0});
  CHECK(lower.masses[0] == 0.0);
  CHECK(lower.masses[1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

  // Lattice cdfs bracket the exact cdf.
  for (const Marginal& m :
       {Marginal{Weibull{0.3, 1.4}}, Marginal{LogNormal{1.0, 0.6}}, e}) {
    for (double h : {0.5, 0.25}) {
      const Discrete lo = discretize(m, {DiscretizationMethod::lower, h});
      const Discrete hi = discretize(m, {DiscretizationMethod::upper, h});
      for (double x : fgmtest::linspace(0.0, quantile(m, 0.995), 40)) {
        const double f = cdf(m, x);
        CHECK(cdf(Marginal{lo}, x) <= f + 1e-9);
        CHECK(cdf(Marginal{hi}, x) >= f - 1e-9);
      }
      double sum_lo = 0.0, sum_hi = 0.0;
      for (double v : lo.masses) sum_lo += v;
      for (double v : hi.masses) sum_hi += v;
      CHECK(sum_lo == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(sum_hi == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(discretize(Marginal{Discrete{1.0, {1.0}}}, {DiscretizationMethod::upper, 1.0}),
                  validation_error);
}

TEST_CASE("aggregate pmf closed examples") {
  // Two iid Bernoulli(1/2) lattice variables, independent: (1/4, 1/2, 1/4).
  const Discrete bern{1.0, {0.5, 0.5}};
  {
    const DiscretePortfolio p{{bern, bern}, BernoulliScheme::independent(2)};
    const Discrete s = aggregate_pmf(p);
    REQUIRE(s.masses.size() == 3);
    CHECK(s.masses[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.masses[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.masses[2] == doctest::Approx(0.25).epsilon(1e-12));
  }
  {
    // theta = 1 (comonotone mixing): (5/16, 6/16, 5/16).
    const DiscretePortfolio p{{bern, bern}, BernoulliScheme::comonotone(2)};
    const Discrete s = aggregate_pmf(p);
    REQUIRE(s.masses.size() == 3);
    CHECK(s.masses[0] == doctest::Approx(5.0 / 16.0).epsilon(1e-12));
    CHECK(s.masses[1] == doctest::Approx(6.0 / 16.0).epsilon(1e-12));
    CHECK(s.masses[2] == doctest::Approx(5.0 / 16.0).epsilon(1e-12));
  }
}

TEST_CASE("aggregate pmf against the rectangle-probability oracle") {
  Rng rng(808);
  for (int d : {2, 3, 4}) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<Discrete> marginals;
      for (int k = 0; k < d; ++k) {
        const std::size_t len = 2 + rng.next_below(5);  // omega <= 6
        std::vector<double> masses(len);
        double sum = 0.0;
        for (double& x : masses) {
          x = 0.05 + rng.next_uniform();
          sum += x;
        }
        for (double& x : masses) x /= sum;
        marginals.push_back(Discrete{1.0, std::move(masses)});
      }
      const std::vector<BernoulliScheme> schemes{
          fgmtest::random_dense_scheme(d, rng), BernoulliScheme::markov(d, -0.4),
          BernoulliScheme::end(d)};
      for (const auto& scheme : schemes) {
        const DiscretePortfolio p{marginals, scheme};
        const std::vector<double> expected = brute_aggregate_pmf(p);
        const Discrete got = aggregate_pmf(p);
        REQUIRE(got.masses.size() <= expected.size());
        for (std::size_t j = 0; j < expected.size(); ++j) {
          const double g = j < got.masses.size() ? got.masses[j] : 0.0;
          CHECK(g == doctest::Approx(expected[j]).epsilon(1e-9).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("aggregate pmf mean is dependence-invariant") {
  const std::vector<Discrete> marginals{Discrete{0.5, {0.2, 0.5, 0.3}},
                                        Discrete{0.5, {0.6, 0.1, 0.2, 0.1}},
                                        Discrete{0.5, {0.1, 0.9}}};
  double mean_sum = 0.0;
  for (const auto& m : marginals) mean_sum += mean(Marginal{m});
  for (const auto& scheme :
       {BernoulliScheme::independent(3), BernoulliScheme::comonotone(3),
        BernoulliScheme::end(3), BernoulliScheme::markov(3, 0.8)}) {
    const Discrete s = aggregate_pmf({marginals, scheme});
    double total = 0.0, mu = 0.0;
    for (std::size_t j = 0; j < s.masses.size(); ++j) {
      CHECK(s.masses[j] >= 0.0);
      total += s.masses[j];
      mu += s.masses[j] * static_cast<double>(j) * s.span;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mu == doctest::Approx(mean_sum).epsilon(1e-9));
  }
}

TEST_CASE("discrete risk measures") {
  // Point mass: VaR = TVaR = c.
  const Discrete point{2.5, {0.0, 0.0, 1.0}};
  for (double kappa : {0.1, 0.5, 0.99}) {
    const RiskMeasures rm = risk_measures(point, kappa);
    CHECK(rm.value_at_risk == doctest::Approx(5.0));
    CHECK(rm.tail_value_at_risk == doctest::Approx(5.0));
  }
  // Hand enumeration on (1/4, 1/2, 1/4).
  const Discrete tri{1.0, {0.25, 0.5, 0.25}};
  const RiskMeasures rm = risk_measures(tri, 0.9);
  CHECK(rm.value_at_risk == doctest::Approx(2.0));
  CHECK(rm.tail_value_at_risk == doctest::Approx(2.0));
  // Atom splitting: kappa = 0.5 sits inside the middle atom.
  const RiskMeasures mid = risk_measures(tri, 0.5);
  CHECK(mid.value_at_risk == doctest::Approx(1.0));
  // (E[S 1{S>1}] + 1 * (0.75 - 0.5)) / 0.5 = (0.5 + 0.25) / 0.5 = 1.5
  CHECK(mid.tail_value_at_risk == doctest::Approx(1.5).epsilon(1e-12));
  // TVaR at kappa -> 0 approaches the mean.
  CHECK(risk_measures(tri, 1e-12).tail_value_at_risk == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(risk_measures(tri, 0.0), validation_error);
}

TEST_CASE("tvar sandwich properties") {
  const Portfolio p{{Marginal{MixedErlang{0.5, {0.4, 0.4, 0.2}}},
                     Marginal{Exponential{0.25}}, Marginal{Exponential{0.4}}},
                    BernoulliScheme::markov(3, 0.5)};
  const AggregateME exact = aggregate(p);
  const double kappa = 0.9;
  const double exact_tvar = exact.tail_value_at_risk(kappa);
  double prev_lo = 0.0, prev_hi = 1e300;
  for (double h : {1.0, 0.5}) {
    const TvarSandwich sw = tvar_sandwich(p, h, kappa);
    CHECK(sw.lower <= exact_tvar + 1e-9);
    CHECK(sw.upper >= exact_tvar - 1e-9);
    // Interval shrinks as the span does.
    CHECK(sw.lower >= prev_lo - 1e-9);
    CHECK(sw.upper <= prev_hi + 1e-9);
    prev_lo = sw.lower;
    prev_hi = sw.upper;
  }
}

TEST_CASE("sandwich cdf ordering on the grid") {
  const Portfolio p{{Marginal{Exponential{0.3}}, Marginal{Weibull{0.2, 1.3}}},
                    BernoulliScheme::markov(2, 0.4)};
  const double h = 0.5;
  const BernoulliScheme scheme = portfolio_scheme(p);
  DiscretePortfolio lo{{}, scheme}, hi{{}, scheme};
  for (const auto& m : p.marginals) {
    lo.marginals.push_back(discretize(m, {DiscretizationMethod::lower, h}));
    hi.marginals.push_back(discretize(m, {DiscretizationMethod::upper, h}));
  }
  const Discrete slo = aggregate_pmf(lo);
  const Discrete shi = aggregate_pmf(hi);
  double clo = 0.0, chi = 0.0;
  for (std::size_t j = 0; j < std::max(slo.masses.size(), shi.masses.size()); ++j) {
    clo += j < slo.masses.size() ? slo.masses[j] : 0.0;
    chi += j < shi.masses.size() ? shi.masses[j] : 0.0;
    CHECK(chi >= clo - 1e-9);  // upper-method cdf dominates pointwise
  }
}
