#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fgmrisk/mc_oracle.hpp"
#include "fgmrisk/moments.hpp"
#include "test_support.hpp"

using namespace fgmrisk;

namespace {

const std::vector<MomentForm> kAllForms{MomentForm::stochastic_min,
                                        MomentForm::stochastic_max,
                                        MomentForm::natural_a1, MomentForm::natural_a2};

}  // namespace

TEST_CASE("first moment ignores dependence") {
  const std::vector<Marginal> marginals{
      Marginal{Exponential{0.5}}, Marginal{Weibull{0.25, 1.3}},
      Marginal{ParetoIV{0.0, 2.0, 0.5, 4.0}}, Marginal{MixedErlang{1.0, {0.7, 0.3}}}};
  double expected = 0.0;
  for (const auto& m : marginals) expected += mean(m);
  for (const auto& scheme :
       {BernoulliScheme::independent(4), BernoulliScheme::comonotone(4),
        BernoulliScheme::end(4), BernoulliScheme::markov(4, -0.9)}) {
    const Portfolio p{marginals, scheme};
    CHECK(aggregate_moment(p, 1) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("bivariate FGM exponential second moment") {
  // d=2 iid Exp(1), theta = 1: E[X1 X2] = 1 + theta/4, so E[S^2] = 6.5.
  const Portfolio p{{Marginal{Exponential{1.0}}, Marginal{Exponential{1.0}}},
                    FgmCopula(2, {{0b11, 1.0}})};
  for (MomentForm form : kAllForms) {
    CHECK(aggregate_moment(p, MomentRequest{2, form}) ==
          doctest::Approx(6.5).epsilon(1e-12));
  }
}

TEST_CASE("representation agreement on random admissible portfolios") {
  Rng rng(404);
  for (int d : {2, 4, 6, 8}) {
    const BernoulliScheme scheme = fgmtest::random_dense_scheme(d, rng);
    std::vector<Marginal> marginals;
    for (int k = 0; k < d; ++k) {
      switch (k % 3) {
        case 0:
          marginals.push_back(Marginal{Exponential{0.2 + rng.next_uniform()}});
          break;
        case 1:
          marginals.push_back(
              Marginal{Weibull{0.5 + rng.next_uniform(), 0.8 + rng.next_uniform()}});
          break;
        default:
          marginals.push_back(Marginal{ParetoIV{0.0, 1.0 + rng.next_uniform(), 0.5, 6.0}});
      }
    }
    const Portfolio p{marginals, scheme};
    for (int order = 1; order <= 4; ++order) {
      const double min_form =
          aggregate_moment(p, MomentRequest{order, MomentForm::stochastic_min});
      const double max_form =
          aggregate_moment(p, MomentRequest{order, MomentForm::stochastic_max});
      const double a1 = aggregate_moment(p, MomentRequest{order, MomentForm::natural_a1});
      const double a2 = aggregate_moment(p, MomentRequest{order, MomentForm::natural_a2});
      CHECK(min_form == doctest::Approx(max_form).epsilon(1e-12));
      CHECK(a1 == doctest::Approx(min_form).epsilon(1e-10));
      CHECK(a2 == doctest::Approx(min_form).epsilon(1e-10));
    }
  }
}

TEST_CASE("pareto existence guard propagates") {
  const Portfolio p{{Marginal{ParetoIV{0.0, 1.0, 1.0, 3.0}}, Marginal{Exponential{1.0}}},
                    BernoulliScheme::independent(2)};
  CHECK_NOTHROW(aggregate_moment(p, 2));
  CHECK_THROWS_AS(aggregate_moment(p, 3), validation_error);
}

TEST_CASE("composition cap") {
  const Portfolio p{std::vector<Marginal>(30, Marginal{Exponential{1.0}}),
                    BernoulliScheme::independent(30)};
  CHECK_THROWS_AS(aggregate_moment(p, MomentRequest{8, MomentForm::stochastic_min, 1000}),
                  validation_error);
}

TEST_CASE("covariance closed form") {
  // Independence: zero.
  const Portfolio ind{{Marginal{Exponential{0.5}}, Marginal{Exponential{0.25}}},
                      BernoulliScheme::independent(2)};
  CHECK(covariance(ind, 0, 1) == 0.0);

  // iid Exp(beta) with theta: cov = theta / (4 beta^2).
  for (double theta : {-0.8, 0.3, 1.0}) {
    const double beta = 0.4;
    const Portfolio p{{Marginal{Exponential{beta}}, Marginal{Exponential{beta}}},
                      FgmCopula(2, {{0b11, theta}})};
    CHECK(covariance(p, 0, 1) ==
          doctest::Approx(theta / (4.0 * beta * beta)).epsilon(1e-12));
    // Var(S) = 2/beta^2 + 2 cov, cross-checked through the moment engine.
    CHECK(aggregate_variance(p) ==
          doctest::Approx(2.0 / (beta * beta) + theta / (2.0 * beta * beta))
              .epsilon(1e-10));
  }

  // Weibull with shape 1 reduces to the exponential value.
  const Portfolio w{{Marginal{Weibull{0.4, 1.0}}, Marginal{Weibull{0.4, 1.0}}},
                    FgmCopula(2, {{0b11, 0.6}})};
  CHECK(covariance(w, 0, 1) == doctest::Approx(0.6 / (4.0 * 0.16)).epsilon(1e-10));

  // Symmetry.
  const Portfolio mixed{{Marginal{Exponential{0.5}}, Marginal{Weibull{0.3, 1.4}}},
                        FgmCopula(2, {{0b11, -0.5}})};
  CHECK(covariance(mixed, 0, 1) == doctest::Approx(covariance(mixed, 1, 0)));
  CHECK(covariance(mixed, 0, 1) < 0.0);
}

TEST_CASE("variance against monte carlo for the bivariate FGM") {
  const Portfolio p{{Marginal{Exponential{1.0}}, Marginal{Exponential{1.0}}},
                    FgmCopula(2, {{0b11, 1.0}})};
  // Var(S) = 2 + 2 * (1/4) = 2.5.
  CHECK(aggregate_variance(p) == doctest::Approx(2.5).epsilon(1e-12));
  const SampleBatch batch = sample_portfolio(p, 1000000, 99);
  const Estimate v = estimate(batch, VarianceOfSum{});
  CHECK(std::abs(v.value - 2.5) < 4.0 * v.std_error);
}

TEST_CASE("weibull odd-order sign resolution against the sampler") {
  // d=3 with a nonzero triple theta: the third aggregate moment picks up the
  // (1,1,1) composition whose sign depends on the order-statistic convention.
  const double tau = 0.7;
  const std::vector<Marginal> marginals(3, Marginal{Weibull{1.0, tau}});
  const FgmCopula copula(3, {{0b011, 0.3}, {0b101, 0.2}, {0b110, 0.25}, {0b111, 0.5}});
  REQUIRE(copula.admissible().value());
  const Portfolio p{marginals, copula};

  const double analytic = aggregate_moment(p, MomentRequest{3, MomentForm::stochastic_min});

  // Independent recomputation with the opposite (flipped-delta) convention.
  double flipped = 0.0;
  {
    const BernoulliScheme scheme = portfolio_scheme(p);
    std::vector<double> raw(4), delta(4);
    for (int j = 0; j <= 3; ++j) {
      raw[static_cast<std::size_t>(j)] = moment(marginals[0], j);
      delta[static_cast<std::size_t>(j)] =
          j == 0 ? 0.0
                 : -(os_moment(marginals[0], OrderStat::min, j) /
                         raw[static_cast<std::size_t>(j)] -
                     1.0);
    }
    for (int j1 = 0; j1 <= 3; ++j1) {
      for (int j2 = 0; j1 + j2 <= 3; ++j2) {
        const int j3 = 3 - j1 - j2;
        const double multinomial =
            6.0 / (std::tgamma(j1 + 1.0) * std::tgamma(j2 + 1.0) * std::tgamma(j3 + 1.0));
        const std::vector<std::pair<double, double>> g{
            {1.0 + delta[static_cast<std::size_t>(j1)], 1.0 - delta[static_cast<std::size_t>(j1)]},
            {1.0 + delta[static_cast<std::size_t>(j2)], 1.0 - delta[static_cast<std::size_t>(j2)]},
            {1.0 + delta[static_cast<std::size_t>(j3)], 1.0 - delta[static_cast<std::size_t>(j3)]}};
        flipped += multinomial * raw[static_cast<std::size_t>(j1)] *
                   raw[static_cast<std::size_t>(j2)] * raw[static_cast<std::size_t>(j3)] *
                   scheme.expected_product<double>(g);
      }
    }
  }

  const SampleBatch batch = sample_portfolio(p, 10000000, 777);
  const Estimate m3 = estimate(batch, RawMomentOfSum{3});
  CHECK(std::abs(analytic - m3.value) < 4.0 * m3.std_error);
  // The flipped convention must be rejected decisively.
  CHECK(std::abs(flipped - m3.value) > 6.0 * m3.std_error);
}
