#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fgmrisk/aggregate_me.hpp"
#include "fgmrisk/mc_oracle.hpp"
#include "fgmrisk/moments.hpp"
#include "test_support.hpp"

using namespace fgmrisk;

namespace {

Portfolio iid_exponential(int d, double rate, BernoulliScheme scheme) {
  return Portfolio{std::vector<Marginal>(static_cast<std::size_t>(d), Marginal{Exponential{rate}}),
                   std::move(scheme)};
}

}  // namespace

TEST_CASE("independent iid pair is the plain convolution") {
  const Portfolio p = iid_exponential(2, 0.5, BernoulliScheme::independent(2));
  const AggregateME agg = aggregate(p);
  CHECK(agg.mean() == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(agg.variance() == doctest::Approx(8.0).epsilon(1e-8));
  // Erlang(2, 1/2) cdf on a grid.
  for (double x : fgmtest::linspace(0.5, 30.0, 15)) {
    const double expected = 1.0 - std::exp(-0.5 * x) * (1.0 + 0.5 * x);
    CHECK(agg.cdf(x) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("EPD laplace transform closed form") {
  // d iid Exp(beta), comonotone mixing: LST equals
  // (2b/(2b+t))^d (1/2 + 1/2 (b/(b+t))^d), checked at 10 real nodes.
  for (int d : {2, 5}) {
    const double beta = 0.1;
    const AggregateME agg =
        aggregate(iid_exponential(d, beta, BernoulliScheme::comonotone(d)));
    for (int i = 1; i <= 10; ++i) {
      const double t = 0.01 * i;
      const double base = std::pow(2.0 * beta / (2.0 * beta + t), d);
      const double expected = base * (0.5 + 0.5 * std::pow(beta / (beta + t), d));
      CHECK(agg.lst(t) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("dual-path equality: transform aggregation vs count-mixture fast path") {
  const double beta = 0.1;
  for (int d : {2, 10, 100}) {
    for (const auto& scheme :
         {BernoulliScheme::end(d), BernoulliScheme::independent(d),
          BernoulliScheme::comonotone(d), BernoulliScheme::markov(d, 0.4)}) {
      const AggregateME slow = aggregate(iid_exponential(d, beta, scheme));
      const AggregateME fast = exp_iid_fast(d, beta, scheme);
      const double hi = fast.value_at_risk(0.9999);
      for (double x : fgmtest::linspace(0.1, hi, 60)) {
        CHECK(slow.cdf(x) == doctest::Approx(fast.cdf(x)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("degenerate count input: N identically zero gives Erlang(d, 2 beta)") {
  const int d = 4;
  std::vector<double> pmf(d + 1, 0.0);
  pmf[0] = 1.0;
  const AggregateME agg = exp_iid_fast(d, 0.5, pmf);
  REQUIRE(agg.law.weights.size() == d);
  CHECK(agg.law.weights.back() == doctest::Approx(1.0));
  CHECK(agg.mean() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("table 1 spot values") {
  const double beta = 0.1;
  // Single risk: VaR_.9 = 23.03, TVaR_.9 = 33.03.
  const AggregateME one = exp_iid_fast(1, beta, BernoulliScheme::independent(1));
  CHECK(std::abs(one.value_at_risk(0.9) - 23.03) < 0.005);
  CHECK(std::abs(one.tail_value_at_risk(0.9) - 33.03) < 0.005);
  // d=2 EPD: VaR_.9(W_2) = 20.90, TVaR_.9(W_2) = 27.37.
  const AggregateME epd2 = exp_iid_fast(2, beta, BernoulliScheme::comonotone(2));
  CHECK(std::abs(epd2.value_at_risk(0.9) / 2.0 - 20.90) < 0.005);
  CHECK(std::abs(epd2.tail_value_at_risk(0.9) / 2.0 - 27.37) < 0.005);
  // d=1000 END: VaR_.9(W_1000) = 10.35.
  const AggregateME end1000 = exp_iid_fast(1000, beta, BernoulliScheme::end(1000));
  CHECK(std::abs(end1000.value_at_risk(0.9) / 1000.0 - 10.35) < 0.005);
}

TEST_CASE("tvar at tiny kappa approaches the mean") {
  const AggregateME agg =
      aggregate(iid_exponential(3, 0.2, BernoulliScheme::markov(3, -0.5)));
  CHECK(agg.tail_value_at_risk(1e-10) == doctest::Approx(agg.mean()).epsilon(1e-6));
  CHECK(agg.tail_value_at_risk(0.95) >= agg.value_at_risk(0.95));
}

TEST_CASE("moments cross-check for every scheme variant") {
  Rng rng(77);
  const std::vector<Marginal> marginals{
      Marginal{Exponential{0.4}},
      Marginal{MixedErlang{0.8, {0.25, 0.5, 0.25}}},
      Marginal{MixedErlang{0.8, {0.6, 0.3, 0.1}}},
      Marginal{Exponential{0.8}},
  };
  const int d = 4;
  const std::vector<BernoulliScheme> schemes{
      BernoulliScheme::independent(d), BernoulliScheme::comonotone(d),
      BernoulliScheme::end(d), BernoulliScheme::markov(d, 0.7),
      fgmtest::random_dense_scheme(d, rng)};
  for (const auto& scheme : schemes) {
    Portfolio p{marginals, scheme};
    const AggregateME agg = aggregate(p);
    CHECK(agg.mean() == doctest::Approx(aggregate_moment(p, 1)).epsilon(1e-8));
    const double m1 = aggregate_moment(p, 1);
    const double var = aggregate_moment(p, 2) - m1 * m1;
    CHECK(agg.variance() == doctest::Approx(var).epsilon(1e-8));
    // Third moment from the aggregate weights vs the composition engine.
    CHECK(moment(Marginal{agg.law}, 3) ==
          doctest::Approx(aggregate_moment(p, 3)).epsilon(1e-7));
  }
}

TEST_CASE("heterogeneous rates unify by rescaling") {
  const Portfolio p{{Marginal{Exponential{0.1}}, Marginal{Exponential{0.25}},
                     Marginal{MixedErlang{0.15, {0.5, 0.5}}}},
                    BernoulliScheme::markov(3, 0.6)};
  const AggregateME agg = aggregate(p);
  CHECK(agg.law.rate == doctest::Approx(0.5));  // twice the largest rate
  double mean_sum = 0.0;
  for (const auto& m : p.marginals) mean_sum += mean(m);
  CHECK(agg.mean() == doctest::Approx(mean_sum).epsilon(1e-9));
  const double m1 = aggregate_moment(p, 1);
  CHECK(agg.variance() ==
        doctest::Approx(aggregate_moment(p, 2) - m1 * m1).epsilon(1e-8));
}

TEST_CASE("convex order: END below independent below EPD") {
  const double beta = 0.1;
  for (int d : {2, 10}) {
    const AggregateME end_agg = exp_iid_fast(d, beta, BernoulliScheme::end(d));
    const AggregateME ind_agg = exp_iid_fast(d, beta, BernoulliScheme::independent(d));
    const AggregateME epd_agg = exp_iid_fast(d, beta, BernoulliScheme::comonotone(d));
    CHECK(end_agg.mean() == doctest::Approx(ind_agg.mean()).epsilon(1e-10));
    CHECK(epd_agg.mean() == doctest::Approx(ind_agg.mean()).epsilon(1e-10));
    for (double kappa : {0.5, 0.9, 0.99, 0.999}) {
      const double a = end_agg.tail_value_at_risk(kappa);
      const double b = ind_agg.tail_value_at_risk(kappa);
      const double c = epd_agg.tail_value_at_risk(kappa);
      CHECK(a < b - 1e-9);
      CHECK(b < c - 1e-9);
    }
  }
}

TEST_CASE("monte carlo concordance of the aggregate cdf") {
  const Portfolio p{{Marginal{MixedErlang{0.5, {0.4, 0.4, 0.2}}},
                     Marginal{Exponential{0.25}}, Marginal{Exponential{0.5}}},
                    BernoulliScheme::markov(3, 0.5)};
  const AggregateME agg = aggregate(p);
  const SampleBatch batch = sample_portfolio(p, 1000000, 424242);
  std::vector<double> sums(batch.n);
  for (std::size_t i = 0; i < batch.n; ++i) sums[i] = batch.row_sum(i);
  const double ks =
      fgmtest::ks_distance(std::move(sums), [&](double x) { return agg.cdf(x); });
  CHECK(ks < 0.002);
}

TEST_CASE("provenance and unsupported marginals") {
  const Portfolio p = iid_exponential(2, 0.3, BernoulliScheme::independent(2));
  const AggregateME agg = aggregate(p);
  CHECK(agg.provenance.portfolio_hash == portfolio_hash(p));
  CHECK(agg.provenance.dft_length >= agg.law.weights.size());
  CHECK(agg.provenance.min_raw_weight >= -1e-12);
  CHECK(agg.provenance.max_imag_residue < 1e-9);
  CHECK(std::abs(agg.provenance.raw_weight_sum - 1.0) < 1e-9);

  const Portfolio bad{{Marginal{Weibull{1.0, 2.0}}, Marginal{Exponential{1.0}}},
                      BernoulliScheme::independent(2)};
  CHECK_THROWS_AS(aggregate(bad), validation_error);
}

TEST_CASE("theta-form dependence bridges to the scheme path") {
  const Portfolio p{{Marginal{Exponential{1.0}}, Marginal{Exponential{1.0}}},
                    FgmCopula(2, {{0b11, 1.0}})};
  const AggregateME agg = aggregate(p);
  const AggregateME direct =
      aggregate(iid_exponential(2, 1.0, BernoulliScheme::comonotone(2)));
  for (double x : fgmtest::linspace(0.2, 12.0, 25)) {
    CHECK(agg.cdf(x) == doctest::Approx(direct.cdf(x)).epsilon(1e-10));
  }
}
