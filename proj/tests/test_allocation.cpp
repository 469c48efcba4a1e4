#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fgmrisk/allocation.hpp"
#include "fgmrisk/mc_oracle.hpp"
#include "test_support.hpp"

using namespace fgmrisk;

namespace {

// The six-risk mixed Erlang portfolio with common rate 1/2 used across the
// allocation examples: Dirac, geometric, shifted Poisson and negative
// binomial weight patterns.
std::vector<Marginal> six_risks() {
  const double eps = 1e-14;
  std::vector<std::vector<double>> q(6);
  q[0] = {1.0};
  for (std::size_t j = 1; q[1].size() < 2 || q[1].back() > eps; ++j) {
    q[1].push_back(std::pow(0.5, static_cast<double>(j)));
  }
  const auto shifted_poisson = [&](double lambda) {
    std::vector<double> w;
    double term = std::exp(-lambda);
    for (std::size_t j = 1; w.size() < 2 || term > eps; ++j) {
      w.push_back(term);
      term *= lambda / static_cast<double>(j);
    }
    return w;
  };
  q[2] = shifted_poisson(5.0);
  q[4] = shifted_poisson(10.0);
  const auto shifted_negbin = [&](double r, double prob) {
    std::vector<double> w;
    double term = std::pow(prob, r);
    for (std::size_t j = 1; w.size() < 2 || term > eps; ++j) {
      w.push_back(term);
      term *= (r + static_cast<double>(j) - 1.0) / static_cast<double>(j) * (1.0 - prob);
    }
    return w;
  };
  q[3] = shifted_negbin(2.0, 0.25);
  q[5] = shifted_negbin(3.0, 0.2);

  std::vector<Marginal> out;
  for (auto& w : q) {
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= sum;
    out.push_back(Marginal{MixedErlang{0.5, std::move(w)}});
  }
  return out;
}

}  // namespace

TEST_CASE("six-risk marginal table") {
  const std::vector<Marginal> risks = six_risks();
  const std::vector<double> means{2, 4, 12, 14, 22, 26};
  const std::vector<double> vars{4, 16, 44, 124, 84, 292};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(mean(risks[k]) == doctest::Approx(means[k]).epsilon(1e-9));
    CHECK(variance(risks[k]) == doctest::Approx(vars[k]).epsilon(1e-8));
  }
}

TEST_CASE("symmetric pair splits the conditional mean evenly") {
  const Portfolio p{{Marginal{Exponential{0.5}}, Marginal{Exponential{0.5}}},
                    BernoulliScheme::independent(2)};
  for (double s : {1.0, 4.0, 10.0}) {
    const AllocationResult r = cmrs(p, s);
    REQUIRE(r.contributions.size() == 2);
    CHECK(r.contributions[0] == doctest::Approx(s / 2.0).epsilon(1e-9));
    CHECK(r.contributions[1] == doctest::Approx(s / 2.0).epsilon(1e-9));
    // Density-weighted reading: E[X_m 1{S = s}] = (s/2) f_S(s).
    const AggregateME agg = aggregate(p);
    CHECK(expected_allocation_density(p, 0, s) ==
          doctest::Approx(0.5 * s * agg.pdf(s)).epsilon(1e-9));
  }
}

TEST_CASE("full allocation identities on randomized portfolios") {
  Rng rng(3131);
  for (int rep = 0; rep < 3; ++rep) {
    const int d = 3 + static_cast<int>(rng.next_below(3));
    std::vector<Marginal> marginals;
    for (int k = 0; k < d; ++k) {
      std::vector<double> w(1 + rng.next_below(4));
      double sum = 0.0;
      for (double& x : w) {
        x = 0.1 + rng.next_uniform();
        sum += x;
      }
      for (double& x : w) x /= sum;
      marginals.push_back(Marginal{MixedErlang{0.3 + 0.4 * rng.next_uniform(), std::move(w)}});
    }
    const std::vector<BernoulliScheme> schemes{
        BernoulliScheme::markov(d, -0.5 + rng.next_uniform()),
        BernoulliScheme::end(d), fgmtest::random_dense_scheme(d, rng)};
    for (const auto& scheme : schemes) {
      const Portfolio p{marginals, scheme};
      const AggregateME agg = aggregate(p);

      const double s = agg.mean() * (0.5 + rng.next_uniform());
      const AllocationResult shares = cmrs(p, s);
      const double share_sum =
          std::accumulate(shares.contributions.begin(), shares.contributions.end(), 0.0);
      CHECK(share_sum == doctest::Approx(s).epsilon(1e-9));
      for (double c : shares.contributions) CHECK(c >= 0.0);

      const double kappa = 0.95;
      const AllocationResult alloc = tvar_allocation(p, kappa);
      const double total =
          std::accumulate(alloc.contributions.begin(), alloc.contributions.end(), 0.0);
      CHECK(total == doctest::Approx(agg.tail_value_at_risk(kappa)).epsilon(1e-8));
      CHECK(alloc.reference == doctest::Approx(agg.tail_value_at_risk(kappa)).epsilon(1e-10));
      for (double c : alloc.contributions) CHECK(c >= 0.0);
    }
  }
}

TEST_CASE("expected allocation integrates to the marginal mean") {
  const std::vector<Marginal> risks = six_risks();
  const Portfolio p{risks, BernoulliScheme::end(6)};
  // Integrate the density-weighted allocation by the aggregate shape sum:
  // integral over s equals sum_l a_m[l] / (2 beta).
  const auto engine = detail::build_allocation_engine(p, {});
  for (std::size_t m = 0; m < 6; ++m) {
    double integral = 0.0;
    for (double a : engine.coefficients[m]) integral += a;
    integral /= engine.rate2;
    CHECK(integral == doctest::Approx(mean(risks[m])).epsilon(1e-8));
  }
  // Shape-weighted consistency: sum_m a_m[l] = l q_{S,l}.
  for (std::size_t l = 1; l < engine.aggregate_law.weights.size(); ++l) {
    double sum = 0.0;
    for (std::size_t m = 0; m < 6; ++m) {
      if (l < engine.coefficients[m].size()) sum += engine.coefficients[m][l];
    }
    const double expected = static_cast<double>(l) * engine.aggregate_law.weights[l - 1];
    CHECK(std::abs(sum - expected) < 1e-8 * expected + 1e-12);
  }
}

TEST_CASE("table 4 spot values") {
  const std::vector<Marginal> risks = six_risks();
  // END, s = 80.
  {
    const Portfolio p{risks, BernoulliScheme::end(6)};
    const AllocationResult r = cmrs(p, 80.0);
    const std::vector<double> expected{2.030938, 4.123420, 12.407195,
                                       13.910778, 22.776325, 24.751343};
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(std::abs(r.contributions[k] - expected[k]) < 1e-5);
    }
  }
  // EPD, s = 160, risk 6.
  {
    const Portfolio p{risks, BernoulliScheme::comonotone(6)};
    const AllocationResult r = cmrs(p, 160.0);
    CHECK(std::abs(r.contributions[5] - 65.271307) < 1e-5);
  }
  // END, s = 40: density-weighted value reads back through f_S.
  {
    const Portfolio p{risks, BernoulliScheme::end(6)};
    const AggregateME agg = aggregate(p);
    CHECK(expected_allocation_density(p, 0, 40.0) ==
          doctest::Approx(1.928175 * agg.pdf(40.0)).epsilon(1e-5));
  }
}

TEST_CASE("table 4 crossing pattern between END and EPD") {
  const std::vector<Marginal> risks = six_risks();
  const Portfolio end_p{risks, BernoulliScheme::end(6)};
  const Portfolio epd_p{risks, BernoulliScheme::comonotone(6)};
  const AllocationResult end40 = cmrs(end_p, 40.0), epd40 = cmrs(epd_p, 40.0);
  const AllocationResult end160 = cmrs(end_p, 160.0), epd160 = cmrs(epd_p, 160.0);
  CHECK(end40.contributions[0] > epd40.contributions[0]);
  CHECK(end160.contributions[0] < epd160.contributions[0]);
}

TEST_CASE("table 5 spot values") {
  const std::vector<Marginal> risks = six_risks();
  {
    const Portfolio p{risks, BernoulliScheme::independent(6)};
    const AllocationResult r = tvar_allocation(p, 0.99);
    const std::vector<double> expected{2.33, 5.55, 15.87, 31.44, 29.41, 75.54};
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(std::abs(r.contributions[k] - expected[k]) < 0.005);
    }
    CHECK(std::abs(r.reference - 160.14) < 0.005);
  }
  {
    const Portfolio p{risks, BernoulliScheme::end(6)};
    const AllocationResult r = tvar_allocation(p, 0.99);
    CHECK(std::abs(r.contributions[5] - 77.35) < 0.005);
    CHECK(std::abs(r.reference - 153.41) < 0.005);
  }
}

TEST_CASE("single risk allocation equals its own tail measure") {
  const Portfolio p{{Marginal{MixedErlang{0.5, {0.3, 0.7}}}},
                    BernoulliScheme::independent(1)};
  const AllocationResult r = tvar_allocation(p, 0.9);
  REQUIRE(r.contributions.size() == 1);
  const MixedErlang& m = std::get<MixedErlang>(p.marginals[0]);
  CHECK(r.contributions[0] == doctest::Approx(me_tail_value_at_risk(m, 0.9)).epsilon(1e-8));
}

TEST_CASE("cmrs against a banded monte carlo estimate") {
  const std::vector<Marginal> risks = six_risks();
  const Portfolio p{risks, BernoulliScheme::end(6)};
  const SampleBatch batch = sample_portfolio(p, 1000000, 2025);
  const double band = default_band_half_width(batch);
  const AllocationResult r = cmrs(p, 80.0);
  for (int k : {0, 3, 5}) {
    const Estimate e = estimate(batch, ConditionalMean{k, 80.0, band});
    CHECK(std::abs(r.contributions[static_cast<std::size_t>(k)] - e.value) <
          4.0 * e.std_error + 0.05);
  }
}

TEST_CASE("errors") {
  const Portfolio p{{Marginal{Exponential{0.5}}, Marginal{Exponential{0.5}}},
                    BernoulliScheme::independent(2)};
  CHECK_THROWS_AS(cmrs(p, 1e9), numeric_error);      // outside effective support
  CHECK_THROWS_AS(cmrs(p, -1.0), validation_error);
  CHECK_THROWS_AS(tvar_allocation(p, 1.5), validation_error);
  const Portfolio bad{{Marginal{LogNormal{0.0, 1.0}}, Marginal{Exponential{1.0}}},
                      BernoulliScheme::independent(2)};
  CHECK_THROWS_AS(tvar_allocation(bad, 0.9), validation_error);
}
