import math

import pytest

import fgmrisk as fr


def test_scheme_basics():
    s = fr.BernoulliScheme.markov(3, 0.5)
    assert s.dimension == 3
    assert s.variant == "markov"
    assert s.pmf([0, 0, 0]) == pytest.approx(0.5 * 0.75 * 0.75)
    assert s.central_mixed_moment([0, 1]) == pytest.approx(0.125)
    assert sum(s.count_pmf()) == pytest.approx(1.0)


def test_copula_bridge():
    c = fr.FgmCopula(2, [([0, 1], 1.0)])
    assert c.admissible
    assert c.cdf([0.5, 0.5]) == pytest.approx(5.0 / 16.0)
    s = fr.scheme_from_theta(c)
    back = fr.theta_from_scheme(s)
    assert back.theta([0, 1]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fr.scheme_from_theta(fr.FgmCopula(2, [([0, 1], 1.5)]))
    assert fr.end_thetas(3)[2] == pytest.approx(-1.0 / 3.0)


def test_marginals():
    e = fr.exponential(0.1)
    assert e.mean() == pytest.approx(10.0)
    assert e.quantile(0.9) == pytest.approx(23.0259, abs=1e-3)
    w = fr.weibull(0.4, 1.0)
    assert w.os_moment(1, 1) == pytest.approx(1.0 / 0.8)
    with pytest.raises(ValueError):
        fr.mixed_erlang(1.0, [0.5, 0.4])


def test_aggregate_and_risk():
    portfolio = fr.Portfolio(
        [fr.exponential(0.1), fr.exponential(0.1)],
        fr.BernoulliScheme.comonotone(2),
    )
    agg = fr.aggregate(portfolio)
    assert agg.mean() == pytest.approx(20.0)
    assert agg.value_at_risk(0.9) / 2 == pytest.approx(20.90, abs=5e-3)
    assert agg.tail_value_at_risk(0.9) / 2 == pytest.approx(27.37, abs=5e-3)

    fast = fr.exp_iid_fast(2, 0.1, fr.BernoulliScheme.comonotone(2))
    assert fast.cdf(30.0) == pytest.approx(agg.cdf(30.0), abs=1e-9)


def test_moments_and_covariance():
    portfolio = fr.Portfolio(
        [fr.exponential(1.0), fr.exponential(1.0)],
        fr.FgmCopula(2, [([0, 1], 1.0)]),
    )
    assert fr.aggregate_moment(portfolio, 2) == pytest.approx(6.5)
    assert fr.aggregate_moment(portfolio, 2, form="natural_a1") == pytest.approx(6.5)
    assert fr.covariance(portfolio, 0, 1) == pytest.approx(0.25)
    assert fr.aggregate_variance(portfolio) == pytest.approx(2.5)


def test_discrete_path():
    bern = fr.discrete(1.0, [0.5, 0.5])
    s = fr.aggregate_pmf([bern, bern], fr.BernoulliScheme.comonotone(2))
    assert s.masses == pytest.approx([5 / 16, 6 / 16, 5 / 16])
    var, tvar = fr.risk_measures(s, 0.9)
    assert var == 2.0
    assert tvar == 2.0

    portfolio = fr.Portfolio(
        [fr.lognormal(1.0, 0.5), fr.exponential(0.25)],
        fr.BernoulliScheme.markov(2, 0.5),
    )
    lo, hi = fr.tvar_sandwich(portfolio, 0.5, 0.9)
    assert lo < hi


def test_allocation():
    portfolio = fr.Portfolio(
        [fr.exponential(0.5), fr.exponential(0.5)],
        fr.BernoulliScheme.independent(2),
    )
    shares = fr.cmrs(portfolio, 6.0)
    assert shares.contributions == pytest.approx([3.0, 3.0], rel=1e-8)
    alloc = fr.tvar_allocation(portfolio, 0.95)
    assert sum(alloc.contributions) == pytest.approx(alloc.reference, rel=1e-8)


def test_sampling():
    portfolio = fr.Portfolio(
        [fr.exponential(1.0), fr.weibull(0.5, 1.3)],
        fr.BernoulliScheme.markov(2, -0.4),
    )
    a = fr.sample_portfolio(portfolio, 500, 42)
    b = fr.sample_portfolio(portfolio, 500, 42)
    assert a.shape == (500, 2)
    assert (a == b).all()
    assert (a > 0).all()


def test_config_entry_point():
    portfolio = fr.portfolio_from_config(
        """
        {
          "version": 1,
          "marginals": [
            {"type": "exponential", "rate": 0.5},
            {"type": "mixed_erlang", "rate": 0.5, "weights": [0.4, 0.6]}
          ],
          "dependence": {"type": "end"}
        }
        """
    )
    assert portfolio.dimension == 2
    agg = fr.aggregate(portfolio)
    assert agg.mean() == pytest.approx(2.0 + 2 * 1.6)
    with pytest.raises(ValueError):
        fr.portfolio_from_config('{"version": 1}')
