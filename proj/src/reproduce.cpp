#include "fgmrisk/reproduce.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fgmrisk/aggregate_me.hpp"
#include "fgmrisk/allocation.hpp"
#include "fgmrisk/discrete_agg.hpp"
#include "fgmrisk/moments.hpp"
#include "fgmrisk/numeric.hpp"

namespace fgmrisk::repro {

namespace {

constexpr double kKappas[3] = {0.9, 0.99, 0.999};

// Bundled reference values at their recorded precision.

// VaR/TVaR of W_d = S_d/d, columns (END, Ind, EPD) per level 0.9/0.99/0.999.
const std::map<int, std::array<std::array<double, 9>, 2>> kTable1{
    {1,
     {{{23.03, 23.03, 23.03, 46.05, 46.05, 46.05, 69.08, 69.08, 69.08},
       {33.03, 33.03, 33.03, 56.05, 56.05, 56.05, 79.08, 79.08, 79.08}}}},
    {2,
     {{{18.09, 19.45, 20.90, 29.91, 33.19, 35.55, 41.46, 46.17, 48.86},
       {23.25, 25.47, 27.37, 34.93, 38.85, 41.36, 46.47, 51.66, 54.43}}}},
    {10,
     {{{13.63, 14.21, 17.85, 17.58, 18.78, 23.19, 20.95, 22.66, 27.40},
       {15.38, 16.24, 20.26, 19.06, 20.48, 25.05, 22.31, 24.20, 29.04}}}},
    {100,
     {{{11.13, 11.30, 15.93, 12.14, 12.47, 17.39, 12.92, 13.38, 18.44},
       {11.58, 11.83, 16.60, 12.48, 12.87, 17.86, 13.21, 13.72, 18.82}}}},
    {1000,
     {{{10.35, 10.41, 15.30, 10.65, 10.75, 15.74, 10.87, 11.01, 16.04},
       {10.49, 10.56, 15.50, 10.75, 10.86, 15.87, 10.95, 11.10, 16.15}}}},
};

// TVaR of the discretized lognormal portfolio; columns upper h=2,1,0.5,0.1
// then lower h=0.1,0.5,1,2; rows kappa = 0.9/0.99/0.999.
constexpr double kTable2[3][8] = {
    {57.60, 59.08, 59.83, 60.43, 60.73, 61.33, 62.08, 63.60},
    {92.65, 94.13, 94.88, 95.48, 95.78, 96.38, 97.13, 98.65},
    {142.93, 144.42, 145.16, 145.76, 146.06, 146.66, 147.42, 148.93},
};

constexpr double kTable3[4][6] = {
    {2, 4, 12, 14, 22, 26},
    {4, 16, 44, 124, 84, 292},
    {9.21, 18.42, 31.44, 50.86, 47.45, 79.72},
    {11.21, 22.42, 35.40, 59.90, 52.30, 92.03},
};

// Conditional means per (s, dependence) row.
constexpr double kTable4[9][6] = {
    {1.928175, 2.987516, 7.996234, 5.766606, 13.401958, 7.919511},
    {1.575428, 2.551020, 7.668274, 5.699930, 13.761121, 8.744228},
    {0.941819, 1.757806, 7.136790, 5.658961, 14.296102, 10.208524},
    {2.030938, 4.123420, 12.407195, 13.910778, 22.776325, 24.751343},
    {2.042401, 4.106984, 12.392149, 13.867892, 22.741896, 24.848677},
    {2.205948, 4.149484, 12.499946, 13.398856, 22.671998, 25.073768},
    {1.721004, 4.234335, 13.912178, 30.207898, 27.145704, 82.778881},
    {2.330977, 5.554256, 15.892004, 31.485783, 29.453031, 75.283950},
    {3.347377, 7.541924, 18.660443, 32.720014, 32.458935, 65.271307},
};

// Var(S), VaR_.99, TVaR_.99 and six TVaR contributions per dependence row.
constexpr double kTable5[3][9] = {
    {452.45, 140.58, 153.41, 1.74, 4.26, 13.91, 29.10, 27.06, 77.35},
    {564.00, 146.71, 160.14, 2.33, 5.55, 15.87, 31.44, 29.41, 75.54},
    {1121.77, 163.57, 177.24, 3.39, 7.79, 19.08, 36.48, 33.23, 77.25},
};

BernoulliScheme scheme_for(const std::string& tag, int d) {
  if (tag == "end") return BernoulliScheme::end(d);
  if (tag == "ind") return BernoulliScheme::independent(d);
  return BernoulliScheme::comonotone(d);
}

std::vector<double> truncated_pmf(const std::function<double(std::size_t)>& term,
                                  double trunc_eps) {
  std::vector<double> w;
  double covered = 0.0;
  for (std::size_t j = 0;; ++j) {
    const double t = term(j);
    w.push_back(t);
    covered += t;
    if (j > 2 && 1.0 - covered < trunc_eps) break;
    if (j > 100000) break;
  }
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= sum;
  return w;
}

}  // namespace

std::vector<Marginal> six_risk_marginals(const NumericOptions& options) {
  const double eps = options.trunc_eps;
  std::vector<Marginal> out;
  out.push_back(Marginal{MixedErlang{0.5, {1.0}}});
  out.push_back(Marginal{MixedErlang{
      0.5, truncated_pmf([](std::size_t j) { return std::pow(0.5, static_cast<double>(j + 1)); },
                         eps)}});
  const auto shifted_poisson = [&](double lambda) {
    return truncated_pmf(
        [lambda](std::size_t j) {
          return std::exp(static_cast<double>(j) * std::log(lambda) - lambda -
                          num::lfactorial(j));
        },
        eps);
  };
  out.push_back(Marginal{MixedErlang{0.5, shifted_poisson(5.0)}});
  const auto shifted_negbin = [&](double r, double prob) {
    return truncated_pmf(
        [r, prob](std::size_t j) {
          return std::exp(std::lgamma(static_cast<double>(j) + r) - std::lgamma(r) -
                          num::lfactorial(j) + r * std::log(prob) +
                          static_cast<double>(j) * std::log1p(-prob));
        },
        eps);
  };
  out.push_back(Marginal{MixedErlang{0.5, shifted_negbin(2.0, 0.25)}});
  out.push_back(Marginal{MixedErlang{0.5, shifted_poisson(10.0)}});
  out.push_back(Marginal{MixedErlang{0.5, shifted_negbin(3.0, 0.2)}});
  return out;
}

Portfolio lognormal_markov_portfolio() {
  std::vector<Marginal> marginals;
  for (double var : {20.0, 50.0, 100.0}) {
    const double s2 = std::log1p(var / 100.0);
    marginals.push_back(Marginal{LogNormal{std::log(10.0) - 0.5 * s2, std::sqrt(s2)}});
  }
  return Portfolio{std::move(marginals), BernoulliScheme::markov(3, 0.5)};
}

Table table1(std::span<const int> dimensions, const NumericOptions& options) {
  Table t;
  t.name = "table1";
  t.decimals = 2;
  t.columns = {"end_0.9",  "ind_0.9",  "epd_0.9",  "end_0.99", "ind_0.99",
               "epd_0.99", "end_0.999", "ind_0.999", "epd_0.999"};
  t.column_tolerance.assign(9, 0.005);
  const double beta = 0.1;
  for (int d : dimensions) {
    const auto ref = kTable1.find(d);
    if (ref == kTable1.end()) {
      throw validation_error("table1: no reference values for d = " + std::to_string(d));
    }
    std::array<std::vector<double>, 2> rows;  // VaR row, TVaR row
    rows[0].reserve(9);
    rows[1].reserve(9);
    std::map<std::string, AggregateME> aggregates;
    for (const char* tag : {"end", "ind", "epd"}) {
      aggregates.emplace(tag, exp_iid_fast(d, beta, scheme_for(tag, d), options));
    }
    for (double kappa : kKappas) {
      for (const char* tag : {"end", "ind", "epd"}) {
        const AggregateME& agg = aggregates.at(tag);
        rows[0].push_back(agg.value_at_risk(kappa, options) / d);
        rows[1].push_back(agg.tail_value_at_risk(kappa, options) / d);
      }
    }
    t.row_labels.push_back("var_w" + std::to_string(d));
    t.computed.push_back(std::move(rows[0]));
    t.reference.emplace_back(ref->second[0].begin(), ref->second[0].end());
    t.row_labels.push_back("tvar_w" + std::to_string(d));
    t.computed.push_back(std::move(rows[1]));
    t.reference.emplace_back(ref->second[1].begin(), ref->second[1].end());
  }
  return t;
}

Table table2(const NumericOptions& options) {
  Table t;
  t.name = "table2";
  t.decimals = 2;
  t.columns = {"upper_h2", "upper_h1", "upper_h0.5", "upper_h0.1",
               "lower_h0.1", "lower_h0.5", "lower_h1", "lower_h2"};
  t.column_tolerance.assign(8, 0.01);
  const Portfolio p = lognormal_markov_portfolio();
  const BernoulliScheme scheme = portfolio_scheme(p);
  const double spans[4] = {2.0, 1.0, 0.5, 0.1};

  std::vector<std::vector<double>> rows(3, std::vector<double>(8, 0.0));
  for (int method = 0; method < 2; ++method) {
    for (int hi = 0; hi < 4; ++hi) {
      DiscretePortfolio dp{{}, scheme};
      for (const Marginal& m : p.marginals) {
        dp.marginals.push_back(discretize(
            m,
            {method == 0 ? DiscretizationMethod::upper : DiscretizationMethod::lower,
             spans[hi]},
            options));
      }
      const Discrete agg = aggregate_pmf(dp, options);
      for (int ki = 0; ki < 3; ++ki) {
        const std::size_t column =
            method == 0 ? static_cast<std::size_t>(hi) : static_cast<std::size_t>(7 - hi);
        rows[static_cast<std::size_t>(ki)][column] =
            risk_measures(agg, kKappas[ki]).tail_value_at_risk;
      }
    }
  }
  const char* labels[3] = {"tvar_0.9", "tvar_0.99", "tvar_0.999"};
  for (int ki = 0; ki < 3; ++ki) {
    t.row_labels.push_back(labels[ki]);
    t.computed.push_back(rows[static_cast<std::size_t>(ki)]);
    t.reference.emplace_back(std::begin(kTable2[ki]), std::end(kTable2[ki]));
  }
  return t;
}

Table table3(const NumericOptions& options) {
  Table t;
  t.name = "table3";
  t.decimals = 2;
  t.columns = {"k1", "k2", "k3", "k4", "k5", "k6"};
  const std::vector<Marginal> risks = six_risk_marginals(options);
  std::vector<std::vector<double>> rows(4, std::vector<double>(6));
  for (std::size_t k = 0; k < 6; ++k) {
    const auto& me = std::get<MixedErlang>(risks[k]);
    rows[0][k] = mean(risks[k]);
    rows[1][k] = variance(risks[k]);
    rows[2][k] = me_value_at_risk(me, 0.99, options);
    rows[3][k] = me_tail_value_at_risk(me, 0.99, options);
  }
  const char* labels[4] = {"mean", "variance", "var_0.99", "tvar_0.99"};
  for (int r = 0; r < 4; ++r) {
    t.row_labels.push_back(labels[r]);
    t.computed.push_back(rows[static_cast<std::size_t>(r)]);
    t.reference.emplace_back(std::begin(kTable3[r]), std::end(kTable3[r]));
  }
  t.column_tolerance.assign(6, 0.005);
  // Means and variances are exact integers; the risk measures print at 2dp.
  t.row_tolerance = {1e-6, 1e-6, 0.005, 0.005};
  return t;
}

Table table4(const NumericOptions& options) {
  Table t;
  t.name = "table4";
  t.decimals = 6;
  t.columns = {"k1", "k2", "k3", "k4", "k5", "k6"};
  t.column_tolerance.assign(6, 1e-5);
  const std::vector<Marginal> risks = six_risk_marginals(options);
  int row = 0;
  for (double s : {40.0, 80.0, 160.0}) {
    for (const char* tag : {"end", "ind", "epd"}) {
      const Portfolio p{risks, scheme_for(tag, 6)};
      const AllocationResult r = cmrs(p, s, options);
      t.row_labels.push_back(std::string(tag) + "_s" + std::to_string(static_cast<int>(s)));
      t.computed.push_back(r.contributions);
      t.reference.emplace_back(std::begin(kTable4[row]), std::end(kTable4[row]));
      ++row;
    }
  }
  return t;
}

Table table5(const NumericOptions& options) {
  Table t;
  t.name = "table5";
  t.decimals = 2;
  t.columns = {"var_s", "var_0.99", "tvar_0.99", "k1", "k2", "k3", "k4", "k5", "k6"};
  t.column_tolerance.assign(9, 0.005);
  const std::vector<Marginal> risks = six_risk_marginals(options);
  int row = 0;
  for (const char* tag : {"end", "ind", "epd"}) {
    const Portfolio p{risks, scheme_for(tag, 6)};
    const AggregateME agg = aggregate(p, options);
    const AllocationResult alloc = tvar_allocation(p, 0.99, options);
    std::vector<double> values{agg.variance(), agg.value_at_risk(0.99, options),
                               alloc.reference};
    values.insert(values.end(), alloc.contributions.begin(), alloc.contributions.end());
    t.row_labels.push_back(tag);
    t.computed.push_back(std::move(values));
    t.reference.emplace_back(std::begin(kTable5[row]), std::end(kTable5[row]));
    ++row;
  }
  return t;
}

Table make_table(const std::string& name, int number, std::span<const int> table1_dims,
                 const NumericOptions& options) {
  switch (number) {
    case 1:
      return table1(table1_dims, options);
    case 2:
      return table2(options);
    case 3:
      return table3(options);
    case 4:
      return table4(options);
    case 5:
      return table5(options);
    default:
      throw validation_error("unknown table '" + name + "'");
  }
}

std::vector<std::string> diff_report(const Table& table) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < table.computed.size(); ++r) {
    for (std::size_t c = 0; c < table.computed[r].size(); ++c) {
      const double tol = table.row_tolerance.empty()
                             ? table.column_tolerance[c]
                             : std::max(table.row_tolerance[r], 0.0);
      const double diff = std::abs(table.computed[r][c] - table.reference[r][c]);
      if (!(diff <= tol)) {
        std::ostringstream os;
        os << table.name << " " << table.row_labels[r] << " / " << table.columns[c]
           << ": computed " << std::setprecision(10) << table.computed[r][c]
           << " reference " << table.reference[r][c] << " |diff| " << diff
           << " tolerance " << tol;
        out.push_back(os.str());
      }
    }
  }
  return out;
}

void write_csv(const Table& table, std::ostream& out) {
  out << "row";
  for (const std::string& c : table.columns) {
    out << "," << c << "," << c << "_ref," << c << "_diff";
  }
  out << "\n";
  for (std::size_t r = 0; r < table.computed.size(); ++r) {
    out << table.row_labels[r];
    for (std::size_t c = 0; c < table.computed[r].size(); ++c) {
      out << "," << std::fixed << std::setprecision(table.decimals)
          << table.computed[r][c] << "," << table.reference[r][c];
      out.unsetf(std::ios_base::floatfield);
      out << "," << std::setprecision(3) << table.computed[r][c] - table.reference[r][c];
    }
    out << "\n";
  }
  out.unsetf(std::ios_base::floatfield);
}

}  // namespace fgmrisk::repro
