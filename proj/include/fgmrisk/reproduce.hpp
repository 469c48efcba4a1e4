#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fgmrisk/options.hpp"
#include "fgmrisk/portfolio.hpp"

namespace fgmrisk::repro {

/// One regenerated reference table: computed values next to the bundled
/// reference, with per-column tolerances at the reference's printed
/// precision.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> row_labels;
  std::vector<std::vector<double>> computed;
  std::vector<std::vector<double>> reference;
  std::vector<double> column_tolerance;
  std::vector<double> row_tolerance;  // overrides column tolerances when set
  int decimals = 2;
};

/// Exchangeable exponential benchmark: VaR/TVaR of the per-risk average
/// under extreme-negative, independent and extreme-positive mixing.
Table table1(std::span<const int> dimensions, const NumericOptions& options = {});
/// Discretization bounds for three lognormal risks under Markov mixing.
Table table2(const NumericOptions& options = {});
/// Marginal statistics of the six-risk benchmark portfolio.
Table table3(const NumericOptions& options = {});
/// Conditional mean risk sharing of the six-risk portfolio.
Table table4(const NumericOptions& options = {});
/// TVaR decomposition of the six-risk portfolio.
Table table5(const NumericOptions& options = {});

Table make_table(const std::string& name, int number, std::span<const int> table1_dims,
                 const NumericOptions& options = {});

/// One line per out-of-tolerance cell; empty means the table reproduces.
std::vector<std::string> diff_report(const Table& table);
void write_csv(const Table& table, std::ostream& out);

/// The six-risk common-rate mixed-Erlang benchmark marginals.
std::vector<Marginal> six_risk_marginals(const NumericOptions& options = {});
/// Three lognormal risks (mean 10, variances 20/50/100) with Markov(0.5).
Portfolio lognormal_markov_portfolio();

}  // namespace fgmrisk::repro
