#include "fgmrisk/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "fgmrisk/aggregate_me.hpp"
#include "fgmrisk/allocation.hpp"
#include "fgmrisk/config.hpp"
#include "fgmrisk/discrete_agg.hpp"
#include "fgmrisk/mc_oracle.hpp"
#include "fgmrisk/moments.hpp"
#include "fgmrisk/reproduce.hpp"

namespace fgmrisk::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitMismatch = 3;

// A small table abstraction so every command can emit csv or aligned text.
struct OutputTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void emit(const OutputTable& table, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      out << (c ? "," : "") << table.header[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
      out << "\n";
    }
    return;
  }
  std::vector<std::size_t> widths(table.header.size(), 0);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    widths[c] = table.header[c].size();
    for (const auto& row : table.rows) widths[c] = std::max(widths[c], row[c].size());
  }
  const auto print_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "  " : "") << std::setw(static_cast<int>(widths[c])) << row[c];
    }
    out << "\n";
  };
  print_row(table.header);
  for (const auto& row : table.rows) print_row(row);
}

struct CommonArgs {
  std::string config_path;
  std::string kappas = "0.99";
  std::string out_path;
  std::string format = "csv";
  std::string method = "upper";
  std::optional<double> span;
  std::optional<double> trunc_eps;
  std::optional<std::uint64_t> seed;
};

std::vector<double> parse_kappas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw validation_error("--kappa: expected a comma-separated list");
  return out;
}

PortfolioConfig load(const CommonArgs& args) {
  if (args.config_path.empty()) throw validation_error("--config is required");
  PortfolioConfig config = load_config(args.config_path);
  if (args.trunc_eps) config.options.trunc_eps = *args.trunc_eps;
  if (args.seed) config.seed = *args.seed;
  return config;
}

class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path, std::ostream& fallback)
      : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw validation_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

bool me_portfolio(const Portfolio& p) {
  for (const Marginal& m : p.marginals) {
    if (!std::holds_alternative<Exponential>(m) && !std::holds_alternative<MixedErlang>(m)) {
      return false;
    }
  }
  return true;
}

bool discrete_portfolio(const Portfolio& p) {
  for (const Marginal& m : p.marginals) {
    if (!std::holds_alternative<Discrete>(m)) return false;
  }
  return true;
}

DiscretePortfolio as_discrete(const Portfolio& p) {
  DiscretePortfolio dp{{}, portfolio_scheme(p)};
  for (const Marginal& m : p.marginals) dp.marginals.push_back(std::get<Discrete>(m));
  return dp;
}

// Continuous portfolios reach the lattice engines through --method/--h.
DiscretePortfolio discretized(const Portfolio& p, const CommonArgs& args,
                              const NumericOptions& options) {
  if (!args.span) {
    throw validation_error(
        "this portfolio needs a discretization: pass --h (and optionally "
        "--method lower|upper), or use `bounds` for two-sided measures");
  }
  const DiscretizationSpec spec{args.method == "lower" ? DiscretizationMethod::lower
                                                       : DiscretizationMethod::upper,
                                *args.span};
  DiscretePortfolio dp{{}, portfolio_scheme(p)};
  for (const Marginal& m : p.marginals) {
    dp.marginals.push_back(discretize(m, spec, options));
  }
  return dp;
}

int cmd_info(const CommonArgs& args, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  OutputTarget target(args.out_path, fallback);
  std::ostream& out = target.stream();
  OutputTable t;
  t.header = {"field", "value"};
  t.add_row({"dimension", std::to_string(p.dimension())});
  for (std::size_t k = 0; k < p.marginals.size(); ++k) {
    std::ostringstream os;
    os << variant_name(p.marginals[k]) << " mean=" << format_value(mean(p.marginals[k]))
       << " var=" << format_value(variance(p.marginals[k]));
    t.add_row({"marginal_" + std::to_string(k + 1), os.str()});
  }
  if (const auto* scheme = std::get_if<BernoulliScheme>(&p.dependence)) {
    t.add_row({"dependence", scheme->variant_name()});
    t.add_row({"admissible", "true"});
    if (scheme->dimension() <= 16) {
      const FgmCopula theta = theta_from_scheme(*scheme);
      std::size_t shown = 0;
      for (const auto& [mask, value] : theta.entries()) {
        if (std::abs(value) < 1e-12 || shown >= 16) continue;
        std::ostringstream key;
        key << "theta_{";
        bool first = true;
        for (int c : subset_coordinates(mask)) {
          key << (first ? "" : ",") << (c + 1);
          first = false;
        }
        key << "}";
        t.add_row({key.str(), format_value(value)});
        ++shown;
      }
    }
  } else {
    const auto& copula = std::get<FgmCopula>(p.dependence);
    t.add_row({"dependence", "thetas"});
    for (const auto& [mask, value] : copula.entries()) {
      std::ostringstream key;
      key << "theta_{";
      bool first = true;
      for (int c : subset_coordinates(mask)) {
        key << (first ? "" : ",") << (c + 1);
        first = false;
      }
      key << "}";
      t.add_row({key.str(), format_value(value)});
    }
    const std::optional<bool> ok = copula.admissible();
    t.add_row({"admissible", !ok ? "unknown" : (*ok ? "true" : "false")});
    if (ok && !*ok) {
      std::ostringstream os;
      os << "inadmissible parameters: reconstructed mass " << copula.worst_mass()
         << " at sign pattern (";
      const auto& eps = copula.violating_epsilon();
      for (std::size_t i = 0; i < eps.size(); ++i) {
        os << (i ? "," : "") << (eps[i] > 0 ? "+1" : "-1");
      }
      os << ") is negative";
      throw inadmissible_error(os.str(), eps, copula.worst_mass());
    }
  }
  emit(t, args.format, out);
  return kExitOk;
}

int cmd_aggregate(const CommonArgs& args, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  OutputTarget target(args.out_path, fallback);
  OutputTable t;
  if (me_portfolio(p)) {
    const AggregateME agg = aggregate(p, config.options);
    t.header = {"shape", "weight"};
    for (std::size_t j = 0; j < agg.law.weights.size(); ++j) {
      if (agg.law.weights[j] == 0.0) continue;
      t.add_row({std::to_string(j + 1), format_value(agg.law.weights[j])});
    }
    emit(t, args.format, target.stream());
    return kExitOk;
  }
  const Discrete agg = discrete_portfolio(p)
                           ? aggregate_pmf(as_discrete(p), config.options)
                           : aggregate_pmf(discretized(p, args, config.options), config.options);
  t.header = {"x", "mass"};
  for (std::size_t j = 0; j < agg.masses.size(); ++j) {
    t.add_row({format_value(static_cast<double>(j) * agg.span),
               format_value(agg.masses[j])});
  }
  emit(t, args.format, target.stream());
  return kExitOk;
}

int cmd_moments(const CommonArgs& args, int order, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  OutputTarget target(args.out_path, fallback);
  OutputTable t;
  t.header = {"order", "moment"};
  for (int m = 1; m <= order; ++m) {
    t.add_row({std::to_string(m), format_value(aggregate_moment(p, m))});
  }
  emit(t, args.format, target.stream());
  return kExitOk;
}

int cmd_risk(const CommonArgs& args, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  const std::vector<double> kappas = parse_kappas(args.kappas);
  OutputTarget target(args.out_path, fallback);
  OutputTable t;
  t.header = {"kappa", "value_at_risk", "tail_value_at_risk"};
  if (me_portfolio(p)) {
    const AggregateME agg = aggregate(p, config.options);
    for (double kappa : kappas) {
      t.add_row({format_value(kappa), format_value(agg.value_at_risk(kappa, config.options)),
                 format_value(agg.tail_value_at_risk(kappa, config.options))});
    }
  } else {
    const Discrete agg = discrete_portfolio(p)
                             ? aggregate_pmf(as_discrete(p), config.options)
                             : aggregate_pmf(discretized(p, args, config.options),
                                             config.options);
    for (double kappa : kappas) {
      const RiskMeasures rm = risk_measures(agg, kappa);
      t.add_row({format_value(kappa), format_value(rm.value_at_risk),
                 format_value(rm.tail_value_at_risk)});
    }
  }
  emit(t, args.format, target.stream());
  return kExitOk;
}

int cmd_bounds(const CommonArgs& args, double span, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  const std::vector<double> kappas = parse_kappas(args.kappas);
  OutputTarget target(args.out_path, fallback);
  OutputTable t;
  t.header = {"kappa", "span", "tvar_lower", "tvar_upper"};
  for (double kappa : kappas) {
    const TvarSandwich sw = tvar_sandwich(p, span, kappa, config.options);
    t.add_row({format_value(kappa), format_value(span), format_value(sw.lower),
               format_value(sw.upper)});
  }
  emit(t, args.format, target.stream());
  return kExitOk;
}

int cmd_allocate(const CommonArgs& args, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  const std::vector<double> kappas = parse_kappas(args.kappas);
  OutputTarget target(args.out_path, fallback);
  OutputTable t;
  t.header = {"kappa", "risk", "contribution", "total_tvar"};
  for (double kappa : kappas) {
    const AllocationResult r = tvar_allocation(p, kappa, config.options);
    for (std::size_t k = 0; k < r.contributions.size(); ++k) {
      t.add_row({format_value(kappa), std::to_string(k + 1),
                 format_value(r.contributions[k]), format_value(r.reference)});
    }
  }
  emit(t, args.format, target.stream());
  return kExitOk;
}

int cmd_share(const CommonArgs& args, double s, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  OutputTarget target(args.out_path, fallback);
  OutputTable t;
  t.header = {"s", "risk", "conditional_mean"};
  const AllocationResult r = cmrs(p, s, config.options);
  for (std::size_t k = 0; k < r.contributions.size(); ++k) {
    t.add_row({format_value(s), std::to_string(k + 1), format_value(r.contributions[k])});
  }
  emit(t, args.format, target.stream());
  return kExitOk;
}

int cmd_sample(const CommonArgs& args, std::size_t n, std::ostream& fallback) {
  const PortfolioConfig config = load(args);
  const Portfolio p = config.build();
  OutputTarget target(args.out_path, fallback);
  const SampleBatch batch = sample_portfolio(p, n, config.seed, config.options);
  OutputTable t;
  for (int k = 0; k < batch.d; ++k) t.header.push_back("x" + std::to_string(k + 1));
  for (std::size_t i = 0; i < batch.n; ++i) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(batch.d));
    for (int k = 0; k < batch.d; ++k) row.push_back(format_value(batch.value(i, k)));
    t.add_row(std::move(row));
  }
  emit(t, args.format, target.stream());
  return kExitOk;
}

std::vector<int> parse_subset_dims(std::string text) {
  if (text.rfind("d=", 0) == 0) text = text.substr(2);
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw validation_error("--subset: expected d=<comma list>");
  return out;
}

int cmd_reproduce(const std::string& table, const std::string& subset,
                  const CommonArgs& args, std::ostream& out, std::ostream& err) {
  if (table.rfind("table", 0) != 0 || table.size() != 6) {
    throw validation_error("reproduce: expected table1..table5");
  }
  const int number = table[5] - '0';
  std::vector<int> dims{1, 2, 10, 100, 1000};
  if (!subset.empty()) dims = parse_subset_dims(subset);
  NumericOptions options;
  if (args.trunc_eps) options.trunc_eps = *args.trunc_eps;

  const repro::Table result = repro::make_table(table, number, dims, options);
  OutputTarget target(args.out_path, out);
  repro::write_csv(result, target.stream());
  const std::vector<std::string> diffs = repro::diff_report(result);
  if (diffs.empty()) {
    err << table << ": all " << result.computed.size() << " rows within tolerance\n";
    return kExitOk;
  }
  for (const std::string& line : diffs) err << line << "\n";
  return kExitMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk aggregation for FGM-dependent portfolios"};
  app.require_subcommand(1);

  CommonArgs common;
  int order = 2;
  double s_value = 0.0;
  std::size_t n_samples = 1000;
  std::string table, subset;

  app.set_help_flag("--help", "print help");

  const auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    cmd->set_help_flag("--help", "print help");
    auto* opt = cmd->add_option("--config", common.config_path, "portfolio config (JSON)");
    if (needs_config) opt->required();
    cmd->add_option("--kappa", common.kappas, "comma-separated levels in (0,1)");
    cmd->add_option("--method", common.method, "discretization method (lower|upper)")
        ->check(CLI::IsMember({"lower", "upper"}));
    cmd->add_option("--h", [&common](const CLI::results_t& r) {
          common.span = std::stod(r[0]);
          return true;
        },
        "discretization span for continuous marginals");
    cmd->add_option("--out", common.out_path, "write the table to this path");
    cmd->add_option("--format", common.format, "csv|text")
        ->check(CLI::IsMember({"csv", "text"}));
    cmd->add_option("--trunc-eps", [&common](const CLI::results_t& r) {
          common.trunc_eps = std::stod(r[0]);
          return true;
        },
        "tail-truncation tolerance override");
    cmd->add_option("--seed", [&common](const CLI::results_t& r) {
          common.seed = std::stoull(r[0]);
          return true;
        },
        "rng seed override");
  };

  auto* info = app.add_subcommand("info", "summarize the portfolio and its dependence");
  add_common(info);
  auto* agg = app.add_subcommand("aggregate", "emit aggregate weights or pmf");
  add_common(agg);
  auto* mom = app.add_subcommand("moments", "aggregate moments 1..order");
  add_common(mom);
  mom->add_option("--order", order, "highest moment order")->check(CLI::PositiveNumber);
  auto* risk = app.add_subcommand("risk", "VaR/TVaR at the requested levels");
  add_common(risk);
  auto* bounds = app.add_subcommand("bounds", "discretization sandwich on TVaR");
  add_common(bounds);
  auto* alloc = app.add_subcommand("allocate", "TVaR decomposition per risk");
  add_common(alloc);
  auto* share = app.add_subcommand("share", "conditional mean risk sharing at S = s");
  add_common(share);
  share->add_option("--s", s_value, "conditioning total")->required();
  auto* sample = app.add_subcommand("sample", "draw portfolio realizations");
  add_common(sample);
  sample->add_option("--n", n_samples, "number of draws")->check(CLI::PositiveNumber);
  auto* repro_cmd = app.add_subcommand("reproduce", "regenerate a reference table");
  repro_cmd->add_option("table", table, "table1..table5")->required();
  repro_cmd->add_option("--subset", subset, "table1 dimensions, e.g. d=1,2,10");
  add_common(repro_cmd, false);

  try {
    std::vector<const char*> argv;
    argv.push_back("fgmrisk");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (*info) return cmd_info(common, out);
    if (*agg) return cmd_aggregate(common, out);
    if (*mom) return cmd_moments(common, order, out);
    if (*risk) return cmd_risk(common, out);
    if (*bounds) return cmd_bounds(common, common.span.value_or(0.1), out);
    if (*alloc) return cmd_allocate(common, out);
    if (*share) return cmd_share(common, s_value, out);
    if (*sample) return cmd_sample(common, n_samples, out);
    if (*repro_cmd) return cmd_reproduce(table, subset, common, out, err);
    err << "no command selected\n";
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "argument error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const validation_error& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace fgmrisk::cli
