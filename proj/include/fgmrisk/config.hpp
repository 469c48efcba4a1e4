#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fgmrisk/options.hpp"
#include "fgmrisk/portfolio.hpp"

namespace fgmrisk {

/// Parse failures carry the offending schema path in the message.
class config_error : public validation_error {
 public:
  using validation_error::validation_error;
};

/// Dependence as written in the config, kept for faithful serialization.
struct DependenceSpec {
  struct Independent {};
  struct Thetas {
    // 1-based coordinate subsets as written in the file.
    std::vector<std::pair<std::vector<int>, double>> entries;
  };
  struct Exchangeable {
    std::vector<double> count_pmf;
  };
  struct Epd {};
  struct End {};
  struct MarkovAlpha {
    double alpha = 0.0;
  };
  std::variant<Independent, Thetas, Exchangeable, Epd, End, MarkovAlpha> value;
};

struct PortfolioConfig {
  int version = 1;
  std::vector<Marginal> marginals;
  DependenceSpec dependence;
  NumericOptions options;
  std::uint64_t seed = 20240101;

  /// Materializes marginals + dependence into an engine-ready portfolio.
  Portfolio build() const;
};

/// Strict parse: unknown keys are rejected with their path.
PortfolioConfig parse_config(const std::string& text);
PortfolioConfig load_config(const std::string& path);

/// Canonical JSON emission; parse(serialize(parse(x))) == parse(x).
std::string serialize_config(const PortfolioConfig& config);

}  // namespace fgmrisk
