#include "fgmrisk/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fgmrisk {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw config_error("config: " + path + ": " + what);
}

const json& expect_object(const json& j, const std::string& path,
                          std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + key, "unknown key");
  }
  return j;
}

double get_number(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
  return j.at(key).get<double>();
}

double get_number_or(const json& j, const char* key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
  return j.at(key).get<double>();
}

std::vector<double> get_number_array(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j.at(key).is_array()) fail(path + "." + key, "expected an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) fail(path + "." + key, "expected numeric entries");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string get_string(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j.at(key).is_string()) fail(path + "." + key, "expected a string");
  return j.at(key).get<std::string>();
}

Marginal parse_marginal(const json& j, const std::string& path) {
  const std::string type = get_string(j, "type", path);
  if (type == "exponential") {
    expect_object(j, path, {"type", "rate"});
    return Exponential{get_number(j, "rate", path)};
  }
  if (type == "mixed_erlang") {
    expect_object(j, path, {"type", "rate", "weights"});
    return MixedErlang{get_number(j, "rate", path), get_number_array(j, "weights", path)};
  }
  if (type == "pareto_iv") {
    expect_object(j, path, {"type", "location", "scale", "inequality", "shape"});
    return ParetoIV{get_number_or(j, "location", path, 0.0), get_number(j, "scale", path),
                    get_number(j, "inequality", path), get_number(j, "shape", path)};
  }
  if (type == "weibull") {
    expect_object(j, path, {"type", "rate", "shape"});
    return Weibull{get_number(j, "rate", path), get_number(j, "shape", path)};
  }
  if (type == "lognormal") {
    expect_object(j, path, {"type", "log_mean", "log_sd", "mean", "variance"});
    const bool log_form = j.contains("log_mean") || j.contains("log_sd");
    const bool moment_form = j.contains("mean") || j.contains("variance");
    if (log_form == moment_form) {
      fail(path, "lognormal takes either log_mean/log_sd or mean/variance");
    }
    if (log_form) {
      return LogNormal{get_number(j, "log_mean", path), get_number(j, "log_sd", path)};
    }
    const double mean = get_number(j, "mean", path);
    const double var = get_number(j, "variance", path);
    if (!(mean > 0.0) || !(var > 0.0)) fail(path, "mean and variance must be positive");
    const double s2 = std::log1p(var / (mean * mean));
    return LogNormal{std::log(mean) - 0.5 * s2, std::sqrt(s2)};
  }
  if (type == "discrete") {
    expect_object(j, path, {"type", "span", "masses"});
    return Discrete{get_number(j, "span", path), get_number_array(j, "masses", path)};
  }
  fail(path + ".type", "unknown marginal type '" + type + "'");
}

DependenceSpec parse_dependence(const json& j, const std::string& path) {
  const std::string type = get_string(j, "type", path);
  DependenceSpec spec;
  if (type == "independent") {
    expect_object(j, path, {"type"});
    spec.value = DependenceSpec::Independent{};
  } else if (type == "thetas") {
    expect_object(j, path, {"type", "entries"});
    if (!j.contains("entries") || !j.at("entries").is_array()) {
      fail(path + ".entries", "expected an array");
    }
    DependenceSpec::Thetas thetas;
    std::size_t i = 0;
    for (const auto& entry : j.at("entries")) {
      const std::string epath = path + ".entries[" + std::to_string(i++) + "]";
      expect_object(entry, epath, {"subset", "value"});
      if (!entry.contains("subset") || !entry.at("subset").is_array()) {
        fail(epath + ".subset", "expected an array of 1-based coordinates");
      }
      std::vector<int> subset;
      for (const auto& c : entry.at("subset")) {
        if (!c.is_number_integer() || c.get<int>() < 1) {
          fail(epath + ".subset", "coordinates are 1-based integers");
        }
        subset.push_back(c.get<int>());
      }
      thetas.entries.emplace_back(std::move(subset), get_number(entry, "value", epath));
    }
    spec.value = std::move(thetas);
  } else if (type == "exchangeable") {
    expect_object(j, path, {"type", "count_pmf"});
    spec.value = DependenceSpec::Exchangeable{get_number_array(j, "count_pmf", path)};
  } else if (type == "epd") {
    expect_object(j, path, {"type"});
    spec.value = DependenceSpec::Epd{};
  } else if (type == "end") {
    expect_object(j, path, {"type"});
    spec.value = DependenceSpec::End{};
  } else if (type == "markov") {
    expect_object(j, path, {"type", "alpha"});
    spec.value = DependenceSpec::MarkovAlpha{get_number(j, "alpha", path)};
  } else {
    fail(path + ".type", "unknown dependence type '" + type + "'");
  }
  return spec;
}

}  // namespace

Portfolio PortfolioConfig::build() const {
  const int d = static_cast<int>(marginals.size());
  Portfolio p{marginals, BernoulliScheme::independent(std::max(d, 1))};
  std::visit(
      [&](const auto& dep) {
        using D = std::decay_t<decltype(dep)>;
        if constexpr (std::is_same_v<D, DependenceSpec::Independent>) {
          p.dependence = BernoulliScheme::independent(d);
        } else if constexpr (std::is_same_v<D, DependenceSpec::Thetas>) {
          std::vector<std::pair<SubsetMask, double>> entries;
          for (const auto& [subset, value] : dep.entries) {
            std::vector<int> zero_based;
            for (int c : subset) zero_based.push_back(c - 1);
            entries.emplace_back(subset_mask(zero_based, d), value);
          }
          p.dependence = FgmCopula(d, std::move(entries));
        } else if constexpr (std::is_same_v<D, DependenceSpec::Exchangeable>) {
          p.dependence = BernoulliScheme::exchangeable(dep.count_pmf);
        } else if constexpr (std::is_same_v<D, DependenceSpec::Epd>) {
          p.dependence = BernoulliScheme::comonotone(d);
        } else if constexpr (std::is_same_v<D, DependenceSpec::End>) {
          p.dependence = BernoulliScheme::end(d);
        } else {
          p.dependence = BernoulliScheme::markov(d, dep.alpha);
        }
      },
      dependence.value);
  validate(p);
  return p;
}

PortfolioConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  expect_object(root, "$", {"version", "marginals", "dependence", "options"});
  PortfolioConfig config;
  if (!root.contains("version") || !root.at("version").is_number_integer()) {
    fail("$.version", "missing integer version");
  }
  config.version = root.at("version").get<int>();
  if (config.version != 1) fail("$.version", "unsupported version");

  if (!root.contains("marginals") || !root.at("marginals").is_array() ||
      root.at("marginals").empty()) {
    fail("$.marginals", "expected a non-empty array");
  }
  std::size_t i = 0;
  for (const auto& m : root.at("marginals")) {
    const std::string path = "$.marginals[" + std::to_string(i++) + "]";
    Marginal marginal = parse_marginal(m, path);
    try {
      validate(marginal);
    } catch (const validation_error& e) {
      fail(path, e.what());
    }
    config.marginals.push_back(std::move(marginal));
  }

  if (!root.contains("dependence")) fail("$.dependence", "missing");
  config.dependence = parse_dependence(root.at("dependence"), "$.dependence");

  if (root.contains("options")) {
    const json& o = expect_object(root.at("options"), "$.options",
                                  {"trunc_eps", "shape_cap", "grid_cap", "dft_cap_log2",
                                   "bisect_tol", "seed"});
    config.options.trunc_eps = get_number_or(o, "trunc_eps", "$.options", 1e-12);
    config.options.bisect_tol = get_number_or(o, "bisect_tol", "$.options", 1e-9);
    config.options.shape_cap = static_cast<std::size_t>(
        get_number_or(o, "shape_cap", "$.options", static_cast<double>(std::size_t{1} << 16)));
    config.options.grid_cap = static_cast<std::size_t>(
        get_number_or(o, "grid_cap", "$.options", static_cast<double>(std::size_t{1} << 21)));
    config.options.dft_cap_log2 =
        static_cast<int>(get_number_or(o, "dft_cap_log2", "$.options", 24));
    config.seed = static_cast<std::uint64_t>(
        get_number_or(o, "seed", "$.options", static_cast<double>(config.seed)));
    if (!(config.options.trunc_eps > 0.0 && config.options.trunc_eps < 1e-3)) {
      fail("$.options.trunc_eps", "must lie in (0, 1e-3)");
    }
    if (config.options.dft_cap_log2 < 4 || config.options.dft_cap_log2 > 30) {
      fail("$.options.dft_cap_log2", "must lie in [4, 30]");
    }
  }

  // Materialize once so dependence/marginal mismatches surface at parse time.
  config.build();
  return config;
}

PortfolioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const PortfolioConfig& config) {
  json root;
  root["version"] = config.version;
  root["marginals"] = json::array();
  for (const Marginal& m : config.marginals) {
    json jm;
    std::visit(
        [&](const auto& v) {
          using V = std::decay_t<decltype(v)>;
          jm["type"] = variant_name(m);
          if constexpr (std::is_same_v<V, Exponential>) {
            jm["rate"] = v.rate;
          } else if constexpr (std::is_same_v<V, MixedErlang>) {
            jm["rate"] = v.rate;
            jm["weights"] = v.weights;
          } else if constexpr (std::is_same_v<V, ParetoIV>) {
            jm["location"] = v.location;
            jm["scale"] = v.scale;
            jm["inequality"] = v.inequality;
            jm["shape"] = v.shape;
          } else if constexpr (std::is_same_v<V, Weibull>) {
            jm["rate"] = v.rate;
            jm["shape"] = v.shape;
          } else if constexpr (std::is_same_v<V, LogNormal>) {
            jm["log_mean"] = v.log_mean;
            jm["log_sd"] = v.log_sd;
          } else {
            jm["span"] = v.span;
            jm["masses"] = v.masses;
          }
        },
        m);
    root["marginals"].push_back(std::move(jm));
  }
  json dep;
  std::visit(
      [&](const auto& v) {
        using D = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<D, DependenceSpec::Independent>) {
          dep["type"] = "independent";
        } else if constexpr (std::is_same_v<D, DependenceSpec::Thetas>) {
          dep["type"] = "thetas";
          dep["entries"] = json::array();
          for (const auto& [subset, value] : v.entries) {
            dep["entries"].push_back(json{{"subset", subset}, {"value", value}});
          }
        } else if constexpr (std::is_same_v<D, DependenceSpec::Exchangeable>) {
          dep["type"] = "exchangeable";
          dep["count_pmf"] = v.count_pmf;
        } else if constexpr (std::is_same_v<D, DependenceSpec::Epd>) {
          dep["type"] = "epd";
        } else if constexpr (std::is_same_v<D, DependenceSpec::End>) {
          dep["type"] = "end";
        } else {
          dep["type"] = "markov";
          dep["alpha"] = v.alpha;
        }
      },
      config.dependence.value);
  root["dependence"] = std::move(dep);
  root["options"] = json{{"trunc_eps", config.options.trunc_eps},
                         {"shape_cap", config.options.shape_cap},
                         {"grid_cap", config.options.grid_cap},
                         {"dft_cap_log2", config.options.dft_cap_log2},
                         {"bisect_tol", config.options.bisect_tol},
                         {"seed", config.seed}};
  return root.dump(2);
}

}  // namespace fgmrisk
