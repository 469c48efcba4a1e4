#include "fgmrisk/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fgmrisk/numeric.hpp"

namespace fgmrisk {

namespace {

constexpr double kSumTol = 1e-12;

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << v;
    throw validation_error(os.str());
  }
}

void check_mass_vector(const std::vector<double>& w, const char* what) {
  if (w.empty()) {
    throw validation_error(std::string(what) + ": empty mass vector");
  }
  num::Accumulator sum;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw validation_error(std::string(what) + ": masses must be nonnegative");
    }
    sum.add(x);
  }
  if (std::abs(sum.total() - 1.0) > kSumTol) {
    std::ostringstream os;
    os << what << ": masses must sum to 1 within 1e-12, got " << sum.total();
    throw validation_error(os.str());
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Monotone cdf inversion: bracket grown geometrically from `scale`, then
// bisection; returns the right endpoint so cdf(result) >= u holds.
template <class F>
double invert_cdf(F&& f, double u, double scale, const NumericOptions& options) {
  double hi = scale > 0.0 && std::isfinite(scale) ? scale : 1.0;
  int grow = 0;
  while (f(hi) < u) {
    hi *= 2.0;
    if (++grow > 1100) throw numeric_error("quantile: bracket expansion failed");
  }
  double lo = 0.0;
  const double tol = options.bisect_tol * std::max(1.0, scale);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double pareto_core_moment(const ParetoIV& p, double alpha, int order) {
  // sigma^m Gamma(alpha - gamma m) Gamma(1 + gamma m) / Gamma(alpha),
  // the location-zero moment with tail index alpha.
  const double g = p.inequality;
  return std::pow(p.scale, order) *
         std::exp(std::lgamma(alpha - g * order) + std::lgamma(1.0 + g * order) -
                  std::lgamma(alpha));
}

double pareto_shifted_moment(const ParetoIV& p, double alpha, int order) {
  if (p.location == 0.0) return pareto_core_moment(p, alpha, order);
  num::Accumulator acc;
  for (int i = 0; i <= order; ++i) {
    acc.add(std::exp(num::lchoose(static_cast<std::size_t>(order),
                                  static_cast<std::size_t>(i))) *
            std::pow(p.location, order - i) * pareto_core_moment(p, alpha, i));
  }
  return acc.total();
}

void check_pareto_order(const ParetoIV& p, double alpha, int order, const char* what) {
  const double bound = alpha / p.inequality;
  if (!(order < bound)) {
    std::ostringstream os;
    os << what << ": moment of order " << order
       << " does not exist; requires order < shape/inequality = " << bound;
    throw validation_error(os.str());
  }
}

double rising_factorial(std::size_t shape, int order) {
  double v = 1.0;
  for (int i = 0; i < order; ++i) v *= static_cast<double>(shape) + i;
  return v;
}

void trim_and_renormalize(std::vector<double>& w) {
  while (w.size() > 1 && w.back() == 0.0) w.pop_back();
  num::Accumulator sum;
  for (double x : w) sum.add(x);
  const double s = sum.total();
  if (!(s > 0.0)) throw numeric_error("weight sequence lost all mass");
  for (double& x : w) x /= s;
}

}  // namespace

void validate(const Marginal& m) {
  std::visit(
      [](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
          check_positive(v.rate, "Exponential rate");
        } else if constexpr (std::is_same_v<V, MixedErlang>) {
          check_positive(v.rate, "MixedErlang rate");
          check_mass_vector(v.weights, "MixedErlang");
        } else if constexpr (std::is_same_v<V, ParetoIV>) {
          check_positive(v.scale, "ParetoIV scale");
          check_positive(v.inequality, "ParetoIV inequality");
          check_positive(v.shape, "ParetoIV shape");
          if (!std::isfinite(v.location)) throw validation_error("ParetoIV location must be finite");
        } else if constexpr (std::is_same_v<V, Weibull>) {
          check_positive(v.rate, "Weibull rate");
          check_positive(v.shape, "Weibull shape");
        } else if constexpr (std::is_same_v<V, LogNormal>) {
          check_positive(v.log_sd, "LogNormal log-sd");
          if (!std::isfinite(v.log_mean)) throw validation_error("LogNormal log-mean must be finite");
        } else {
          check_positive(v.span, "Discrete span");
          check_mass_vector(v.masses, "Discrete");
        }
      },
      m);
}

const char* variant_name(const Marginal& m) {
  return std::visit(
      [](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) return "exponential";
        else if constexpr (std::is_same_v<V, MixedErlang>) return "mixed_erlang";
        else if constexpr (std::is_same_v<V, ParetoIV>) return "pareto_iv";
        else if constexpr (std::is_same_v<V, Weibull>) return "weibull";
        else if constexpr (std::is_same_v<V, LogNormal>) return "lognormal";
        else return "discrete";
      },
      m);
}

double cdf(const Marginal& m, double x) {
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
          return x <= 0.0 ? 0.0 : -std::expm1(-v.rate * x);
        } else if constexpr (std::is_same_v<V, MixedErlang>) {
          return me_cdf(v, x);
        } else if constexpr (std::is_same_v<V, ParetoIV>) {
          if (x <= v.location) return 0.0;
          const double z = std::pow((x - v.location) / v.scale, 1.0 / v.inequality);
          return 1.0 - std::pow(1.0 + z, -v.shape);
        } else if constexpr (std::is_same_v<V, Weibull>) {
          return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(v.rate * x, v.shape));
        } else if constexpr (std::is_same_v<V, LogNormal>) {
          return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - v.log_mean) / v.log_sd);
        } else {
          if (x < 0.0) return 0.0;
          const auto last = static_cast<std::size_t>(std::floor(x / v.span + 1e-12));
          num::Accumulator c;
          for (std::size_t j = 0; j < v.masses.size() && j <= last; ++j) c.add(v.masses[j]);
          return std::min(c.total(), 1.0);
        }
      },
      m);
}

double pdf(const Marginal& m, double x) {
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
          return x < 0.0 ? 0.0 : v.rate * std::exp(-v.rate * x);
        } else if constexpr (std::is_same_v<V, MixedErlang>) {
          return me_pdf(v, x);
        } else if constexpr (std::is_same_v<V, ParetoIV>) {
          if (x <= v.location) return 0.0;
          const double z = (x - v.location) / v.scale;
          const double t = std::pow(z, 1.0 / v.inequality);
          return v.shape / (v.inequality * v.scale) * std::pow(z, 1.0 / v.inequality - 1.0) *
                 std::pow(1.0 + t, -v.shape - 1.0);
        } else if constexpr (std::is_same_v<V, Weibull>) {
          if (x < 0.0) return 0.0;
          const double t = std::pow(v.rate * x, v.shape);
          return x == 0.0 && v.shape < 1.0
                     ? std::numeric_limits<double>::infinity()
                     : v.rate * v.shape * std::pow(v.rate * x, v.shape - 1.0) * std::exp(-t);
        } else if constexpr (std::is_same_v<V, LogNormal>) {
          if (x <= 0.0) return 0.0;
          const double w = (std::log(x) - v.log_mean) / v.log_sd;
          return std::exp(-0.5 * w * w) /
                 (x * v.log_sd * std::sqrt(2.0 * std::numbers::pi));
        } else {
          throw validation_error("pdf: lattice marginals have no density");
        }
      },
      m);
}

double quantile(const Marginal& m, double u, const NumericOptions& options) {
  if (!(u > 0.0 && u < 1.0)) {
    throw validation_error("quantile: level must lie in (0, 1)");
  }
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
          return -std::log1p(-u) / v.rate;
        } else if constexpr (std::is_same_v<V, MixedErlang>) {
          const double scale = me_mean(v) + 40.0 * std::sqrt(me_variance(v));
          return invert_cdf([&](double x) { return me_cdf(v, x); }, u, scale, options);
        } else if constexpr (std::is_same_v<V, ParetoIV>) {
          return v.location +
                 v.scale * std::pow(std::pow(1.0 - u, -1.0 / v.shape) - 1.0, v.inequality);
        } else if constexpr (std::is_same_v<V, Weibull>) {
          return std::pow(-std::log1p(-u), 1.0 / v.shape) / v.rate;
        } else if constexpr (std::is_same_v<V, LogNormal>) {
          const Marginal mm = v;
          const double scale =
              std::exp(v.log_mean + v.log_sd * v.log_sd) * (1.0 + 8.0 * v.log_sd);
          return invert_cdf([&](double x) { return cdf(mm, x); }, u, scale, options);
        } else {
          num::Accumulator c;
          for (std::size_t j = 0; j < v.masses.size(); ++j) {
            c.add(v.masses[j]);
            if (c.total() >= u) return static_cast<double>(j) * v.span;
          }
          return static_cast<double>(v.masses.size() - 1) * v.span;
        }
      },
      m);
}

double moment(const Marginal& m, int order) {
  if (order < 0) throw validation_error("moment: order must be nonnegative");
  if (order == 0) return 1.0;
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
          return std::exp(num::lfactorial(static_cast<std::size_t>(order))) /
                 std::pow(v.rate, order);
        } else if constexpr (std::is_same_v<V, MixedErlang>) {
          num::Accumulator acc;
          for (std::size_t j = 0; j < v.weights.size(); ++j) {
            if (v.weights[j] != 0.0) acc.add(v.weights[j] * rising_factorial(j + 1, order));
          }
          return acc.total() / std::pow(v.rate, order);
        } else if constexpr (std::is_same_v<V, ParetoIV>) {
          check_pareto_order(v, v.shape, order, "ParetoIV");
          return pareto_shifted_moment(v, v.shape, order);
        } else if constexpr (std::is_same_v<V, Weibull>) {
          return std::exp(std::lgamma(1.0 + order / v.shape)) / std::pow(v.rate, order);
        } else if constexpr (std::is_same_v<V, LogNormal>) {
          return std::exp(order * v.log_mean + 0.5 * order * order * v.log_sd * v.log_sd);
        } else {
          num::Accumulator acc;
          for (std::size_t j = 0; j < v.masses.size(); ++j) {
            if (v.masses[j] != 0.0) {
              acc.add(v.masses[j] * std::pow(static_cast<double>(j) * v.span, order));
            }
          }
          return acc.total();
        }
      },
      m);
}

double mean(const Marginal& m) { return moment(m, 1); }

double variance(const Marginal& m) {
  const double mu = mean(m);
  return moment(m, 2) - mu * mu;
}

double os_cdf(const Marginal& m, OrderStat which, double x) {
  const double f = cdf(m, x);
  return which == OrderStat::min ? 1.0 - (1.0 - f) * (1.0 - f) : f * f;
}

double os_moment(const Marginal& m, OrderStat which, int order) {
  if (order < 0) throw validation_error("os_moment: order must be nonnegative");
  if (order == 0) return 1.0;
  const auto from_min = [&](double min_moment) {
    return which == OrderStat::min ? min_moment : 2.0 * moment(m, order) - min_moment;
  };
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Exponential>) {
          // Minimum of two iid exponentials is exponential at twice the rate.
          return from_min(std::exp(num::lfactorial(static_cast<std::size_t>(order))) /
                          std::pow(2.0 * v.rate, order));
        } else if constexpr (std::is_same_v<V, MixedErlang>) {
          // The minimum has finite weight support (no truncation error); the
          // maximum follows from min + max = 2 E[X^m].
          return from_min(moment(Marginal{me_order_weights(v).first}, order));
        } else if constexpr (std::is_same_v<V, ParetoIV>) {
          // Squaring the survival function doubles the tail index.
          check_pareto_order(v, 2.0 * v.shape, order, "ParetoIV minimum");
          if (which == OrderStat::max) check_pareto_order(v, v.shape, order, "ParetoIV");
          return from_min(pareto_shifted_moment(v, 2.0 * v.shape, order));
        } else if constexpr (std::is_same_v<V, Weibull>) {
          return from_min(std::pow(2.0, -order / v.shape) * moment(m, order));
        } else {
          std::ostringstream os;
          os << variant_name(m)
             << " has no closed-form order-statistic moments; discretize the marginal "
                "and use the discrete aggregation path";
          throw validation_error(os.str());
        }
      },
      m);
}

std::pair<MixedErlang, MixedErlang> me_order_weights(const MixedErlang& m,
                                                     const NumericOptions& options) {
  // Normalize up front: weights that sum to 1 - trunc_eps (legal input) would
  // otherwise keep the tail conditions below from ever being met.
  std::vector<double> q = m.weights;
  {
    num::Accumulator sum;
    for (double x : q) sum.add(x);
    if (!(sum.total() > 0.0)) throw validation_error("me_order_weights: zero weight mass");
    for (double& x : q) x /= sum.total();
  }
  const std::size_t len = q.size();
  std::vector<double> cum(len + 1, 0.0);  // cum[j] = Q_j = sum of q_1..q_j
  for (std::size_t j = 0; j < len; ++j) cum[j + 1] = std::min(cum[j] + q[j], 1.0);

  std::vector<double> wmin, wmax;
  num::Accumulator smin, smax;
  const double ln2 = std::numbers::ln2;
  for (std::size_t j = 1;; ++j) {
    if (j > options.shape_cap) {
      throw numeric_error(
          "me_order_weights: shape cap reached before the tail fell below trunc_eps");
    }
    num::Accumulator amin, amax;
    const std::size_t m_hi = std::min(j - 1, len - 1);
    for (std::size_t mm = 0; mm <= m_hi; ++mm) {
      if (q[mm] == 0.0) continue;
      // 2^(1-j) C(j-1, m) in log space: shapes reach into the thousands.
      const double b =
          std::exp(num::lchoose(j - 1, mm) - static_cast<double>(j - 1) * ln2);
      const std::size_t tail_idx = std::min(j - 1 - mm, len);
      amin.add(b * q[mm] * (1.0 - cum[tail_idx]));
      amax.add(b * q[mm] * cum[tail_idx]);
    }
    wmin.push_back(amin.total());
    wmax.push_back(amax.total());
    smin.add(amin.total());
    smax.add(amax.total());
    if (1.0 - smin.total() <= options.trunc_eps &&
        1.0 - smax.total() <= options.trunc_eps) {
      break;
    }
  }
  trim_and_renormalize(wmin);
  trim_and_renormalize(wmax);
  return {MixedErlang{2.0 * m.rate, std::move(wmin)},
          MixedErlang{2.0 * m.rate, std::move(wmax)}};
}

MixedErlang rescale_rate(const MixedErlang& m, double new_rate,
                         const NumericOptions& options) {
  check_positive(new_rate, "rescale_rate new rate");
  if (new_rate < m.rate * (1.0 - 1e-12)) {
    throw validation_error("rescale_rate: new rate must be >= current rate");
  }
  const double p = m.rate / new_rate;
  if (p >= 1.0 - 1e-15) {
    return MixedErlang{new_rate, m.weights};
  }
  std::vector<double> out;
  for (std::size_t j = 1; j <= m.weights.size(); ++j) {
    const double qj = m.weights[j - 1];
    if (qj == 0.0) continue;
    // Spread q_j over shapes n >= j with NegativeBinomial(j, p) masses,
    // anchored at the mode so the start never underflows.
    const std::size_t mode =
        std::max(j, static_cast<std::size_t>(static_cast<double>(j) / p));
    const double log_at_mode = num::lchoose(mode - 1, j - 1) +
                               static_cast<double>(j) * std::log(p) +
                               static_cast<double>(mode - j) * std::log1p(-p);
    const double tail_tol = options.trunc_eps * qj;
    std::vector<std::pair<std::size_t, double>> terms;
    // Step ratios slide monotonically away from 1 on both sides of the mode,
    // so the dropped tail is bounded by term * r / (1 - r) at the cut.
    double t = std::exp(log_at_mode);
    for (std::size_t n = mode;; ++n) {
      if (n > options.shape_cap) {
        throw numeric_error("rescale_rate: shape cap reached while spreading weights");
      }
      terms.emplace_back(n, t);
      const double r = (static_cast<double>(n) / static_cast<double>(n - j + 1)) * (1.0 - p);
      t *= r;
      if (r < 1.0 && t * r / (1.0 - r) <= tail_tol) {
        terms.emplace_back(n + 1, t);
        break;
      }
    }
    t = std::exp(log_at_mode);
    for (std::size_t n = mode; n-- > j;) {
      const double r =
          static_cast<double>(n - j + 1) / (static_cast<double>(n) * (1.0 - p));
      t *= r;
      terms.emplace_back(n, t);
      if (r < 1.0 && t * r / (1.0 - r) <= tail_tol) break;
    }
    for (const auto& [n, val] : terms) {
      if (out.size() < n) out.resize(n, 0.0);
      out[n - 1] += qj * val;
    }
  }
  trim_and_renormalize(out);
  return MixedErlang{new_rate, std::move(out)};
}

Discrete discrete_os_pmf(const Discrete& m, OrderStat which) {
  const std::vector<double>& p = m.masses;
  std::vector<double> out(p.size());
  double cum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    cum += p[j];
    if (which == OrderStat::min) {
      out[j] = 2.0 * p[j] * (1.0 - cum) + p[j] * p[j];
    } else {
      out[j] = 2.0 * p[j] * cum - p[j] * p[j];
    }
  }
  return Discrete{m.span, std::move(out)};
}

MixedErlang as_mixed_erlang(const Marginal& m) {
  if (const auto* e = std::get_if<Exponential>(&m)) {
    return MixedErlang{e->rate, {1.0}};
  }
  if (const auto* me = std::get_if<MixedErlang>(&m)) {
    return *me;
  }
  std::ostringstream os;
  os << variant_name(m) << " marginal cannot be used on the mixed-Erlang path";
  throw validation_error(os.str());
}

double me_cdf(const MixedErlang& m, double x) {
  if (x <= 0.0) return 0.0;
  const std::size_t len = m.weights.size();
  const std::vector<double> pois = num::poisson_pmf_prefix(m.rate * x, len);
  // F(x) = 1 - sum_j q_j Pr(Pois < j), accumulating the Poisson cdf once.
  num::Accumulator acc;
  double pois_cdf = 0.0;
  for (std::size_t j = 1; j <= len; ++j) {
    pois_cdf += pois[j - 1];
    if (m.weights[j - 1] != 0.0) acc.add(m.weights[j - 1] * pois_cdf);
  }
  return std::clamp(1.0 - acc.total(), 0.0, 1.0);
}

double me_pdf(const MixedErlang& m, double x) {
  if (x <= 0.0) return 0.0;
  const std::size_t len = m.weights.size();
  const std::vector<double> pois = num::poisson_pmf_prefix(m.rate * x, len);
  num::Accumulator acc;
  for (std::size_t j = 1; j <= len; ++j) {
    if (m.weights[j - 1] != 0.0) acc.add(m.weights[j - 1] * pois[j - 1]);
  }
  return m.rate * acc.total();
}

double me_lst(const MixedErlang& m, double t) {
  const double z = m.rate / (m.rate + t);
  // Horner over the weight sequence.
  double acc = 0.0;
  for (std::size_t j = m.weights.size(); j-- > 0;) {
    acc = acc * z + m.weights[j];
  }
  return acc * z;
}

double me_mean(const MixedErlang& m) {
  num::Accumulator acc;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    acc.add(m.weights[j] * static_cast<double>(j + 1));
  }
  return acc.total() / m.rate;
}

double me_variance(const MixedErlang& m) {
  num::Accumulator first, second;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    const double shape = static_cast<double>(j + 1);
    first.add(m.weights[j] * shape);
    second.add(m.weights[j] * shape * (shape + 1.0));
  }
  const double mu = first.total() / m.rate;
  return second.total() / (m.rate * m.rate) - mu * mu;
}

double me_value_at_risk(const MixedErlang& m, double kappa, const NumericOptions& options) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw validation_error("value at risk: level must lie in (0, 1)");
  }
  const double scale = me_mean(m) + 40.0 * std::sqrt(std::max(me_variance(m), 0.0));
  return invert_cdf([&](double x) { return me_cdf(m, x); }, kappa, scale, options);
}

double me_tail_value_at_risk(const MixedErlang& m, double kappa,
                             const NumericOptions& options) {
  const double v = me_value_at_risk(m, kappa, options);
  const std::size_t len = m.weights.size();
  // TVaR = sum_j q_j (j / rate) Hbar(v; j+1, rate) / (1 - kappa); the Erlang
  // survival Hbar(v; j+1, rate) equals Pr(Pois(rate v) <= j).
  const std::vector<double> pois = num::poisson_pmf_prefix(m.rate * v, len + 1);
  num::Accumulator acc;
  double pois_cdf = pois[0];
  for (std::size_t j = 1; j <= len; ++j) {
    pois_cdf += pois[j];
    if (m.weights[j - 1] != 0.0) {
      acc.add(m.weights[j - 1] * static_cast<double>(j) * pois_cdf);
    }
  }
  return acc.total() / (m.rate * (1.0 - kappa));
}

}  // namespace fgmrisk
