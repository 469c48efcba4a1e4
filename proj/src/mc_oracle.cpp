#include "fgmrisk/mc_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "fgmrisk/numeric.hpp"
#include "fgmrisk/rng.hpp"

namespace fgmrisk {

double SampleBatch::row_sum(std::size_t row) const {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += value(row, k);
  return s;
}

namespace {

// Repeated-inversion accelerator: closed forms pass through; bisection-based
// quantiles get a knot table once, then per draw a short bisection inside the
// bracketing cell to the same absolute tolerance as the direct quantile.
class FastQuantile {
 public:
  FastQuantile(const Marginal& m, const NumericOptions& options)
      : marginal_(&m), options_(options) {
    closed_form_ = !std::holds_alternative<MixedErlang>(m) &&
                   !std::holds_alternative<LogNormal>(m);
    if (closed_form_) return;
    knots_.resize(kCells + 1);
    for (std::size_t i = 0; i <= kCells; ++i) {
      const double u = std::max(1e-14, std::min(1.0 - 1e-14,
                                                static_cast<double>(i) / kCells));
      knots_[i] = quantile(m, u, options_);
    }
    tol_ = options_.bisect_tol * std::max(1.0, mean(m));
  }

  double operator()(double u) const {
    if (closed_form_) return quantile(*marginal_, u, options_);
    const double pos = u * kCells;
    const auto cell = static_cast<std::size_t>(std::min(pos, kCells - 1.0));
    double lo = knots_[cell];
    double hi = knots_[cell + 1];
    if (u <= 1e-14) return lo;
    if (u >= 1.0 - 1e-14) return hi;
    // Newton from the interpolated seed, safeguarded by the cell bracket.
    double x = lo + (hi - lo) * std::clamp(pos - static_cast<double>(cell), 0.0, 1.0);
    for (int it = 0; it < 80 && hi - lo > tol_; ++it) {
      const double diff = cdf(*marginal_, x) - u;
      if (diff >= 0.0) {
        hi = x;
      } else {
        lo = x;
      }
      const double dens = pdf(*marginal_, x);
      double next = dens > 0.0 && std::isfinite(dens) ? x - diff / dens : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 0.25 * tol_) return next;
      x = next;
    }
    return hi;
  }

 private:
  static constexpr double kCells = 4096.0;
  const Marginal* marginal_;
  NumericOptions options_;
  bool closed_form_ = false;
  double tol_ = 0.0;
  std::vector<double> knots_;
};

}  // namespace

SampleBatch sample_portfolio(const Portfolio& p, std::size_t n, std::uint64_t seed,
                             const NumericOptions& options) {
  validate(p);
  if (n < 1) throw validation_error("sample_portfolio: need at least one draw");
  const BernoulliScheme scheme = portfolio_scheme(p);
  const int d = p.dimension();

  SampleBatch batch;
  batch.n = n;
  batch.d = d;
  batch.seed = seed;
  batch.values.resize(n * static_cast<std::size_t>(d));

  Rng scheme_rng(Rng::substream_seed(seed, 0));
  std::vector<Rng> coord_rngs;
  coord_rngs.reserve(static_cast<std::size_t>(d));
  std::vector<FastQuantile> quantiles;
  quantiles.reserve(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    coord_rngs.emplace_back(Rng::substream_seed(seed, static_cast<std::uint64_t>(k) + 1));
    quantiles.emplace_back(p.marginals[static_cast<std::size_t>(k)], options);
  }

  std::vector<int> bits(static_cast<std::size_t>(d));
  for (std::size_t row = 0; row < n; ++row) {
    scheme.sample(scheme_rng, bits);
    for (int k = 0; k < d; ++k) {
      const double v = coord_rngs[static_cast<std::size_t>(k)].next_uniform_open();
      // Inverse Beta(1,2) / Beta(2,1) cdfs of the order-statistic transform.
      const double u = bits[static_cast<std::size_t>(k)] == 0
                           ? 1.0 - std::sqrt(1.0 - v)
                           : std::sqrt(v);
      batch.values[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] =
          quantiles[static_cast<std::size_t>(k)](u);
    }
  }
  return batch;
}

namespace {

std::vector<double> row_sums(const SampleBatch& b) {
  std::vector<double> s(b.n);
  for (std::size_t i = 0; i < b.n; ++i) s[i] = b.row_sum(i);
  return s;
}

Estimate mean_with_se(const std::vector<double>& x) {
  num::Accumulator sum;
  for (double v : x) sum.add(v);
  const double n = static_cast<double>(x.size());
  const double mu = sum.total() / n;
  num::Accumulator sq;
  for (double v : x) sq.add((v - mu) * (v - mu));
  const double var = sq.total() / (n - 1.0);
  return {mu, std::sqrt(var / n)};
}

}  // namespace

Estimate estimate(const SampleBatch& batch, const Statistic& statistic) {
  if (batch.n == 0) throw validation_error("estimate: empty batch");
  return std::visit(
      [&](const auto& stat) -> Estimate {
        using T = std::decay_t<decltype(stat)>;
        if constexpr (std::is_same_v<T, MeanOfSum>) {
          return mean_with_se(row_sums(batch));
        } else if constexpr (std::is_same_v<T, VarianceOfSum>) {
          const std::vector<double> s = row_sums(batch);
          const double n = static_cast<double>(batch.n);
          num::Accumulator sum;
          for (double v : s) sum.add(v);
          const double mu = sum.total() / n;
          num::Accumulator m2acc, m4acc;
          for (double v : s) {
            const double c = (v - mu) * (v - mu);
            m2acc.add(c);
            m4acc.add(c * c);
          }
          const double m2 = m2acc.total() / n;
          const double m4 = m4acc.total() / n;
          // Delta-method standard error of the sample variance.
          return {m2acc.total() / (n - 1.0), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
        } else if constexpr (std::is_same_v<T, RawMomentOfSum>) {
          if (stat.order < 1) throw validation_error("estimate: moment order must be >= 1");
          std::vector<double> s = row_sums(batch);
          for (double& v : s) v = std::pow(v, stat.order);
          return mean_with_se(s);
        } else if constexpr (std::is_same_v<T, CdfAt>) {
          const std::vector<double> s = row_sums(batch);
          double hits = 0.0;
          for (double v : s) {
            if (v <= stat.x) hits += 1.0;
          }
          const double n = static_cast<double>(batch.n);
          const double p = hits / n;
          return {p, std::sqrt(p * (1.0 - p) / n)};
        } else if constexpr (std::is_same_v<T, TvarAt>) {
          if (!(stat.kappa > 0.0 && stat.kappa < 1.0)) {
            throw validation_error("estimate: level must lie in (0, 1)");
          }
          std::vector<double> s = row_sums(batch);
          std::sort(s.begin(), s.end());
          const double n = static_cast<double>(batch.n);
          const auto var_idx = static_cast<std::size_t>(
              std::min(n - 1.0, std::ceil(stat.kappa * n) - 1.0));
          const double v = s[var_idx];
          // TVaR = v + E[(S - v)+] / (1 - kappa); se by the delta method on
          // the exceedance average.
          std::vector<double> exceed(batch.n);
          for (std::size_t i = 0; i < batch.n; ++i) exceed[i] = std::max(s[i] - v, 0.0);
          const Estimate e = mean_with_se(exceed);
          return {v + e.value / (1.0 - stat.kappa), e.std_error / (1.0 - stat.kappa)};
        } else if constexpr (std::is_same_v<T, TailAllocation>) {
          if (stat.k < 0 || stat.k >= batch.d) {
            throw validation_error("estimate: coordinate out of range");
          }
          std::vector<double> x(batch.n);
          for (std::size_t i = 0; i < batch.n; ++i) {
            x[i] = batch.row_sum(i) > stat.threshold ? batch.value(i, stat.k) : 0.0;
          }
          return mean_with_se(x);
        } else {
          if (stat.k < 0 || stat.k >= batch.d) {
            throw validation_error("estimate: coordinate out of range");
          }
          std::vector<double> x;
          for (std::size_t i = 0; i < batch.n; ++i) {
            const double s = batch.row_sum(i);
            if (s > stat.s - stat.half_width && s < stat.s + stat.half_width) {
              x.push_back(batch.value(i, stat.k));
            }
          }
          if (x.size() < 2) {
            throw numeric_error("estimate: conditioning band captured fewer than 2 draws");
          }
          return mean_with_se(x);
        }
      },
      statistic);
}

double default_band_half_width(const SampleBatch& batch) {
  const std::vector<double> s = row_sums(batch);
  const Estimate m = mean_with_se(s);
  const double sd = m.std_error * std::sqrt(static_cast<double>(batch.n));
  return 0.25 * sd / std::pow(static_cast<double>(batch.n), 0.25);
}

}  // namespace fgmrisk
