#include "fgmrisk/aggregate_me.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fgmrisk/numeric.hpp"
#include "fgmrisk/transform.hpp"

namespace fgmrisk {

namespace detail {

std::vector<std::pair<MixedErlang, MixedErlang>> unified_order_weights(
    const Portfolio& p, const NumericOptions& options, double* unified_rate) {
  validate(p);
  double beta = 0.0;
  std::vector<MixedErlang> mes;
  mes.reserve(p.marginals.size());
  for (const Marginal& m : p.marginals) {
    mes.push_back(as_mixed_erlang(m));
    beta = std::max(beta, mes.back().rate);
  }
  if (unified_rate != nullptr) *unified_rate = beta;
  std::vector<std::pair<MixedErlang, MixedErlang>> pairs;
  pairs.reserve(mes.size());
  for (MixedErlang& me : mes) {
    if (me.rate < beta * (1.0 - 1e-12)) {
      me = rescale_rate(me, beta, options);
    } else {
      me.rate = beta;
    }
    pairs.push_back(me_order_weights(me, options));
  }
  return pairs;
}

std::size_t choose_dft_length(std::size_t support, std::size_t d_times_omega,
                              const NumericOptions& options) {
  const std::size_t n = num::next_pow2(std::max(support + 1, d_times_omega));
  if (n > (std::size_t{1} << options.dft_cap_log2)) {
    std::ostringstream os;
    os << "transform length " << n << " exceeds the cap 2^" << options.dft_cap_log2;
    throw numeric_error(os.str());
  }
  return n;
}

}  // namespace detail

namespace {

// Weight vector (index = shape - 1) from a value-indexed pmf whose entry 0
// carries at most transform noise.
std::vector<double> weights_from_value_pmf(std::vector<double> pmf) {
  if (!pmf.empty() && pmf.front() > 1e-9) {
    throw numeric_error("aggregate weights: unexpected mass at shape zero");
  }
  if (!pmf.empty()) pmf.erase(pmf.begin());
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  num::Accumulator sum;
  for (double x : pmf) sum.add(x);
  if (!(sum.total() > 0.0)) throw numeric_error("aggregate weights: no mass left");
  for (double& x : pmf) x /= sum.total();
  return pmf;
}

AggregateME finish_aggregate(double rate2, std::vector<double> value_pmf,
                             const detail::TransformDiagnostics& diag,
                             const Portfolio* p, const NumericOptions& options,
                             double expected_mean) {
  AggregateME out;
  out.law = MixedErlang{rate2, weights_from_value_pmf(std::move(value_pmf))};
  out.provenance.portfolio_hash = p != nullptr ? portfolio_hash(*p) : 0;
  out.provenance.trunc_eps = options.trunc_eps;
  out.provenance.dft_length = diag.dft_length;
  out.provenance.min_raw_weight = diag.min_raw_value;
  out.provenance.max_imag_residue = diag.max_imag_residue;
  out.provenance.raw_weight_sum = diag.raw_sum;
  const double mu = out.mean();
  if (std::abs(mu - expected_mean) > 1e-8 * std::max(1.0, std::abs(expected_mean))) {
    std::ostringstream os;
    os << "aggregate mean " << mu << " drifted from the marginal total " << expected_mean;
    throw numeric_error(os.str());
  }
  return out;
}

}  // namespace

AggregateME aggregate(const Portfolio& p, const NumericOptions& options) {
  const BernoulliScheme scheme = portfolio_scheme(p);
  double beta = 0.0;
  const auto order_pairs = detail::unified_order_weights(p, options, &beta);

  std::size_t support = 0;
  std::size_t omega = 0;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> value_pairs;
  value_pairs.reserve(order_pairs.size());
  for (const auto& [mn, mx] : order_pairs) {
    const std::size_t len = std::max(mn.weights.size(), mx.weights.size());
    support += len;
    omega = std::max(omega, len + 1);
    std::vector<double> lo(mn.weights.size() + 1, 0.0);
    std::copy(mn.weights.begin(), mn.weights.end(), lo.begin() + 1);
    std::vector<double> hi(mx.weights.size() + 1, 0.0);
    std::copy(mx.weights.begin(), mx.weights.end(), hi.begin() + 1);
    value_pairs.emplace_back(std::move(lo), std::move(hi));
  }

  num::Accumulator mean_sum;
  for (const Marginal& m : p.marginals) mean_sum.add(mean(m));

  std::size_t n = detail::choose_dft_length(support, value_pairs.size() * omega, options);
  for (;;) {
    detail::TransformDiagnostics diag;
    std::vector<double> pmf = detail::dependent_convolution(scheme, value_pairs, n, &diag);
    // Aliasing guard: mass at the last index means the transform wrapped.
    if (pmf.back() > options.trunc_eps &&
        n < (std::size_t{1} << options.dft_cap_log2)) {
      n *= 2;
      continue;
    }
    if (pmf.back() > options.trunc_eps) {
      throw numeric_error("aggregate: tail mass persists at the transform cap");
    }
    return finish_aggregate(2.0 * beta, std::move(pmf), diag, &p, options, mean_sum.total());
  }
}

AggregateME exp_iid_fast(int dimension, double rate, std::span<const double> count_pmf,
                         const NumericOptions& options) {
  if (dimension < 1) throw validation_error("exp_iid_fast: dimension must be >= 1");
  if (!(rate > 0.0)) throw validation_error("exp_iid_fast: rate must be positive");
  if (count_pmf.size() != static_cast<std::size_t>(dimension) + 1) {
    throw validation_error("exp_iid_fast: count pmf must have dimension+1 entries");
  }
  const std::size_t d = static_cast<std::size_t>(dimension);
  // Shape count M = d + T, where T | N=n is the number of fair-coin flips
  // needed for n heads (NegativeBinomial(n, 1/2) on {n, n+1, ...}).
  std::vector<double> weights(d, 0.0);  // index = shape - 1
  num::Accumulator mean_m;
  for (std::size_t nn = 0; nn < count_pmf.size(); ++nn) {
    const double pn = count_pmf[nn];
    if (pn == 0.0) continue;
    if (pn < 0.0) throw validation_error("exp_iid_fast: negative count mass");
    mean_m.add(pn * static_cast<double>(d + 2 * nn));
    if (nn == 0) {
      weights[d - 1] += pn;
      continue;
    }
    const double ln_half = -std::numbers::ln2;
    const std::size_t mode = 2 * nn;
    const double log_at_mode =
        num::lchoose(mode - 1, nn - 1) + static_cast<double>(mode) * ln_half;
    const double tail_tol = options.trunc_eps * pn;
    double t = std::exp(log_at_mode);
    for (std::size_t v = mode;; ++v) {
      const std::size_t shape = d + v;
      if (shape > options.shape_cap) {
        throw numeric_error("exp_iid_fast: shape cap reached while expanding counts");
      }
      if (weights.size() < shape) weights.resize(shape, 0.0);
      weights[shape - 1] += pn * t;
      const double next = t * 0.5 * static_cast<double>(v) / static_cast<double>(v - nn + 1);
      if (next < tail_tol) break;
      t = next;
    }
    t = std::exp(log_at_mode);
    for (std::size_t v = mode; v-- > nn;) {
      t *= 2.0 * static_cast<double>(v - nn + 1) / static_cast<double>(v);
      const std::size_t shape = d + v;
      weights[shape - 1] += pn * t;
      if (t < tail_tol) break;
    }
  }
  while (weights.size() > 1 && weights.back() == 0.0) weights.pop_back();
  num::Accumulator sum;
  for (double w : weights) sum.add(w);
  for (double& w : weights) w /= sum.total();

  AggregateME out;
  out.law = MixedErlang{2.0 * rate, std::move(weights)};
  out.provenance.trunc_eps = options.trunc_eps;
  out.provenance.raw_weight_sum = sum.total();
  const double expected_mean = mean_m.total() / (2.0 * rate);
  if (std::abs(out.mean() - expected_mean) > 1e-8 * std::max(1.0, expected_mean)) {
    throw numeric_error("exp_iid_fast: aggregate mean drifted from the count-mixture mean");
  }
  return out;
}

AggregateME exp_iid_fast(int dimension, double rate, const BernoulliScheme& scheme,
                         const NumericOptions& options) {
  if (scheme.dimension() != dimension) {
    throw validation_error("exp_iid_fast: scheme dimension mismatch");
  }
  const std::vector<double> pmf = scheme.count_pmf();
  return exp_iid_fast(dimension, rate, pmf, options);
}

}  // namespace fgmrisk
