#include "fgmrisk/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "fgmrisk/numeric.hpp"
#include "fgmrisk/transform.hpp"

namespace fgmrisk {

namespace detail {

AllocationEngine build_allocation_engine(const Portfolio& p, const NumericOptions& options) {
  const BernoulliScheme scheme = portfolio_scheme(p);
  double beta = 0.0;
  const auto order_pairs = unified_order_weights(p, options, &beta);
  const std::size_t d = order_pairs.size();

  std::size_t support = 0;
  std::size_t omega = 0;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> value_pairs(d);
  for (std::size_t k = 0; k < d; ++k) {
    const auto& [mn, mx] = order_pairs[k];
    const std::size_t len = std::max(mn.weights.size(), mx.weights.size());
    support += len;
    omega = std::max(omega, len + 1);
    auto& [lo, hi] = value_pairs[k];
    lo.assign(mn.weights.size() + 1, 0.0);
    std::copy(mn.weights.begin(), mn.weights.end(), lo.begin() + 1);
    hi.assign(mx.weights.size() + 1, 0.0);
    std::copy(mx.weights.begin(), mx.weights.end(), hi.begin() + 1);
  }
  const std::size_t n = choose_dft_length(support, d * omega, options);
  const CoordinateSpectra spectra = transform_coordinates(value_pairs, n);

  AllocationEngine engine;
  engine.rate2 = 2.0 * beta;

  // Aggregate weights, one kernel sweep.
  std::vector<std::pair<std::complex<double>, std::complex<double>>> node(d);
  {
    std::vector<std::complex<double>> phi(n);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < d; ++k) {
        const auto& [lo, hi] = spectra.spectra[spectra.index_of_coordinate[k]];
        node[k] = {lo[t], hi[t]};
      }
      phi[t] = scheme.expected_product<std::complex<double>>(node);
    }
    TransformDiagnostics diag;
    std::vector<double> pmf = realize_pmf(std::move(phi), &diag);
    pmf.resize(std::min(pmf.size(), support + 1));
    if (!pmf.empty()) pmf.erase(pmf.begin());
    while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
    num::Accumulator sum;
    for (double x : pmf) sum.add(x);
    for (double& x : pmf) x /= sum.total();
    engine.aggregate_law = MixedErlang{engine.rate2, std::move(pmf)};
  }

  // Shape-weighted spectra of each risk's own weight pair.
  engine.coefficients.resize(d);
  std::vector<std::complex<double>> own_min(n), own_max(n), g0(n), g1(n);
  for (std::size_t m = 0; m < d; ++m) {
    {
      std::vector<std::complex<double>> a(n, 0.0), b(n, 0.0);
      const auto& [lo, hi] = value_pairs[m];
      for (std::size_t l = 0; l < lo.size(); ++l) a[l] = lo[l] * static_cast<double>(l);
      for (std::size_t l = 0; l < hi.size(); ++l) b[l] = hi[l] * static_cast<double>(l);
      num::fft(a, false);
      num::fft(b, false);
      own_min.swap(a);
      own_max.swap(b);
    }
    // Mixture spectra of the other risks, split on I_m through basis pairs.
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < d; ++k) {
        const auto& [lo, hi] = spectra.spectra[spectra.index_of_coordinate[k]];
        node[k] = {lo[t], hi[t]};
      }
      node[m] = {1.0, 0.0};
      g0[t] = scheme.expected_product<std::complex<double>>(node);
      node[m] = {0.0, 1.0};
      g1[t] = scheme.expected_product<std::complex<double>>(node);
    }
    std::vector<std::complex<double>> hat(n);
    for (std::size_t t = 0; t < n; ++t) {
      hat[t] = own_min[t] * g0[t] + own_max[t] * g1[t];
    }
    num::fft(hat, true);
    std::vector<double>& a = engine.coefficients[m];
    a.resize(support + 1);
    for (std::size_t l = 0; l <= support && l < hat.size(); ++l) {
      // Coefficients are mixtures of products of pmfs times a shape factor;
      // anything negative is transform noise.
      if (std::abs(hat[l].imag()) > 1e-9 * std::max(1.0, static_cast<double>(support))) {
        throw numeric_error("allocation engine: imaginary residue in coefficient transform");
      }
      a[l] = std::max(hat[l].real(), 0.0);
    }
  }
  return engine;
}

namespace {

double density_sum(const detail::AllocationEngine& engine, const std::vector<double>& a,
                   double s) {
  // sum_l a[l] pois(l; rate2 * s)
  const std::vector<double> pois = num::poisson_pmf_prefix(engine.rate2 * s, a.size());
  num::Accumulator acc;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l] != 0.0) acc.add(a[l] * pois[l]);
  }
  return acc.total();
}

double survival_sum(const detail::AllocationEngine& engine, const std::vector<double>& a,
                    double s) {
  // (1 / rate2) sum_l a[l] Pr(Pois(rate2 s) <= l)
  const std::vector<double> pois = num::poisson_pmf_prefix(engine.rate2 * s, a.size());
  num::Accumulator acc;
  double pois_cdf = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    pois_cdf += pois[l];
    if (a[l] != 0.0) acc.add(a[l] * pois_cdf);
  }
  return acc.total() / engine.rate2;
}

}  // namespace

}  // namespace detail

double expected_allocation_density(const Portfolio& p, int m, double s,
                                   const NumericOptions& options) {
  if (m < 0 || m >= p.dimension()) {
    throw validation_error("expected_allocation_density: risk index out of range");
  }
  if (!(s >= 0.0)) throw validation_error("expected_allocation_density: s must be >= 0");
  const auto engine = detail::build_allocation_engine(p, options);
  return detail::density_sum(engine, engine.coefficients[static_cast<std::size_t>(m)], s);
}

AllocationResult cmrs(const Portfolio& p, double s, const NumericOptions& options) {
  if (!(s > 0.0)) throw validation_error("cmrs: s must be positive");
  const auto engine = detail::build_allocation_engine(p, options);
  const double density = me_pdf(engine.aggregate_law, s);
  if (!(density > 1e-300)) {
    std::ostringstream os;
    os << "cmrs: the aggregate density at s = " << s
       << " is numerically zero; s lies outside the effective support";
    throw numeric_error(os.str());
  }
  AllocationResult out;
  out.context = s;
  out.reference = density;
  out.contributions.reserve(engine.coefficients.size());
  for (const auto& a : engine.coefficients) {
    out.contributions.push_back(detail::density_sum(engine, a, s) / density);
  }
  return out;
}

AllocationResult tvar_allocation(const Portfolio& p, double kappa,
                                 const NumericOptions& options) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw validation_error("tvar_allocation: level must lie in (0, 1)");
  }
  const auto engine = detail::build_allocation_engine(p, options);
  const double var = me_value_at_risk(engine.aggregate_law, kappa, options);
  AllocationResult out;
  out.context = kappa;
  out.reference = me_tail_value_at_risk(engine.aggregate_law, kappa, options);
  out.contributions.reserve(engine.coefficients.size());
  for (const auto& a : engine.coefficients) {
    out.contributions.push_back(detail::survival_sum(engine, a, var) / (1.0 - kappa));
  }
  return out;
}

}  // namespace fgmrisk
