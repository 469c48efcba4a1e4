#include "fgmrisk/transform.hpp"

#include <algorithm>
#include <sstream>

#include "fgmrisk/errors.hpp"
#include "fgmrisk/numeric.hpp"

namespace fgmrisk::detail {

namespace {

constexpr double kClipFloor = -1e-9;
constexpr double kImagTol = 1e-9;

std::vector<std::complex<double>> forward(const std::vector<double>& pmf,
                                          std::size_t dft_length) {
  std::vector<std::complex<double>> a(dft_length);
  for (std::size_t i = 0; i < pmf.size(); ++i) a[i] = pmf[i];
  num::fft(a, false);
  return a;
}

}  // namespace

CoordinateSpectra transform_coordinates(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pmf_pairs,
    std::size_t dft_length) {
  CoordinateSpectra out;
  out.dft_length = dft_length;
  out.index_of_coordinate.resize(pmf_pairs.size());
  std::vector<const std::pair<std::vector<double>, std::vector<double>>*> unique;
  for (std::size_t k = 0; k < pmf_pairs.size(); ++k) {
    if (pmf_pairs[k].first.size() > dft_length || pmf_pairs[k].second.size() > dft_length) {
      throw numeric_error("transform_coordinates: pmf longer than the transform");
    }
    std::size_t found = unique.size();
    for (std::size_t u = 0; u < unique.size(); ++u) {
      if (*unique[u] == pmf_pairs[k]) {
        found = u;
        break;
      }
    }
    if (found == unique.size()) {
      unique.push_back(&pmf_pairs[k]);
      out.spectra.emplace_back(forward(pmf_pairs[k].first, dft_length),
                               forward(pmf_pairs[k].second, dft_length));
    }
    out.index_of_coordinate[k] = found;
  }
  return out;
}

std::vector<double> realize_pmf(std::vector<std::complex<double>> spectrum,
                                TransformDiagnostics* diagnostics) {
  num::fft(spectrum, true);
  std::vector<double> pmf(spectrum.size());
  double min_raw = 0.0;
  double max_imag = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    max_imag = std::max(max_imag, std::abs(spectrum[i].imag()));
    min_raw = std::min(min_raw, spectrum[i].real());
    pmf[i] = spectrum[i].real();
  }
  if (max_imag > kImagTol) {
    std::ostringstream os;
    os << "inverse transform left an imaginary residue of " << max_imag
       << "; the transform length is misconfigured";
    throw numeric_error(os.str());
  }
  if (min_raw < kClipFloor) {
    std::ostringstream os;
    os << "inverse transform produced mass " << min_raw
       << " below the clip floor; the transform length is misconfigured";
    throw numeric_error(os.str());
  }
  num::Accumulator sum;
  for (double& x : pmf) {
    x = std::max(x, 0.0);
    sum.add(x);
  }
  if (diagnostics != nullptr) {
    diagnostics->dft_length = pmf.size();
    diagnostics->min_raw_value = min_raw;
    diagnostics->max_imag_residue = max_imag;
    diagnostics->raw_sum = sum.total();
  }
  return pmf;
}

std::vector<double> dependent_convolution(
    const BernoulliScheme& scheme,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pmf_pairs,
    std::size_t dft_length, TransformDiagnostics* diagnostics) {
  if (static_cast<int>(pmf_pairs.size()) != scheme.dimension()) {
    throw validation_error("dependent_convolution: coordinate count does not match scheme");
  }
  const CoordinateSpectra spectra = transform_coordinates(pmf_pairs, dft_length);
  const std::size_t d = pmf_pairs.size();
  std::vector<std::pair<std::complex<double>, std::complex<double>>> node(d);
  std::vector<std::complex<double>> phi(dft_length);
  for (std::size_t t = 0; t < dft_length; ++t) {
    for (std::size_t k = 0; k < d; ++k) {
      const auto& [lo, hi] = spectra.spectra[spectra.index_of_coordinate[k]];
      node[k] = {lo[t], hi[t]};
    }
    phi[t] = scheme.expected_product<std::complex<double>>(node);
  }
  return realize_pmf(std::move(phi), diagnostics);
}

}  // namespace fgmrisk::detail
