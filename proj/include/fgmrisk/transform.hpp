#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "fgmrisk/bernoulli.hpp"
#include "fgmrisk/options.hpp"

namespace fgmrisk::detail {

struct TransformDiagnostics {
  std::size_t dft_length = 0;
  double min_raw_value = 0.0;     // most negative mass before clipping
  double max_imag_residue = 0.0;  // largest |Im| after the inverse transform
  double raw_sum = 0.0;           // mass sum before renormalization
};

/// pmf of sum_k V_k where V_k has pmf pmf_pairs[k].first when I_k = 0 and
/// pmf_pairs[k].second when I_k = 1, mixed over the scheme. Vectors are
/// value-indexed (entry j is the mass at j) and must fit in dft_length.
/// Negative output masses above -1e-9 are clipped to zero, anything below
/// raises numeric_error, as does an imaginary residue above 1e-9.
std::vector<double> dependent_convolution(
    const BernoulliScheme& scheme,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pmf_pairs,
    std::size_t dft_length, TransformDiagnostics* diagnostics = nullptr);

/// Forward transforms of the (deduplicated) per-coordinate pmf pairs; shared
/// with the allocation engine which needs the node values directly.
struct CoordinateSpectra {
  // spectra[u] holds the forward transforms of unique pair u.
  std::vector<std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>>
      spectra;
  std::vector<std::size_t> index_of_coordinate;
  std::size_t dft_length = 0;
};

CoordinateSpectra transform_coordinates(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pmf_pairs,
    std::size_t dft_length);

/// Inverse transform with the clipping/residue policy described above.
std::vector<double> realize_pmf(std::vector<std::complex<double>> spectrum,
                                TransformDiagnostics* diagnostics);

}  // namespace fgmrisk::detail
