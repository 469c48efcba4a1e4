#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fgmrisk::num {

/// ln(n!), table-backed for small n.
double lfactorial(std::size_t n);

/// ln C(n, k); 0 for k == 0 or k == n, -inf style not needed (k <= n required).
double lchoose(std::size_t n, std::size_t k);

/// ln|Gamma(x)| with sign; valid for negative non-integer x via reflection.
struct SignedLogGamma {
  double log_abs;
  int sign;
};
SignedLogGamma signed_lgamma(double x);

std::size_t next_pow2(std::size_t n);

/// Poisson(lambda) pmf on {0, ..., count-1}, anchored at the mode so the
/// two-sided recursion only ever moves toward smaller values.
std::vector<double> poisson_pmf_prefix(double lambda, std::size_t count);

/// Neumaier compensated summation.
class Accumulator {
 public:
  void add(double v) noexcept {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double total() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// In-place radix-2 complex transform; size must be a power of two.
/// Forward uses exp(-2*pi*i*jk/n); inverse divides by n.
void fft(std::vector<std::complex<double>>& a, bool inverse);

/// FNV-1a style mixing for provenance hashes.
std::uint64_t hash_u64(std::uint64_t h, std::uint64_t v);
std::uint64_t hash_double(std::uint64_t h, double v);

/// SplitMix64 step, used for deriving rng substreams.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace fgmrisk::num
