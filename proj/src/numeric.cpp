#include "fgmrisk/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include "fgmrisk/errors.hpp"

namespace fgmrisk::num {

namespace {

constexpr std::size_t kLfactTable = 1u << 17;

const std::vector<double>& lfact_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLfactTable);
    for (std::size_t n = 0; n < kLfactTable; ++n) {
      t[n] = std::lgamma(static_cast<double>(n) + 1.0);
    }
    return t;
  }();
  return table;
}

}  // namespace

double lfactorial(std::size_t n) {
  const auto& t = lfact_table();
  if (n < t.size()) return t[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double lchoose(std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("lchoose: k > n");
  return lfactorial(n) - lfactorial(k) - lfactorial(n - k);
}

SignedLogGamma signed_lgamma(double x) {
  if (x > 0.0) return {std::lgamma(x), 1};
  if (x == std::floor(x)) {
    throw std::invalid_argument("signed_lgamma: pole at non-positive integer");
  }
  // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
  const double s = std::sin(std::numbers::pi * x);
  return {std::log(std::numbers::pi / std::abs(s)) - std::lgamma(1.0 - x),
          s >= 0.0 ? 1 : -1};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> poisson_pmf_prefix(double lambda, std::size_t count) {
  std::vector<double> p(count, 0.0);
  if (count == 0) return p;
  if (lambda <= 0.0) {
    p[0] = 1.0;
    return p;
  }
  const std::size_t anchor =
      std::min(count - 1, static_cast<std::size_t>(std::floor(lambda)));
  const double la = static_cast<double>(anchor);
  p[anchor] = std::exp(la * std::log(lambda) - lambda - lfactorial(anchor));
  for (std::size_t m = anchor; m-- > 0;) {
    p[m] = p[m + 1] * (static_cast<double>(m) + 1.0) / lambda;
  }
  for (std::size_t m = anchor + 1; m < count; ++m) {
    p[m] = p[m - 1] * lambda / static_cast<double>(m);
  }
  return p;
}

namespace {

void bit_reverse_permute(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw numeric_error("fft: length must be a power of two");
  }
  bit_reverse_permute(a);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

std::uint64_t hash_u64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_double(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  return hash_u64(h, bits);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace fgmrisk::num
