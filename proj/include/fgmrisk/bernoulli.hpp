#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "fgmrisk/errors.hpp"
#include "fgmrisk/rng.hpp"

namespace fgmrisk {

// Dense mass tables are capped: beyond this the 2^d table does not fit.
inline constexpr int kDenseDimensionCap = 20;

/// Joint law of a d-variate Bernoulli vector whose margins are all
/// Bernoulli(1/2). Immutable after construction; evaluation is pure, so a
/// scheme may be shared freely across threads. Sampling takes a caller-owned
/// Rng.
class BernoulliScheme {
 public:
  /// Full mass table indexed by bitmask; bit k corresponds to coordinate k.
  struct Dense {
    std::vector<double> mass;
  };
  /// Exchangeable law described by the pmf of N = sum of the components.
  /// Conditional on N = n the vector is uniform over the C(d, n) arrangements.
  struct Exchangeable {
    std::vector<double> count_pmf;  // size d + 1
  };
  /// Mass 1/2 on the all-zeros vector and 1/2 on the all-ones vector.
  struct Comonotone {};
  /// Extreme negative dependence: uniform over the vectors with component sum
  /// d/2 (d even), or mass 1/2 split uniformly over sums (d-1)/2 and (d+1)/2
  /// (d odd).
  struct EndExchangeable {};
  /// Stationary symmetric two-state chain: start probability 1/2 and
  /// stay-probability (1 + alpha) / 2, with alpha in [-1, 1].
  struct Markov {
    double alpha = 0.0;
  };
  struct Independent {};

  using Variant =
      std::variant<Dense, Exchangeable, Comonotone, EndExchangeable, Markov, Independent>;

  static BernoulliScheme dense(std::vector<double> mass);
  static BernoulliScheme exchangeable(std::vector<double> count_pmf);
  static BernoulliScheme comonotone(int dimension);
  static BernoulliScheme end(int dimension);
  static BernoulliScheme markov(int dimension, double alpha);
  static BernoulliScheme independent(int dimension);

  int dimension() const noexcept { return dimension_; }
  const Variant& variant() const noexcept { return variant_; }
  const char* variant_name() const noexcept;

  /// Mass of one point of {0,1}^d.
  double pmf(std::span<const int> bits) const;

  /// E[prod_{k in subset} (I_k - 1/2)] over 0-based coordinate indices.
  double central_mixed_moment(std::span<const int> subset) const;

  /// Law of N = sum of the components, as a vector of size d + 1.
  std::vector<double> count_pmf() const;

  void sample(Rng& rng, std::span<int> out) const;
  std::vector<int> sample(Rng& rng) const;

  /// E[prod_k g_k(I_k)] for per-coordinate value pairs (g_k(0), g_k(1)).
  /// Dense runs in O(d 2^d); Independent, Comonotone and Markov in O(d);
  /// Exchangeable and END in O(d^2) through the stratum-uniform recursion
  /// (O(d) per stratum when all pairs coincide).
  template <class T>
  T expected_product(std::span<const std::pair<T, T>> g) const;

 private:
  BernoulliScheme(int dimension, Variant v)
      : dimension_(dimension), variant_(std::move(v)) {}

  int dimension_;
  Variant variant_;
};

namespace detail {

template <class T>
T dense_expected_product(const std::vector<double>& mass,
                         std::span<const std::pair<T, T>> g) {
  const std::size_t d = g.size();
  T total{};
  for (std::size_t m = 0; m < mass.size(); ++m) {
    if (mass[m] == 0.0) continue;
    T prod = T{1};
    for (std::size_t k = 0; k < d; ++k) {
      prod *= ((m >> k) & 1u) ? g[k].second : g[k].first;
    }
    total += mass[m] * prod;
  }
  return total;
}

/// b[n] = E[prod_k g_k(I_k) | sum I = n] for the stratum-uniform law.
/// Appending coordinate j to a uniform arrangement keeps it uniform, which
/// gives the convex recursion below; magnitudes never exceed prod_k max|g_k|.
template <class T>
std::vector<T> stratum_conditional_products(std::span<const std::pair<T, T>> g) {
  const std::size_t d = g.size();
  std::vector<T> b(d + 1, T{});
  b[0] = T{1};
  for (std::size_t j = 1; j <= d; ++j) {
    const T g0 = g[j - 1].first;
    const T g1 = g[j - 1].second;
    const double dj = static_cast<double>(j);
    for (std::size_t n = j + 1; n-- > 0;) {
      T v = b[n] * (g0 * (static_cast<double>(j - n) / dj));
      if (n > 0) v += b[n - 1] * (g1 * (static_cast<double>(n) / dj));
      b[n] = v;
    }
  }
  return b;
}

template <class T>
std::vector<T> stratum_conditional_products_iid(const std::pair<T, T>& g,
                                                std::size_t d) {
  // All coordinates identical: every arrangement in a stratum has the same
  // product g1^n g0^(d-n).
  std::vector<T> pow0(d + 1), pow1(d + 1);
  pow0[0] = T{1};
  pow1[0] = T{1};
  for (std::size_t j = 1; j <= d; ++j) {
    pow0[j] = pow0[j - 1] * g.first;
    pow1[j] = pow1[j - 1] * g.second;
  }
  std::vector<T> b(d + 1);
  for (std::size_t n = 0; n <= d; ++n) b[n] = pow1[n] * pow0[d - n];
  return b;
}

template <class T>
bool all_pairs_equal(std::span<const std::pair<T, T>> g) {
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (!(g[k] == g[0])) return false;
  }
  return true;
}

template <class T>
std::vector<T> conditional_products(std::span<const std::pair<T, T>> g) {
  if (!g.empty() && all_pairs_equal(g)) {
    return stratum_conditional_products_iid(g[0], g.size());
  }
  return stratum_conditional_products(g);
}

template <class T>
T markov_expected_product(double alpha, std::span<const std::pair<T, T>> g) {
  const double stay = 0.5 * (1.0 + alpha);
  const double move = 0.5 * (1.0 - alpha);
  T a0 = g[0].first * 0.5;
  T a1 = g[0].second * 0.5;
  for (std::size_t k = 1; k < g.size(); ++k) {
    const T n0 = (a0 * stay + a1 * move) * g[k].first;
    const T n1 = (a0 * move + a1 * stay) * g[k].second;
    a0 = n0;
    a1 = n1;
  }
  return a0 + a1;
}

std::vector<double> end_count_pmf(int dimension);

}  // namespace detail

template <class T>
T BernoulliScheme::expected_product(std::span<const std::pair<T, T>> g) const {
  if (static_cast<int>(g.size()) != dimension_) {
    throw validation_error("expected_product: value-pair count does not match dimension");
  }
  return std::visit(
      [&](const auto& v) -> T {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Dense>) {
          return detail::dense_expected_product(v.mass, g);
        } else if constexpr (std::is_same_v<V, Independent>) {
          T total = T{1};
          for (const auto& [g0, g1] : g) total *= (g0 + g1) * 0.5;
          return total;
        } else if constexpr (std::is_same_v<V, Comonotone>) {
          T p0 = T{1}, p1 = T{1};
          for (const auto& [g0, g1] : g) {
            p0 *= g0;
            p1 *= g1;
          }
          return (p0 + p1) * 0.5;
        } else if constexpr (std::is_same_v<V, Markov>) {
          return detail::markov_expected_product(v.alpha, g);
        } else {
          const auto mix = [&](const std::vector<double>& pmf) -> T {
            const std::vector<T> b = detail::conditional_products(g);
            T total{};
            for (std::size_t n = 0; n < pmf.size(); ++n) {
              if (pmf[n] != 0.0) total += b[n] * pmf[n];
            }
            return total;
          };
          if constexpr (std::is_same_v<V, EndExchangeable>) {
            return mix(detail::end_count_pmf(dimension_));
          } else {
            return mix(v.count_pmf);
          }
        }
      },
      variant_);
}

}  // namespace fgmrisk
