#include "fgmrisk/bernoulli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fgmrisk/numeric.hpp"

namespace fgmrisk {

namespace {

constexpr double kMassTol = 1e-12;

void check_dimension(int d) {
  if (d < 1) throw validation_error("BernoulliScheme: dimension must be >= 1");
}

}  // namespace

namespace detail {

std::vector<double> end_count_pmf(int dimension) {
  std::vector<double> pmf(static_cast<std::size_t>(dimension) + 1, 0.0);
  if (dimension % 2 == 0) {
    pmf[static_cast<std::size_t>(dimension) / 2] = 1.0;
  } else {
    pmf[static_cast<std::size_t>(dimension - 1) / 2] = 0.5;
    pmf[static_cast<std::size_t>(dimension + 1) / 2] = 0.5;
  }
  return pmf;
}

}  // namespace detail

BernoulliScheme BernoulliScheme::dense(std::vector<double> mass) {
  const std::size_t size = mass.size();
  if (size < 2 || (size & (size - 1)) != 0) {
    throw validation_error("BernoulliScheme::dense: mass table size must be 2^d");
  }
  const int d = std::countr_zero(size);
  if (d > kDenseDimensionCap) {
    std::ostringstream os;
    os << "BernoulliScheme::dense: dimension " << d << " exceeds the dense cap of "
       << kDenseDimensionCap << "; use a structured variant";
    throw validation_error(os.str());
  }
  num::Accumulator sum;
  for (double m : mass) {
    if (m < -kMassTol) {
      throw validation_error("BernoulliScheme::dense: negative mass");
    }
    sum.add(m);
  }
  if (std::abs(sum.total() - 1.0) > kMassTol) {
    throw validation_error("BernoulliScheme::dense: masses must sum to 1");
  }
  // Each margin must be Bernoulli(1/2).
  for (int k = 0; k < d; ++k) {
    num::Accumulator margin;
    for (std::size_t m = 0; m < size; ++m) {
      if ((m >> k) & 1u) margin.add(mass[m]);
    }
    if (std::abs(margin.total() - 0.5) > kMassTol) {
      std::ostringstream os;
      os << "BernoulliScheme::dense: margin of coordinate " << k
         << " is not Bernoulli(1/2): Pr = " << margin.total();
      throw validation_error(os.str());
    }
  }
  for (double& m : mass) m = std::max(m, 0.0);
  return BernoulliScheme(d, Dense{std::move(mass)});
}

BernoulliScheme BernoulliScheme::exchangeable(std::vector<double> count_pmf) {
  if (count_pmf.size() < 2) {
    throw validation_error("BernoulliScheme::exchangeable: count pmf must have d+1 entries");
  }
  const int d = static_cast<int>(count_pmf.size()) - 1;
  num::Accumulator sum, mean;
  for (std::size_t n = 0; n < count_pmf.size(); ++n) {
    if (count_pmf[n] < -kMassTol) {
      throw validation_error("BernoulliScheme::exchangeable: negative mass");
    }
    sum.add(count_pmf[n]);
    mean.add(count_pmf[n] * static_cast<double>(n));
  }
  if (std::abs(sum.total() - 1.0) > kMassTol) {
    throw validation_error("BernoulliScheme::exchangeable: count pmf must sum to 1");
  }
  // Margin symmetry for an exchangeable law means E[N] = d/2.
  if (std::abs(mean.total() - 0.5 * d) > kMassTol * d) {
    throw validation_error(
        "BernoulliScheme::exchangeable: margins are not Bernoulli(1/2) (E[N] != d/2)");
  }
  for (double& m : count_pmf) m = std::max(m, 0.0);
  return BernoulliScheme(d, Exchangeable{std::move(count_pmf)});
}

BernoulliScheme BernoulliScheme::comonotone(int dimension) {
  check_dimension(dimension);
  return BernoulliScheme(dimension, Comonotone{});
}

BernoulliScheme BernoulliScheme::end(int dimension) {
  check_dimension(dimension);
  return BernoulliScheme(dimension, EndExchangeable{});
}

BernoulliScheme BernoulliScheme::markov(int dimension, double alpha) {
  check_dimension(dimension);
  if (!(alpha >= -1.0 && alpha <= 1.0)) {
    throw validation_error("BernoulliScheme::markov: alpha must lie in [-1, 1]");
  }
  return BernoulliScheme(dimension, Markov{alpha});
}

BernoulliScheme BernoulliScheme::independent(int dimension) {
  check_dimension(dimension);
  return BernoulliScheme(dimension, Independent{});
}

const char* BernoulliScheme::variant_name() const noexcept {
  return std::visit(
      [](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Dense>) return "dense";
        else if constexpr (std::is_same_v<V, Exchangeable>) return "exchangeable";
        else if constexpr (std::is_same_v<V, Comonotone>) return "comonotone";
        else if constexpr (std::is_same_v<V, EndExchangeable>) return "end";
        else if constexpr (std::is_same_v<V, Markov>) return "markov";
        else return "independent";
      },
      variant_);
}

double BernoulliScheme::pmf(std::span<const int> bits) const {
  if (static_cast<int>(bits.size()) != dimension_) {
    throw validation_error("BernoulliScheme::pmf: bit-vector length does not match dimension");
  }
  for (int b : bits) {
    if (b != 0 && b != 1) throw validation_error("BernoulliScheme::pmf: entries must be 0 or 1");
  }
  const int d = dimension_;
  const int ones = std::accumulate(bits.begin(), bits.end(), 0);
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Dense>) {
          std::size_t mask = 0;
          for (int k = 0; k < d; ++k) {
            if (bits[static_cast<std::size_t>(k)]) mask |= std::size_t{1} << k;
          }
          return v.mass[mask];
        } else if constexpr (std::is_same_v<V, Exchangeable>) {
          return v.count_pmf[static_cast<std::size_t>(ones)] /
                 std::exp(num::lchoose(static_cast<std::size_t>(d),
                                       static_cast<std::size_t>(ones)));
        } else if constexpr (std::is_same_v<V, Comonotone>) {
          return (ones == 0 || ones == d) ? 0.5 : 0.0;
        } else if constexpr (std::is_same_v<V, EndExchangeable>) {
          const std::vector<double> pmf = detail::end_count_pmf(d);
          return pmf[static_cast<std::size_t>(ones)] /
                 std::exp(num::lchoose(static_cast<std::size_t>(d),
                                       static_cast<std::size_t>(ones)));
        } else if constexpr (std::is_same_v<V, Markov>) {
          const double stay = 0.5 * (1.0 + v.alpha);
          const double move = 0.5 * (1.0 - v.alpha);
          double p = 0.5;
          for (int k = 1; k < d; ++k) {
            p *= (bits[static_cast<std::size_t>(k)] ==
                  bits[static_cast<std::size_t>(k - 1)])
                     ? stay
                     : move;
          }
          return p;
        } else {
          return std::ldexp(1.0, -d);
        }
      },
      variant_);
}

double BernoulliScheme::central_mixed_moment(std::span<const int> subset) const {
  if (subset.empty()) {
    throw validation_error("central_mixed_moment: subset must be non-empty");
  }
  std::vector<bool> seen(static_cast<std::size_t>(dimension_), false);
  for (int k : subset) {
    if (k < 0 || k >= dimension_) {
      throw validation_error("central_mixed_moment: coordinate index out of range");
    }
    if (seen[static_cast<std::size_t>(k)]) {
      throw validation_error("central_mixed_moment: repeated coordinate index");
    }
    seen[static_cast<std::size_t>(k)] = true;
  }
  std::vector<std::pair<double, double>> g(static_cast<std::size_t>(dimension_), {1.0, 1.0});
  for (int k : subset) g[static_cast<std::size_t>(k)] = {-0.5, 0.5};
  return expected_product<double>(g);
}

std::vector<double> BernoulliScheme::count_pmf() const {
  const int d = dimension_;
  return std::visit(
      [&](const auto& v) -> std::vector<double> {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Dense>) {
          std::vector<double> pmf(static_cast<std::size_t>(d) + 1, 0.0);
          for (std::size_t m = 0; m < v.mass.size(); ++m) {
            pmf[static_cast<std::size_t>(std::popcount(m))] += v.mass[m];
          }
          return pmf;
        } else if constexpr (std::is_same_v<V, Exchangeable>) {
          return v.count_pmf;
        } else if constexpr (std::is_same_v<V, Comonotone>) {
          std::vector<double> pmf(static_cast<std::size_t>(d) + 1, 0.0);
          pmf.front() = 0.5;
          pmf.back() = 0.5;
          return pmf;
        } else if constexpr (std::is_same_v<V, EndExchangeable>) {
          return detail::end_count_pmf(d);
        } else if constexpr (std::is_same_v<V, Markov>) {
          // Forward pass over (count, state).
          const double stay = 0.5 * (1.0 + v.alpha);
          const double move = 0.5 * (1.0 - v.alpha);
          const std::size_t n = static_cast<std::size_t>(d) + 1;
          std::vector<double> p0(n, 0.0), p1(n, 0.0);
          p0[0] = 0.5;
          p1[1] = 0.5;
          for (int k = 1; k < d; ++k) {
            std::vector<double> q0(n, 0.0), q1(n, 0.0);
            for (std::size_t c = 0; c <= static_cast<std::size_t>(k); ++c) {
              if (p0[c] != 0.0) {
                q0[c] += p0[c] * stay;
                q1[c + 1] += p0[c] * move;
              }
              if (p1[c] != 0.0) {
                q0[c] += p1[c] * move;
                q1[c + 1] += p1[c] * stay;
              }
            }
            p0.swap(q0);
            p1.swap(q1);
          }
          std::vector<double> pmf(n);
          for (std::size_t c = 0; c < n; ++c) pmf[c] = p0[c] + p1[c];
          return pmf;
        } else {
          std::vector<double> pmf(static_cast<std::size_t>(d) + 1);
          const double l2 = -static_cast<double>(d) * std::numbers::ln2;
          for (std::size_t c = 0; c <= static_cast<std::size_t>(d); ++c) {
            pmf[c] = std::exp(num::lchoose(static_cast<std::size_t>(d), c) + l2);
          }
          return pmf;
        }
      },
      variant_);
}

namespace {

// Draw a value from a pmf by inverting the running cumulative.
std::size_t draw_index(Rng& rng, std::span<const double> pmf) {
  const double u = rng.next_uniform();
  double c = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    c += pmf[i];
    if (u < c) return i;
  }
  return pmf.size() - 1;
}

// Set exactly `ones` coordinates uniformly at random.
void scatter_ones(Rng& rng, std::span<int> out, std::size_t ones) {
  const std::size_t d = out.size();
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t i = 0; i < ones; ++i) {
    const std::size_t j = i + rng.next_below(d - i);
    std::swap(idx[i], idx[j]);
    out[idx[i]] = 1;
  }
}

}  // namespace

void BernoulliScheme::sample(Rng& rng, std::span<int> out) const {
  if (static_cast<int>(out.size()) != dimension_) {
    throw validation_error("BernoulliScheme::sample: output length does not match dimension");
  }
  const int d = dimension_;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Dense>) {
          const std::size_t mask = draw_index(rng, v.mass);
          for (int k = 0; k < d; ++k) {
            out[static_cast<std::size_t>(k)] = static_cast<int>((mask >> k) & 1u);
          }
        } else if constexpr (std::is_same_v<V, Exchangeable>) {
          scatter_ones(rng, out, draw_index(rng, v.count_pmf));
        } else if constexpr (std::is_same_v<V, Comonotone>) {
          const int b = rng.next_uniform() < 0.5 ? 0 : 1;
          std::fill(out.begin(), out.end(), b);
        } else if constexpr (std::is_same_v<V, EndExchangeable>) {
          std::size_t ones = static_cast<std::size_t>(d) / 2;
          if (d % 2 == 1 && rng.next_uniform() < 0.5) ++ones;
          scatter_ones(rng, out, ones);
        } else if constexpr (std::is_same_v<V, Markov>) {
          const double stay = 0.5 * (1.0 + v.alpha);
          int state = rng.next_uniform() < 0.5 ? 0 : 1;
          out[0] = state;
          for (int k = 1; k < d; ++k) {
            if (rng.next_uniform() >= stay) state = 1 - state;
            out[static_cast<std::size_t>(k)] = state;
          }
        } else {
          for (int k = 0; k < d; ++k) {
            out[static_cast<std::size_t>(k)] = rng.next_uniform() < 0.5 ? 0 : 1;
          }
        }
      },
      variant_);
}

std::vector<int> BernoulliScheme::sample(Rng& rng) const {
  std::vector<int> out(static_cast<std::size_t>(dimension_));
  sample(rng, out);
  return out;
}

}  // namespace fgmrisk
