#include "fgmrisk/copula.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fgmrisk/numeric.hpp"

namespace fgmrisk {

namespace {

constexpr double kAdmissibilityTol = -1e-12;
constexpr std::size_t kSubsetCountCap = std::size_t{1} << 20;

// Unnormalized Walsh-Hadamard transform in place: out[i] = sum_j (-1)^{popcount(i&j)} a[j].
void walsh_transform(std::vector<double>& a) {
  const std::size_t n = a.size();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t k = i; k < i + len; ++k) {
        const double u = a[k];
        const double v = a[k + len];
        a[k] = u + v;
        a[k + len] = u - v;
      }
    }
  }
}

// Masses of the Bernoulli law determined by the theta map (Walsh expansion).
std::vector<double> walsh_masses(int dimension,
                                 std::span<const std::pair<SubsetMask, double>> entries) {
  const std::size_t n = std::size_t{1} << dimension;
  std::vector<double> w(n, 0.0);
  w[0] = 1.0;
  for (const auto& [mask, value] : entries) w[static_cast<std::size_t>(mask)] = value;
  walsh_transform(w);
  const double scale = std::ldexp(1.0, -dimension);
  for (double& x : w) x *= scale;
  return w;
}

std::vector<int> epsilon_of_mask(std::size_t point, int dimension) {
  // Sign pattern eps_k = 1 - 2 i_k of the violating point.
  std::vector<int> eps(static_cast<std::size_t>(dimension));
  for (int k = 0; k < dimension; ++k) {
    eps[static_cast<std::size_t>(k)] = ((point >> k) & 1u) ? -1 : 1;
  }
  return eps;
}

}  // namespace

SubsetMask subset_mask(std::span<const int> coordinates, int dimension) {
  SubsetMask mask = 0;
  for (int k : coordinates) {
    if (k < 0 || k >= dimension) {
      throw validation_error("subset_mask: coordinate index out of range");
    }
    const SubsetMask bit = SubsetMask{1} << k;
    if (mask & bit) throw validation_error("subset_mask: repeated coordinate index");
    mask |= bit;
  }
  return mask;
}

std::vector<int> subset_coordinates(SubsetMask mask) {
  std::vector<int> out;
  for (int k = 0; mask != 0; ++k, mask >>= 1) {
    if (mask & 1u) out.push_back(k);
  }
  return out;
}

FgmCopula::FgmCopula(int dimension, std::vector<std::pair<SubsetMask, double>> entries)
    : FgmCopula(dimension, std::move(entries), std::nullopt) {
  if (dimension_ <= kDenseDimensionCap) run_admissibility_check();
}

FgmCopula::FgmCopula(int dimension, std::vector<std::pair<SubsetMask, double>> entries,
                     std::optional<bool> admissible)
    : dimension_(dimension), entries_(std::move(entries)), admissible_(admissible) {
  if (dimension_ < 2) throw validation_error("FgmCopula: dimension must be >= 2");
  if (dimension_ > 64) {
    throw validation_error("FgmCopula: natural parameterization is capped at 64 coordinates");
  }
  sort_and_check_entries();
}

void FgmCopula::sort_and_check_entries() {
  const SubsetMask all =
      dimension_ == 64 ? ~SubsetMask{0} : ((SubsetMask{1} << dimension_) - 1);
  for (const auto& [mask, value] : entries_) {
    const int size = std::popcount(mask);
    if (size < 2 || (mask & ~all) != 0) {
      throw validation_error(
          "FgmCopula: subsets must have size >= 2 with coordinates inside the dimension");
    }
    if (!std::isfinite(value)) throw validation_error("FgmCopula: non-finite parameter");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].first == entries_[i - 1].first) {
      throw validation_error("FgmCopula: duplicate subset");
    }
  }
}

void FgmCopula::run_admissibility_check() {
  const std::vector<double> masses = walsh_masses(dimension_, entries_);
  std::size_t worst = 0;
  for (std::size_t i = 1; i < masses.size(); ++i) {
    if (masses[i] < masses[worst]) worst = i;
  }
  worst_mass_ = masses[worst];
  admissible_ = worst_mass_ >= kAdmissibilityTol;
  if (!*admissible_) violating_epsilon_ = epsilon_of_mask(worst, dimension_);
}

double FgmCopula::theta(SubsetMask subset) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), subset,
      [](const auto& entry, SubsetMask m) { return entry.first < m; });
  if (it != entries_.end() && it->first == subset) return it->second;
  return 0.0;
}

double FgmCopula::theta(std::span<const int> coordinates) const {
  return theta(subset_mask(coordinates, dimension_));
}

FgmCopula theta_from_scheme(const BernoulliScheme& scheme, int max_order) {
  const int d = scheme.dimension();
  if (d < 2) throw validation_error("theta_from_scheme: dimension must be >= 2");
  if (d > 64) throw validation_error("theta_from_scheme: dimension is capped at 64");
  if (max_order <= 0 || max_order > d) max_order = d;

  std::vector<std::pair<SubsetMask, double>> entries;

  if (const auto* dense = std::get_if<BernoulliScheme::Dense>(&scheme.variant())) {
    // One Walsh transform yields every theta at once.
    std::vector<double> w = dense->mass;
    walsh_transform(w);
    for (std::size_t mask = 1; mask < w.size(); ++mask) {
      const int size = std::popcount(mask);
      if (size >= 2 && size <= max_order && w[mask] != 0.0) {
        entries.emplace_back(static_cast<SubsetMask>(mask), w[mask]);
      }
    }
    return FgmCopula(d, std::move(entries), true);
  }

  // Subset count guard for the enumerated path.
  double count = 0.0;
  for (int k = 2; k <= max_order; ++k) {
    count += std::exp(num::lchoose(static_cast<std::size_t>(d), static_cast<std::size_t>(k)));
    if (count > static_cast<double>(kSubsetCountCap)) {
      std::ostringstream os;
      os << "theta_from_scheme: subset count up to order " << max_order
         << " exceeds the cap of 2^20; lower max_order";
      throw validation_error(os.str());
    }
  }

  const bool size_only =
      std::holds_alternative<BernoulliScheme::Exchangeable>(scheme.variant()) ||
      std::holds_alternative<BernoulliScheme::Comonotone>(scheme.variant()) ||
      std::holds_alternative<BernoulliScheme::EndExchangeable>(scheme.variant()) ||
      std::holds_alternative<BernoulliScheme::Independent>(scheme.variant());

  std::vector<double> theta_by_size(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (size_only) {
    std::vector<int> prefix;
    for (int k = 2; k <= max_order; ++k) {
      prefix.resize(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) prefix[static_cast<std::size_t>(i)] = i;
      theta_by_size[static_cast<std::size_t>(k)] =
          std::ldexp(k % 2 == 0 ? 1.0 : -1.0, k) * scheme.central_mixed_moment(prefix);
    }
  }

  for (int k = 2; k <= max_order; ++k) {
    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    while (true) {
      double value;
      if (size_only) {
        value = theta_by_size[static_cast<std::size_t>(k)];
      } else {
        value = std::ldexp(k % 2 == 0 ? 1.0 : -1.0, k) * scheme.central_mixed_moment(comb);
      }
      if (value != 0.0) entries.emplace_back(subset_mask(comb, d), value);
      int i = k - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == d - k + i) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return FgmCopula(d, std::move(entries), true);
}

BernoulliScheme scheme_from_theta(const FgmCopula& copula) {
  const int d = copula.dimension();
  if (d > kDenseDimensionCap) {
    throw validation_error("scheme_from_theta: dense reconstruction is capped at dimension 20");
  }
  std::vector<double> masses = walsh_masses(d, copula.entries());
  std::size_t worst = 0;
  for (std::size_t i = 1; i < masses.size(); ++i) {
    if (masses[i] < masses[worst]) worst = i;
  }
  if (masses[worst] < kAdmissibilityTol) {
    const std::vector<int> eps = epsilon_of_mask(worst, d);
    std::ostringstream os;
    os << "inadmissible parameters: reconstructed mass " << masses[worst]
       << " at sign pattern (";
    for (std::size_t i = 0; i < eps.size(); ++i) {
      os << (i ? "," : "") << (eps[i] > 0 ? "+1" : "-1");
    }
    os << ") is negative";
    throw inadmissible_error(os.str(), eps, masses[worst]);
  }
  for (double& m : masses) m = std::max(m, 0.0);
  return BernoulliScheme::dense(std::move(masses));
}

namespace {

void check_unit_cube(std::span<const double> u, int dimension) {
  if (static_cast<int>(u.size()) != dimension) {
    throw validation_error("cdf: point dimension mismatch");
  }
  for (double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw validation_error("cdf: point must lie in the unit cube");
    }
  }
}

}  // namespace

double cdf(const FgmCopula& copula, std::span<const double> u) {
  check_unit_cube(u, copula.dimension());
  double base = 1.0;
  for (double x : u) base *= x;
  if (base == 0.0) return 0.0;
  num::Accumulator corr;
  corr.add(1.0);
  for (const auto& [mask, value] : copula.entries()) {
    if (value == 0.0) continue;
    double prod = value;
    SubsetMask m = mask;
    for (int k = 0; m != 0; ++k, m >>= 1) {
      if (m & 1u) prod *= 1.0 - u[static_cast<std::size_t>(k)];
    }
    corr.add(prod);
  }
  return std::clamp(base * corr.total(), 0.0, 1.0);
}

double cdf(const BernoulliScheme& scheme, std::span<const double> u) {
  check_unit_cube(u, scheme.dimension());
  std::vector<std::pair<double, double>> g(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double uk = u[k];
    g[k] = {1.0 - (1.0 - uk) * (1.0 - uk), uk * uk};
  }
  return std::clamp(scheme.expected_product<double>(g), 0.0, 1.0);
}

std::map<int, double> end_thetas(int dimension) {
  if (dimension < 2) throw validation_error("end_thetas: dimension must be >= 2");
  std::map<int, double> out;
  const double m = (dimension + 1) / 2;
  for (int k = 2; k <= dimension; ++k) {
    if (k % 2 == 1) {
      out[k] = 0.0;
      continue;
    }
    const auto num_g = num::signed_lgamma(0.5 - m);
    const auto den_g = num::signed_lgamma((k + 1) / 2.0 - m);
    const double log_abs = num::lfactorial(static_cast<std::size_t>(k)) + num_g.log_abs -
                           k * std::numbers::ln2 -
                           num::lfactorial(static_cast<std::size_t>(k) / 2) - den_g.log_abs;
    out[k] = num_g.sign * den_g.sign * std::exp(log_abs);
  }
  return out;
}

}  // namespace fgmrisk
