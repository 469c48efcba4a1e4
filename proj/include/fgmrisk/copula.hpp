#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fgmrisk/bernoulli.hpp"

namespace fgmrisk {

/// Coordinate subset encoded as a bitmask; bit k corresponds to coordinate k
/// (0-based). This caps the natural parameterization at 64 coordinates.
using SubsetMask = std::uint64_t;

SubsetMask subset_mask(std::span<const int> coordinates, int dimension);
std::vector<int> subset_coordinates(SubsetMask mask);

/// FGM copula in natural parameters: a sparse map from coordinate subsets of
/// size >= 2 to real parameters. Absent subsets carry parameter 0.
///
/// The parameters are admissible exactly when every mass of the reconstructed
/// Bernoulli law (the Walsh expansion over the sign patterns) is nonnegative;
/// the check is run eagerly for dimensions up to kDenseDimensionCap and left
/// undetermined beyond that.
class FgmCopula {
 public:
  FgmCopula(int dimension, std::vector<std::pair<SubsetMask, double>> entries);

  int dimension() const noexcept { return dimension_; }
  std::span<const std::pair<SubsetMask, double>> entries() const noexcept {
    return entries_;
  }
  double theta(SubsetMask subset) const;
  double theta(std::span<const int> coordinates) const;

  /// nullopt when the dimension is too large for the exhaustive check.
  std::optional<bool> admissible() const noexcept { return admissible_; }
  /// Violating sign pattern and mass; meaningful only when admissible()==false.
  const std::vector<int>& violating_epsilon() const noexcept { return violating_epsilon_; }
  double worst_mass() const noexcept { return worst_mass_; }

 private:
  friend FgmCopula theta_from_scheme(const BernoulliScheme&, int);

  FgmCopula(int dimension, std::vector<std::pair<SubsetMask, double>> entries,
            std::optional<bool> admissible);
  void sort_and_check_entries();
  void run_admissibility_check();

  int dimension_;
  std::vector<std::pair<SubsetMask, double>> entries_;  // sorted by mask
  std::optional<bool> admissible_;
  std::vector<int> violating_epsilon_;
  double worst_mass_ = 1.0;
};

/// theta_A = (-2)^|A| E[prod_{k in A} (I_k - 1/2)] for all subsets of size
/// 2..max_order (max_order <= 0 means the full dimension). Errors out when
/// the subset count would exceed 2^20.
FgmCopula theta_from_scheme(const BernoulliScheme& scheme, int max_order = 0);

/// Dense Bernoulli law whose Walsh coefficients are the given thetas.
/// Throws inadmissible_error (with the violating sign vector) when some
/// reconstructed mass falls below -1e-12.
BernoulliScheme scheme_from_theta(const FgmCopula& copula);

/// Copula cdf in natural form.
double cdf(const FgmCopula& copula, std::span<const double> u);
/// Copula cdf in stochastic form: E_I[prod_k F_{U[I_k+1]}(u_k)].
double cdf(const BernoulliScheme& scheme, std::span<const double> u);

/// k -> theta_k parameters of the extreme-negative-dependence copula in
/// dimension d; zero for odd k, a signed Gamma ratio (evaluated in log-Gamma
/// space) for even k.
std::map<int, double> end_thetas(int dimension);

}  // namespace fgmrisk
