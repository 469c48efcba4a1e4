#pragma once

#include <vector>

#include "fgmrisk/aggregate_me.hpp"
#include "fgmrisk/portfolio.hpp"

namespace fgmrisk {

struct AllocationResult {
  std::vector<double> contributions;  // one per risk
  double context = 0.0;               // the s value or the kappa level
  double reference = 0.0;             // f_S(s) or TVaR_kappa(S)
};

/// E[X_m 1{S = s}] (a density-weighted value) for a common-rate mixed-Erlang
/// portfolio; integrates to E[X_m] over s.
double expected_allocation_density(const Portfolio& p, int m, double s,
                                   const NumericOptions& options = {});

/// Conditional mean risk sharing: contributions E[X_k | S = s], summing to s.
AllocationResult cmrs(const Portfolio& p, double s, const NumericOptions& options = {});

/// Euler-style TVaR decomposition: contributions
/// E[X_k 1{S > VaR_kappa(S)}] / (1 - kappa), summing to TVaR_kappa(S).
AllocationResult tvar_allocation(const Portfolio& p, double kappa,
                                 const NumericOptions& options = {});

namespace detail {

/// Shared engine: aggregate weights q_S plus, per risk m, the coefficient
/// vector a_m with a_m[l] = sum over own-shape ell and other-shape r = l-ell
/// of ell * Pr(own = ell) * Pr(others = r), mixed over the scheme. Every
/// allocation quantity is a Poisson-kernel sum against a_m:
///   E[X_m 1{S = s}]  = sum_l a_m[l] pois(l; 2 beta s)
///   E[X_m 1{S > s}]  = (1 / 2 beta) sum_l a_m[l] Pr(Pois(2 beta s) <= l).
/// The mixture over I is evaluated per frequency by handing coordinate m the
/// basis pair (1,0) or (0,1), which works for every scheme variant without
/// enumerating the 2^d support.
struct AllocationEngine {
  double rate2 = 0.0;
  MixedErlang aggregate_law;
  std::vector<std::vector<double>> coefficients;  // [m][l]
};

AllocationEngine build_allocation_engine(const Portfolio& p, const NumericOptions& options);

}  // namespace detail

}  // namespace fgmrisk
