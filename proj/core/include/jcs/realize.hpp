#pragma once

// Realization of truncated Taylor data vanishing at 0: a shift-register
// system first, then a J-conservative dilation of it.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcs/dilation.hpp"
#include "jcs/series.hpp"
#include "jcs/system.hpp"

namespace jcs {

/// Default degree cap for N >= 3 (the state has one register per index with 1 <= |s| <= d-1).
inline constexpr int kRealizeDegreeCapManyVariables = 6;

/// State X = ⊕ U_s over 1 <= |s| <= d-1 (lexicographic within each level). A_k shifts
/// register s to s + e_k, B_k writes u into register e_k, C_k reads register s as
/// θ̂_{s+e_k} ∏ t_j! / |t|! with t = s + e_k, and D_k = θ̂_{e_k}.
/// Throws when θ̂_0 != 0, when theta carries a nonzero coefficient above d, or when
/// d exceeds the cap for N >= 3 without allow_large_degree.
MultiparametricSystem shift_register_realization(const TruncatedOperatorSeries& theta, int d,
                                                 bool allow_large_degree = false);

struct RealizationOptions {
  double tol = 1e-8;               ///< exact dilation stages and conservativity of the result
  double coefficient_tol = 1e-12;  ///< Taylor match, relative to max(1, ||θ̂_t||)
  double sample_tol = 1e-5;        ///< sample match and the truncation-limited dilation stages
  int decomposition_degree = 20;
  double radius = 0.5;
  double epsilon = 0.0;            ///< 0 selects minimal_constructive_epsilon
  int samples = 100;
  std::uint64_t seed = 7;
  bool allow_large_degree = false;
  bool throw_on_failure = true;
};

struct RealizationResult {
  MultiparametricSystem shift_register;  ///< α, before padding
  MultiparametricSystem system;          ///< α̇ (inputs/outputs padded when dU != dY)
  CanonicalSymmetry j;
  int degree = 0;
  double epsilon = 0.0;
  EpsilonBounds epsilon_bounds;
  /// |θ̂_{α̇,t} - θ̂_t| for 1 <= |t| <= degree, on the leading dY x dU corner; padded
  /// entries must vanish and are included.
  std::map<MultiIndex, double> coefficient_residuals;
  double coefficient_residual = 0.0;  ///< max of the relative residuals
  double sample_residual = 0.0;       ///< max ||θ_α̇(z) - θ(z)|| at samples of radius `radius`
  double conservativity = 0.0;
  std::map<std::string, double> defects;  ///< dilation stages plus the realization checks
  std::map<std::string, double> tolerances;
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};

/// shift_register_realization -> pad_io -> epsilon -> construct_pencil_decomposition ->
/// build_dilation, followed by the coefficient, sample and conservativity checks.
/// θ ≡ 0 gives the zero system with empty state and J = I.
RealizationResult jconservative_realization(const TruncatedOperatorSeries& theta, int d,
                                            const RealizationOptions& options = {});

}  // namespace jcs
