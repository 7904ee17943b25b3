#pragma once

// Transfer functions θ(z) = zD + zC (I - zA)^{-1} zB and their Taylor data.

#include <vector>

#include "jcs/series.hpp"
#include "jcs/system.hpp"

namespace jcs {

/// Condition-number ceiling for I - zA.
inline constexpr double kResolventConditionLimit = 1e12;

/// (I - zA)^{-1}. Throws NumericalError naming z when the solve is ill-conditioned.
Mat resolvent(const MultiparametricSystem& sys, const Point& z);

Mat eval_transfer(const MultiparametricSystem& sys, const Point& z);

enum class TaylorMethod {
  words,     ///< explicit sum over words C_{k0} A_{k1} ... B_{km}
  recursive  ///< P_t = Σ A_k P_{t-e_k}, θ_t = Σ C_k P_{t-e_k}
};

/// Default degree cap for word enumeration (N^d words).
inline constexpr int kWordDegreeCap = 8;

/// θ_t for 1 <= |t| <= d with a geometric tail (rho_k = max of ||A_k||, ||B_k||,
/// ||C_k||, ||D_k||). Word enumeration above kWordDegreeCap needs allow_large_degree.
TruncatedOperatorSeries taylor_coefficients(const MultiparametricSystem& sys, int d,
                                            TaylorMethod method = TaylorMethod::words,
                                            bool allow_large_degree = false);

struct ZTransformResiduals {
  double state = 0.0;   ///< ||x̂ - zA x̂ - zB û||
  double output = 0.0;  ///< ||θ(z) û - zC x̂ - zD û||
};

/// x̂(z) = (I - zA)^{-1} zB û(z); checks both recursion lines against θ(z) û(z).
ZTransformResiduals z_transform_check(const MultiparametricSystem& sys,
                                      const TruncatedOperatorSeries& u_hat,
                                      const std::vector<Point>& samples);

}  // namespace jcs
