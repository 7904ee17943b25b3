#pragma once

// Multiparametric systems alpha = (N; A_k, B_k, C_k, D_k) and their
// J-conservativity checks.

#include <cstdint>
#include <string>
#include <vector>

#include "jcs/krein.hpp"
#include "jcs/linalg.hpp"

namespace jcs {

class MultiparametricSystem {
public:
  MultiparametricSystem() = default;
  /// Validates that every tuple has the same length N >= 1 and that shapes agree.
  MultiparametricSystem(std::vector<Mat> a, std::vector<Mat> b, std::vector<Mat> c,
                        std::vector<Mat> d);

  static MultiparametricSystem zero(int n, int dx, int du, int dy);
  /// Split system operators G_k into blocks with the given state dimension.
  static MultiparametricSystem from_operators(const std::vector<Mat>& g, int dx, int du);

  int n() const noexcept { return static_cast<int>(a_.size()); }
  int dx() const noexcept { return dx_; }
  int du() const noexcept { return du_; }
  int dy() const noexcept { return dy_; }

  const std::vector<Mat>& a() const noexcept { return a_; }
  const std::vector<Mat>& b() const noexcept { return b_; }
  const std::vector<Mat>& c() const noexcept { return c_; }
  const std::vector<Mat>& d() const noexcept { return d_; }
  const Mat& a(int k) const { return a_.at(k); }
  const Mat& b(int k) const { return b_.at(k); }
  const Mat& c(int k) const { return c_.at(k); }
  const Mat& d(int k) const { return d_.at(k); }

  /// Optional label carried through serialization.
  std::string name;

private:
  std::vector<Mat> a_, b_, c_, d_;
  int dx_ = 0, du_ = 1, dy_ = 1;
};

/// G_k = [[A_k, B_k], [C_k, D_k]].
std::vector<Mat> system_operators(const MultiparametricSystem& sys);

/// alpha* = (A*, C*, B*, D*): input space Y, output space U.
MultiparametricSystem conjugate_system(const MultiparametricSystem& sys);

struct ConservativityDefects {
  double r1 = 0.0;  ///< ||Σ G_k* J2 G_k - J1||
  double r2 = 0.0;  ///< max_{k≠l} ||G_k* J2 G_l||
  double r3 = 0.0;  ///< ||Σ G_k J1 G_k* - J2||
  double r4 = 0.0;  ///< max_{k≠l} ||G_k J1 G_l*||
  double max() const;
};

/// Coefficient conditions for an arbitrary operator tuple and symmetries.
ConservativityDefects operator_defects(const std::vector<Mat>& g, const CanonicalSymmetry& j1,
                                       const CanonicalSymmetry& j2);

/// Defects of alpha with J1 = J ⊕ I_U, J2 = J ⊕ I_Y.
ConservativityDefects jconservativity_defect(const MultiparametricSystem& sys,
                                             const CanonicalSymmetry& j);

/// max over samples of the (J1, J2)-unitarity defect of Σ ζ_k G_k.
/// Throws if some |ζ_k| differs from 1 by more than 1e-12.
double torus_check(const MultiparametricSystem& sys, const CanonicalSymmetry& j,
                   const std::vector<Point>& samples);

/// The (2N+1)^N grid of roots of unity on T^N.
std::vector<Point> torus_grid(int n);

/// r1..r4 recovered from the trigonometric polynomials (ζG)*J2(ζG) - J1 and
/// (ζG)J1(ζG)* - J2 by a discrete Fourier sum over torus_grid.
ConservativityDefects torus_coefficient_defects(const MultiparametricSystem& sys,
                                                const CanonicalSymmetry& j);

/// Random J-conservative system with dY = dU: G_k = V P_k with {P_k} a
/// partition of identity commuting with J ⊕ I_U and V a random
/// (J ⊕ I_U)-unitary. Needs dx + du >= n.
MultiparametricSystem random_jconservative(int n, int dx, int du, std::uint64_t seed,
                                           const CanonicalSymmetry& j);

/// (1; Σ z_k A_k, Σ z_k B_k, Σ z_k C_k, Σ z_k D_k).
MultiparametricSystem one_parameter_slice(const MultiparametricSystem& sys, const Point& z);

/// Zero input columns (dU < dY) or zero output rows (dY < dU) so that dU = dY.
MultiparametricSystem pad_io(const MultiparametricSystem& sys);

/// N = 1, G = [[5/4, 3/4], [3/4, 5/4]], conservative for J = (-1).
MultiparametricSystem hyperbolic_example();
/// N = 2, G_1 = E_11, G_2 = E_22, conservative for J = I_1.
MultiparametricSystem matrix_unit_example();

}  // namespace jcs
