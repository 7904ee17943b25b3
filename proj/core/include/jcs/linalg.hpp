#pragma once

// Dense complex linear algebra shared by every module: matrix aliases,
// the error hierarchy, norms, null spaces and Hermitian helpers.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jcs {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

/// A point of C^N.
using Point = std::vector<cplx>;

/// Relative threshold below which singular values count as zero.
inline constexpr double kRankThreshold = 1e-10;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// A numerical precondition failed (singular resolvent, degenerate Gram, ...).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// A pipeline stage produced a residual above its tolerance.
class StageFailure : public Error {
public:
  StageFailure(std::string stage, double residual, double tol);
  const std::string& stage() const noexcept { return stage_; }
  double residual() const noexcept { return residual_; }
  double tolerance() const noexcept { return tol_; }

private:
  std::string stage_;
  double residual_;
  double tol_;
};

/// Spectral norm (largest singular value). Zero for empty matrices.
double op_norm(const Mat& m);

/// Spectral norm of a Hermitian matrix via its eigenvalues.
double hermitian_norm(const Mat& h);

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
struct HermitianEigen {
  Eigen::VectorXd values;
  Mat vectors;
};
HermitianEigen hermitian_eigen(const Mat& h);

struct SvdResult {
  Mat u;
  Eigen::VectorXd s;  ///< descending
  Mat v;
};

/// SVD with thin U and thin or full V. Uses divide and conquer, then checks the
/// reconstruction and orthonormality and falls back to one-sided Jacobi if the
/// check fails.
SvdResult checked_svd(const Mat& m, bool full_v = false);

/// Numerical rank with singular values below rel_tol * sigma_max dropped.
int numerical_rank(const Mat& m, double rel_tol = kRankThreshold);

/// Orthonormal basis of Ker(m) (columns). `scale` sets the absolute zero
/// level as rel_tol * scale; by default scale = sigma_max(m).
Mat null_space(const Mat& m, double rel_tol = kRankThreshold, double scale = -1.0);

/// Orthonormal basis of Ran(m).
Mat range_basis(const Mat& m, double rel_tol = kRankThreshold);

/// Block diagonal assembly.
Mat block_diag(const std::vector<Mat>& blocks);

/// Diagonal matrix from real entries.
Mat real_diag(const std::vector<double>& d);

/// Σ_k z_k T_k.
Mat linear_combination(const Point& z, const std::vector<Mat>& terms);

/// Deterministic generator: splitmix-seeded xoshiro256** with portable
/// conversions, so seeded runs are bit-identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer in [0, n).
  int index(int n);
  cplx complex_normal();
  /// Point with |z_k| = 1.
  Point torus_point(int n);
  /// Point uniformly distributed in the polydisk of radius r (|z_k| < r).
  Point polydisk_point(int n, double r);
  Mat complex_matrix(int rows, int cols);
  Vec complex_vector(int n);

private:
  std::uint64_t s_[4];
};

}  // namespace jcs
