#pragma once

// Indefinite (Krein-space) linear algebra on C^n equipped with the metric
// [x, y]_J = <Jx, y> of a canonical symmetry J = J* = J^{-1}.

#include <string>
#include <vector>

#include "jcs/linalg.hpp"

namespace jcs {

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Inertia of a Hermitian matrix. Eigenvalues with |λ| <= tol count as zero;
/// a negative tol selects 1e-10 * max|λ|.
Signature signature(const Mat& h, double tol = -1.0);

/// A selfadjoint involution. Construction validates J = J* and J^2 = I.
class CanonicalSymmetry {
public:
  CanonicalSymmetry() = default;
  explicit CanonicalSymmetry(Mat matrix, double tol = 1e-10);

  static CanonicalSymmetry identity(int n);
  /// Diagonal symmetry from entries +1 / -1.
  static CanonicalSymmetry diagonal(const std::vector<int>& signs);
  /// diag(+1 x p, -1 x q).
  static CanonicalSymmetry standard(int p, int q);
  static CanonicalSymmetry direct_sum(const std::vector<CanonicalSymmetry>& parts);

  const Mat& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  int positive() const noexcept { return p_; }
  int negative() const noexcept { return q_; }
  bool is_diagonal() const noexcept { return diagonal_; }
  /// Diagonal entries; only meaningful when is_diagonal().
  std::vector<int> signs() const;

  /// [x, y]_J = <Jx, y> = y* J x.
  cplx inner(const Vec& x, const Vec& y) const;
  double quadratic(const Vec& x) const;

  /// Extend by the identity: J ⊕ I_n (used for J1 = J ⊕ I_U, J2 = J ⊕ I_Y).
  CanonicalSymmetry plus_identity(int n) const;

private:
  Mat matrix_;
  int p_ = 0;
  int q_ = 0;
  bool diagonal_ = true;
};

struct JUnitarityDefect {
  double isometry = 0.0;    ///< ||G* J2 G - J1||
  double coisometry = 0.0;  ///< ||G J1 G* - J2||
  double max() const { return isometry > coisometry ? isometry : coisometry; }
};

/// How far G is from being (J1, J2)-unitary.
JUnitarityDefect j_unitarity_defect(const Mat& g, const CanonicalSymmetry& j1,
                                    const CanonicalSymmetry& j2);

struct ProjectionResult {
  Vec projected;               ///< h0 = h - J_M F0 F0* h
  double kernel_residual;      ///< ||F0* h0||
  double orthogonality_residual;  ///< ||N* J_M (h - h0)||, N an orthonormal basis of Ker F0*
};

/// J_M-orthogonal projection of h onto Ker F0*, for semiunitary F0
/// (F0* J_M F0 = I). Throws NumericalError when F0 is not semiunitary.
ProjectionResult j_orthogonal_projection(const Vec& h, const Mat& f0,
                                         const CanonicalSymmetry& jm, double tol = 1e-10);

/// A subspace of (C^n, J) given by a full-column-rank basis.
class KreinSubspace {
public:
  KreinSubspace(Mat basis, CanonicalSymmetry j);

  const Mat& basis() const noexcept { return basis_; }
  const CanonicalSymmetry& ambient_symmetry() const noexcept { return j_; }
  const Mat& gram() const noexcept { return gram_; }
  int ambient_dim() const noexcept { return static_cast<int>(basis_.rows()); }
  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  /// sigma_min / sigma_max of the Gram matrix (1 for the zero subspace).
  double gram_condition() const noexcept { return gram_condition_; }
  bool regular() const noexcept { return gram_condition_ > kRankThreshold; }
  Signature gram_signature() const;

  /// Orthonormal basis of the J-orthogonal companion Ker(basis* J).
  KreinSubspace companion() const;

private:
  Mat basis_;
  CanonicalSymmetry j_;
  Mat gram_;
  double gram_condition_ = 1.0;
};

struct RegularizedBasis {
  Mat basis;                  ///< spans the same subspace; basis* J basis = j0
  CanonicalSymmetry j0;       ///< diag(+1..., -1...), positive entries first
};

/// Rescale a Gram-diagonalizing basis so the indefinite Gram becomes diag(±1).
/// Throws NumericalError when the subspace is degenerate.
RegularizedBasis regularize_subspace(const KreinSubspace& s);

/// Pad sizes needed before a J-isometry can be extended to a J-unitary map.
class PaddingRequired : public Error {
public:
  PaddingRequired(Signature domain_ambient, Signature range_ambient);
  /// Extra (+, -) dimensions to add to the domain space.
  int domain_pad_positive() const noexcept { return dpp_; }
  int domain_pad_negative() const noexcept { return dpn_; }
  /// Extra (+, -) dimensions to add to the range space.
  int range_pad_positive() const noexcept { return rpp_; }
  int range_pad_negative() const noexcept { return rpn_; }

private:
  int dpp_, dpn_, rpp_, rpn_;
};

/// Relative Gram eigenvalue below which a direction of dom counts as J-neutral.
inline constexpr double kRadicalThreshold = 1e-8;

struct JExtension {
  int aux_dim = 0;               ///< dim K_II
  int radical_dim = 0;           ///< dim(dom ∩ dom^[⊥]), completed by hyperbolic partners
  CanonicalSymmetry aux_symmetry;  ///< J_II
  Mat extension;                 ///< Ǔ : K_II ⊕ M -> K_II ⊕ K_I
  double unitarity_defect = 0.0;
  double restriction_defect = 0.0;  ///< ||(Ǔ - U) dom.basis|| relative to ||U dom.basis||
  Signature domain_companion;
  Signature range_companion;
};

/// Extend a (J_M, J_I)-isometry U, given as an ambient matrix whose action on
/// `dom` is the isometry, to a J-unitary operator. `ran` must contain U(dom).
/// Degenerate domains are handled by pairing their radical with J-neutral partners
/// on both sides first. Throws PaddingRequired when the ambient signatures differ
/// and NumericalError when U is not isometric.
JExtension extend_j_isometry(const KreinSubspace& dom, const KreinSubspace& ran, const Mat& u,
                             double tol = 1e-10);

/// Random (J, J)-unitary matrix as a product of elementary rotations: unitary
/// Givens rotations between equal-sign coordinates and hyperbolic rotations
/// (rapidity at most max_rapidity) between opposite-sign ones.
Mat random_j_unitary(const CanonicalSymmetry& j, Rng& rng, int factors = -1,
                     double max_rapidity = 0.7);

}  // namespace jcs
