#pragma once

// J-conservative dilations of a multiparametric system built from a kernel
// decomposition of its pencil.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jcs/agler.hpp"
#include "jcs/krein.hpp"
#include "jcs/system.hpp"

namespace jcs {

struct DilationOptions {
  double tol = 1e-6;
  /// Tolerance for lin-tf, lin-tf-chain and transfer-coincidence, whose defects are
  /// O(r^{d+1}) for a degree-d decomposition; negative selects `tol`.
  double truncation_tol = -1.0;
  int samples = 100;          ///< sample points for transfer checks (radius dec.radius)
  int chain_samples = 10;     ///< sample points for the zČ(zǍ)^n zB̌ check
  int torus_samples = 10;     ///< torus points for the J-unitarity spot check of Σ ζ_k Ǧ_k
  int chain_horizon = -1;     ///< n_max; negative selects dim(state) + 2
  std::uint64_t seed = 7;
  bool skip_extension = false;  ///< negative control: use the partial U instead of Ǔ
  bool throw_on_failure = true;
};

/// The partial J-isometry U matching coefficient columns of zP F(z) to those of
/// (F(z) - F(0); zG), expressed in coordinates of K_I = K_0 ⊕ X ⊕ Y.
struct PartialIsometry {
  Mat k0_basis;             ///< B0: K_0 coordinates -> M, B0* J_M B0 = J0
  CanonicalSymmetry j0;
  CanonicalSymmetry j_i;    ///< J0 ⊕ I_{X ⊕ Y}
  Mat domain;               ///< orthonormal basis of the domain span in M
  Mat image;                ///< U applied to `domain`, in K_I coordinates
  Mat ambient;              ///< image * domain*, an ambient matrix acting as U
  int max_degree = 0;       ///< highest multi-index degree used for the columns
  double lsq_residual = 0.0;    ///< relative mismatch on Ker of the column map
  double isometry_defect = 0.0; ///< ||image* J_I image - domain* J_M domain||
};

PartialIsometry build_U(const AglerDecomposition& dec, const std::vector<Mat>& g);

struct DilationResult {
  MultiparametricSystem alpha;        ///< the (padded) system that was dilated
  MultiparametricSystem alpha_tilde;  ///< state K_II ⊕ K_0 ⊕ X
  CanonicalSymmetry j;                ///< J_II ⊕ J_0 ⊕ I_X
  std::vector<Mat> check_operators;   ///< Ǧ_k
  CanonicalSymmetry check_symmetry;   ///< J_II ⊕ J_0 (state of the check system)
  Mat u_extended;                     ///< Ǔ
  PartialIsometry partial;
  int aux_dim = 0;                    ///< dim K_II
  int k0_dim = 0;
  int x_offset = 0;                   ///< position of X inside the dilated state
  std::map<std::string, double> defects;
  std::vector<std::string> failed;    ///< stages whose defect exceeds the tolerance
  double tol = 0.0;
  double truncation_tol = 0.0;
  bool ok() const { return failed.empty(); }
  /// Tolerance the named stage was checked against.
  double tolerance(const std::string& stage) const;
};

/// Full pipeline. Systems with dU != dY are padded first, and `dec` must then
/// be built for the padded operators. Throws StageFailure naming the first
/// failing stage unless options.throw_on_failure is false.
DilationResult build_dilation(const MultiparametricSystem& sys, const AglerDecomposition& dec,
                              const DilationOptions& options = {});

struct LinearTfReport {
  double transfer = 0.0;     ///< max ||θ_ǎ(z) - zG||
  double feedthrough = 0.0;  ///< max_k ||Ď_k - G_k||
  double chain = 0.0;        ///< max ||zČ (zǍ)^n zB̌||, n = 0..horizon
};

/// The check system ǎ must have state dim = rows(Ǧ) - rows(G).
LinearTfReport verify_linear_tf(const MultiparametricSystem& check, const std::vector<Mat>& g,
                                const std::vector<Point>& samples,
                                const std::vector<Point>& chain_samples, int horizon);

struct DilationReport {
  double compression = 0.0;
  double transfer = 0.0;
  double conservativity = 0.0;
  ConservativityDefects defects;
};

/// Compressions onto X (at `x_offset` in the dilated state), transfer
/// coincidence at samples and J-conservativity of alpha_tilde.
DilationReport verify_dilation(const MultiparametricSystem& sys,
                               const MultiparametricSystem& alpha_tilde,
                               const CanonicalSymmetry& j, const std::vector<Point>& samples,
                               int x_offset = -1);

}  // namespace jcs
