#pragma once

// Certified, degree-truncated kernel decompositions of the linear pencil
// L_G(z) = Σ z_k G_k:
//
//   I - (λG)*(zG) = Σ_k (1 - conj(λ_k) z_k) F_k(λ)* J^(k) F_k(z),
//
// with J^(k) = I ⊕ (-I) splitting each F_k into F_k^+ and F_k^-.

#include <vector>

#include "jcs/krein.hpp"
#include "jcs/series.hpp"
#include "jcs/system.hpp"

namespace jcs {

struct AglerDecomposition {
  int n = 1;                     ///< number of variables N
  int cols = 0;                  ///< dim(X ⊕ U)
  double epsilon = 1.0;          ///< scale ε′
  std::vector<int> m_plus;       ///< dim M_k^+
  std::vector<int> m_minus;      ///< dim M_k^-
  std::vector<TruncatedOperatorSeries> f;  ///< F_k, rows m_plus[k] + m_minus[k]
  int degree = 0;
  double radius = 0.5;
  /// η(r, d) = eta_constant * r^{2(d+1)} / (1 - r^2); zero for exact decompositions.
  double eta_constant = 0.0;
  bool exact = false;

  double eta() const { return eta_at(radius); }
  double eta_at(double r) const;

  int dim(int k) const { return m_plus.at(k) + m_minus.at(k); }
  /// dim M = Σ dim M_k.
  int total_dim() const;
  /// Row offset of block M_k inside M.
  int offset(int k) const;

  CanonicalSymmetry j_k(int k) const;
  /// J_M = ⊕ J^(k).
  CanonicalSymmetry j_m() const;

  Mat f_k(int k, const Point& z) const;
  /// F(z) = col(F_1(z), ..., F_N(z)).
  Mat stacked(const Point& z) const;
  /// F^+(z) = col(F_k^+(z)) and F^-(z) = col(F_k^-(z)).
  Mat stacked_plus(const Point& z) const;
  Mat stacked_minus(const Point& z) const;
  /// zP F(z) = col(z_k F_k(z)).
  Mat shifted(const Point& z) const;
};

struct EpsilonBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = max over samples of ||Σ ζ_k G_k||, upper = N * max_k ||G_k||.
EpsilonBounds epsilon_bounds(const std::vector<Mat>& g, const std::vector<Point>& torus_samples);

/// Smallest ε′ accepted by construct_pencil_decomposition: max(1, N max_k ||G_k||).
double minimal_constructive_epsilon(const std::vector<Mat>& g);

/// Geometric-series construction: per-variable defect rows z_k^n D_k with
/// D_k = ((ε′²/N) I - N G_k* G_k)^{1/2}, cross rows z_j^n (z_j G_j - z_k G_k)
/// assigned to F_j (j < k), and negative rows sqrt((ε′²-1)/N) z_k^n I.
/// Throws NumericalError naming the minimal feasible ε′ when ε′ is too small.
AglerDecomposition construct_pencil_decomposition(const std::vector<Mat>& g, double epsilon,
                                                  int degree, double radius = 0.5);

/// Exact constant decomposition F_k ≡ G_k, J^(k) = I, ε′ = 1 for tuples with
/// Σ G_k* G_k = I and G_j* G_k = 0 (j ≠ k). Throws when the tuple does not qualify.
AglerDecomposition conservative_decomposition(const std::vector<Mat>& g, double tol = 1e-10);

struct LambdaZ {
  Point lambda;
  Point z;
};

/// Random pairs (λ, z) in the polydisk of radius r.
std::vector<LambdaZ> random_pairs(int n, int count, double r, Rng& rng);

struct KernelCheck {
  double residual = 0.0;  ///< max over pairs
  double bound = 0.0;     ///< η(r, d) + rounding allowance
  bool within() const { return residual <= bound; }
};

/// max ||I - (λG)*(zG) - Σ (1 - conj(λ_k) z_k) F_k(λ)* J^(k) F_k(z)|| over pairs.
/// Throws when a pair leaves the certified radius.
KernelCheck verify_kernel_identity(const std::vector<Mat>& g, const AglerDecomposition& dec,
                                   const std::vector<LambdaZ>& pairs);

struct ZeroIdentityReport {
  double plus_constant = 0.0;      ///< ||F^+(0)* F^+(z) - ε′² I|| (z = 0 included)
  double minus_constant = 0.0;     ///< ||F^-(0)* F^-(z) - (ε′² - 1) I||
  double polarization = 0.0;       ///< (F(λ)-F(0))*(F(z)-F(0)) = F(λ)*F(z) - F(0)*F(0), both signs
  double semiunitarity = 0.0;      ///< ||F(0)* J_M F(0) - I||
  double max() const;
};

ZeroIdentityReport derived_zero_identities(const AglerDecomposition& dec,
                                           const std::vector<LambdaZ>& pairs);

struct TransformReport {
  double plus = 0.0;      ///< (λP^+F^+(λ))*(zP^+F^+(z)) vs its right side
  double minus = 0.0;     ///< (λP^-F^-(λ))*(zP^-F^-(z)) vs its right side
  double sum = 0.0;       ///< unsigned combination
  double j_weighted = 0.0;  ///< J_M-weighted combination
  double max() const;
};

TransformReport transform_identities(const AglerDecomposition& dec, const std::vector<Mat>& g,
                                     const std::vector<LambdaZ>& pairs);

struct TransferKernelReport {
  double residual = 0.0;  ///< max ||I - θ(λ)*θ(z) - Σ (1 - conj(λ_k) z_k) H_k(λ)* J^(k) H_k(z)||
  double bound = 0.0;     ///< η scaled by ||v(λ)|| ||v(z)||
};

/// H_k(z) = F_k(z) col((I - zA)^{-1} zB, I).
std::vector<Mat> prop2_functions(const MultiparametricSystem& sys, const AglerDecomposition& dec,
                                 const Point& z);
TransferKernelReport transfer_kernel_check(const MultiparametricSystem& sys, const AglerDecomposition& dec,
                        const std::vector<LambdaZ>& pairs);

struct GramSearchOptions {
  int max_iterations = 2000;
  double tol = 1e-9;
};

struct GramSearchResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  /// Per-variable PSD Gram matrices indexed by (degree-≤d monomials) ⊗ (X ⊕ U).
  std::vector<Mat> grams;
};

/// Best-effort search for PSD Gram matrices S_k with
/// ε² I - (λG)*(zG) = Σ_k (1 - conj(λ_k) z_k) m(λ)* S_k m(z) on monomials of degree <= d,
/// by alternating projection between the matching constraints and the PSD cone.
/// Never needed by the pipeline.
GramSearchResult gram_feasibility_search(const std::vector<Mat>& g, double epsilon, int degree,
                                         const GramSearchOptions& opts = {});

}  // namespace jcs
