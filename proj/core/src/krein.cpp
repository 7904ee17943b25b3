#include "jcs/krein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jcs {

Signature signature(const Mat& h, double tol) {
  if (h.rows() != h.cols()) throw DimensionError("signature: matrix is not square");
  Signature s;
  if (h.rows() == 0) return s;
  auto eig = hermitian_eigen(h);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  const double thr = tol >= 0.0 ? tol : 1e-10 * scale;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (v > thr)
      ++s.positive;
    else if (v < -thr)
      ++s.negative;
    else
      ++s.zero;
  }
  return s;
}

// ---------------------------------------------------------------------------

CanonicalSymmetry::CanonicalSymmetry(Mat matrix, double tol) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols())
    throw DimensionError("canonical symmetry must be square");
  const auto n = matrix_.rows();
  const double herm = op_norm(matrix_ - matrix_.adjoint());
  const double invol = op_norm(matrix_ * matrix_ - Mat::Identity(n, n));
  if (herm > tol || invol > tol) {
    std::ostringstream os;
    os << "not a canonical symmetry: ||J - J*|| = " << herm << ", ||J^2 - I|| = " << invol;
    throw NumericalError(os.str());
  }
  diagonal_ = true;
  for (Eigen::Index j = 0; j < n && diagonal_; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && matrix_(i, j) != cplx(0.0)) {
        diagonal_ = false;
        break;
      }
  if (diagonal_) {
    // Snap to exact ±1.
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = matrix_(i, i).real() >= 0.0 ? 1.0 : -1.0;
      matrix_(i, i) = v;
      (v > 0 ? p_ : q_)++;
    }
  } else {
    auto s = signature(matrix_, 0.5);
    p_ = s.positive;
    q_ = s.negative;
  }
}

CanonicalSymmetry CanonicalSymmetry::identity(int n) { return standard(n, 0); }

CanonicalSymmetry CanonicalSymmetry::diagonal(const std::vector<int>& signs) {
  std::vector<double> d;
  d.reserve(signs.size());
  for (int s : signs) {
    if (s != 1 && s != -1) throw NumericalError("diagonal symmetry entries must be +1 or -1");
    d.push_back(s);
  }
  return CanonicalSymmetry(real_diag(d));
}

CanonicalSymmetry CanonicalSymmetry::standard(int p, int q) {
  std::vector<int> s(p, 1);
  s.insert(s.end(), q, -1);
  return diagonal(s);
}

CanonicalSymmetry CanonicalSymmetry::direct_sum(const std::vector<CanonicalSymmetry>& parts) {
  std::vector<Mat> blocks;
  blocks.reserve(parts.size());
  for (const auto& p : parts) blocks.push_back(p.matrix());
  return CanonicalSymmetry(block_diag(blocks));
}

std::vector<int> CanonicalSymmetry::signs() const {
  std::vector<int> s(dim());
  for (int i = 0; i < dim(); ++i) s[i] = matrix_(i, i).real() > 0 ? 1 : -1;
  return s;
}

cplx CanonicalSymmetry::inner(const Vec& x, const Vec& y) const { return y.dot(matrix_ * x); }

double CanonicalSymmetry::quadratic(const Vec& x) const { return inner(x, x).real(); }

CanonicalSymmetry CanonicalSymmetry::plus_identity(int n) const {
  return direct_sum({*this, identity(n)});
}

// ---------------------------------------------------------------------------

JUnitarityDefect j_unitarity_defect(const Mat& g, const CanonicalSymmetry& j1,
                                    const CanonicalSymmetry& j2) {
  if (g.cols() != j1.dim() || g.rows() != j2.dim()) {
    std::ostringstream os;
    os << "j_unitarity_defect: G is " << g.rows() << "x" << g.cols() << " but J1 has dim "
       << j1.dim() << " and J2 has dim " << j2.dim();
    throw DimensionError(os.str());
  }
  JUnitarityDefect d;
  d.isometry = hermitian_norm(g.adjoint() * j2.matrix() * g - j1.matrix());
  d.coisometry = hermitian_norm(g * j1.matrix() * g.adjoint() - j2.matrix());
  return d;
}

ProjectionResult j_orthogonal_projection(const Vec& h, const Mat& f0, const CanonicalSymmetry& jm,
                                         double tol) {
  if (f0.rows() != jm.dim() || h.size() != jm.dim())
    throw DimensionError("j_orthogonal_projection: dimension mismatch");
  const Mat semi = f0.adjoint() * jm.matrix() * f0 - Mat::Identity(f0.cols(), f0.cols());
  const double defect = op_norm(semi);
  if (defect > tol) {
    std::ostringstream os;
    os << "j_orthogonal_projection: F0 is not semiunitary (||F0* J F0 - I|| = " << defect << ")";
    throw NumericalError(os.str());
  }
  ProjectionResult r;
  r.projected = h - jm.matrix() * (f0 * (f0.adjoint() * h));
  r.kernel_residual = (f0.adjoint() * r.projected).norm();
  const Mat kernel = null_space(f0.adjoint());
  r.orthogonality_residual =
      kernel.cols() ? (kernel.adjoint() * (jm.matrix() * (h - r.projected))).norm() : 0.0;
  return r;
}

// ---------------------------------------------------------------------------

KreinSubspace::KreinSubspace(Mat basis, CanonicalSymmetry j)
    : basis_(std::move(basis)), j_(std::move(j)) {
  if (basis_.rows() != j_.dim())
    throw DimensionError("KreinSubspace: basis rows do not match the ambient symmetry");
  if (basis_.cols() > 0 && numerical_rank(basis_) < basis_.cols())
    throw NumericalError("KreinSubspace: basis does not have full column rank");
  gram_ = basis_.adjoint() * j_.matrix() * basis_;
  gram_ = 0.5 * (gram_ + gram_.adjoint());
  if (gram_.rows() > 0) {
    auto eig = hermitian_eigen(gram_);
    const double big = eig.values.cwiseAbs().maxCoeff();
    const double small = eig.values.cwiseAbs().minCoeff();
    // Relative to the basis scale so that neutral subspaces register as singular.
    const double scale = std::max(big, std::pow(op_norm(basis_), 2));
    gram_condition_ = scale > 0.0 ? small / scale : 0.0;
  }
}

Signature KreinSubspace::gram_signature() const { return signature(gram_); }

KreinSubspace KreinSubspace::companion() const {
  if (dim() == 0) return KreinSubspace(Mat::Identity(ambient_dim(), ambient_dim()), j_);
  const Mat constraint = basis_.adjoint() * j_.matrix();
  return KreinSubspace(null_space(constraint), j_);
}

RegularizedBasis regularize_subspace(const KreinSubspace& s) {
  if (s.dim() == 0) return {Mat(s.ambient_dim(), 0), CanonicalSymmetry::identity(0)};
  if (!s.regular()) {
    std::ostringstream os;
    os << "regularize_subspace: degenerate subspace (relative Gram conditioning "
       << s.gram_condition() << ")";
    throw NumericalError(os.str());
  }
  auto eig = hermitian_eigen(s.gram());
  const int k = s.dim();
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  // Positive eigenvalues first (descending), then negative (ascending |λ| order kept stable).
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool pa = eig.values(a) > 0, pb = eig.values(b) > 0;
    if (pa != pb) return pa;
    return false;
  });
  Mat basis(s.ambient_dim(), k);
  std::vector<int> signs(k);
  for (int c = 0; c < k; ++c) {
    const int i = order[c];
    const double lam = eig.values(i);
    signs[c] = lam > 0 ? 1 : -1;
    basis.col(c) = s.basis() * eig.vectors.col(i) / std::sqrt(std::abs(lam));
  }
  return {basis, CanonicalSymmetry::diagonal(signs)};
}

// ---------------------------------------------------------------------------

namespace {

std::string padding_message(Signature d, Signature r) {
  const int dd = d.positive + d.negative, rd = r.positive + r.negative;
  std::ostringstream os;
  os << "signature mismatch: domain space (" << d.positive << "," << d.negative
     << ") vs range space (" << r.positive << "," << r.negative << ")";
  if (dd != rd) os << "; dim mismatch " << dd << " vs " << rd;
  os << "; requires ambient padding of the domain by (" << std::max(0, r.positive - d.positive)
     << "," << std::max(0, r.negative - d.negative) << ") and of the range by ("
     << std::max(0, d.positive - r.positive) << "," << std::max(0, d.negative - r.negative) << ")";
  return os.str();
}

}  // namespace

PaddingRequired::PaddingRequired(Signature d, Signature r)
    : Error(padding_message(d, r)),
      dpp_(std::max(0, r.positive - d.positive)),
      dpn_(std::max(0, r.negative - d.negative)),
      rpp_(std::max(0, d.positive - r.positive)),
      rpn_(std::max(0, d.negative - r.negative)) {}

namespace {

struct WittPair {
  Mat src;   ///< regular subspace of M containing dom
  Mat dst;   ///< its image, a regular subspace of K_I
  Mat gram;  ///< src* J_M src
  int radical = 0;
};

/// Hyperbolic partners P for the radical W0 of span[W1, W0]: [W1, P] = 0,
/// [W0, P] = I and [P, P] = 0.
Mat radical_partners(const Mat& w1, const Mat& w0, const CanonicalSymmetry& j) {
  Mat lhs(w1.cols() + w0.cols(), j.dim());
  lhs << w1.adjoint() * j.matrix(), w0.adjoint() * j.matrix();
  Mat rhs = Mat::Zero(lhs.rows(), w0.cols());
  rhs.bottomRows(w0.cols()) = Mat::Identity(w0.cols(), w0.cols());
  const Mat p = lhs.completeOrthogonalDecomposition().solve(rhs);
  const Mat h = p.adjoint() * j.matrix() * p;
  return p - 0.5 * w0 * h;
}

/// q has orthonormal columns spanning dom; u acts on them isometrically.
WittPair witt_completion(const Mat& q, const Mat& u, const CanonicalSymmetry& jm,
                         const CanonicalSymmetry& ji) {
  WittPair out;
  if (q.cols() == 0) {
    out.src = Mat(jm.dim(), 0);
    out.dst = Mat(ji.dim(), 0);
    out.gram = Mat(0, 0);
    return out;
  }
  const auto eig = hermitian_eigen(q.adjoint() * jm.matrix() * q);
  const double top = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<int> regular, radical;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    (std::abs(eig.values(i)) > kRadicalThreshold * top ? regular : radical).push_back(static_cast<int>(i));
  Mat w1(q.rows(), regular.size()), w0(q.rows(), radical.size());
  for (std::size_t i = 0; i < regular.size(); ++i)
    w1.col(i) = q * eig.vectors.col(regular[i]) / std::sqrt(std::abs(eig.values(regular[i])));
  for (std::size_t i = 0; i < radical.size(); ++i) w0.col(i) = q * eig.vectors.col(radical[i]);
  out.radical = static_cast<int>(radical.size());

  const Mat r1 = u * w1;
  const Mat r0 = u * w0;
  Mat p = radical.empty() ? Mat(jm.dim(), 0) : radical_partners(w1, w0, jm);
  Mat t = radical.empty() ? Mat(ji.dim(), 0) : radical_partners(r1, r0, ji);
  out.src.resize(jm.dim(), w1.cols() + 2 * w0.cols());
  out.src << w1, w0, p;
  out.dst.resize(ji.dim(), w1.cols() + 2 * w0.cols());
  out.dst << r1, r0, t;
  out.gram = out.src.adjoint() * jm.matrix() * out.src;
  return out;
}

}  // namespace

JExtension extend_j_isometry(const KreinSubspace& dom, const KreinSubspace& ran, const Mat& u,
                             double tol) {
  const auto& jm = dom.ambient_symmetry();
  const auto& ji = ran.ambient_symmetry();
  if (u.rows() != ji.dim() || u.cols() != jm.dim())
    throw DimensionError("extend_j_isometry: U must map the domain ambient space to the range ambient space");

  const Mat image = u * dom.basis();
  const double scale = std::max(1.0, op_norm(image));

  // U must land in ran and be J-isometric on dom.
  if (dom.dim() > 0) {
    const Mat ran_q = range_basis(ran.basis());
    const double outside = op_norm(image - ran_q * (ran_q.adjoint() * image));
    if (outside > tol * scale) {
      std::ostringstream os;
      os << "extend_j_isometry: U(dom) is not contained in ran (residual " << outside << ")";
      throw NumericalError(os.str());
    }
    const double iso =
        op_norm(image.adjoint() * ji.matrix() * image - dom.gram()) / (scale * scale);
    if (iso > tol) {
      std::ostringstream os;
      os << "extend_j_isometry: U is not J-isometric on dom (relative defect " << iso << ")";
      throw NumericalError(os.str());
    }
  }

  const Signature sm{jm.positive(), jm.negative(), 0};
  const Signature si{ji.positive(), ji.negative(), 0};
  if (!(sm == si)) throw PaddingRequired(sm, si);

  // Split dom into a regular part and its radical, and give the radical
  // hyperbolic partners on both sides so that U acts on a regular subspace.
  const auto witt = witt_completion(range_basis(dom.basis()), u, jm, ji);

  KreinSubspace dom_c(witt.src.cols() ? null_space(witt.src.adjoint() * jm.matrix())
                                      : Mat::Identity(jm.dim(), jm.dim()),
                      jm);
  KreinSubspace ran_c(witt.dst.cols() ? null_space(witt.dst.adjoint() * ji.matrix())
                                      : Mat::Identity(ji.dim(), ji.dim()),
                      ji);
  auto dom_c_reg = regularize_subspace(dom_c);
  auto ran_c_reg = regularize_subspace(ran_c);

  JExtension ext;
  ext.radical_dim = witt.radical;
  ext.domain_companion = {dom_c_reg.j0.positive(), dom_c_reg.j0.negative(), 0};
  ext.range_companion = {ran_c_reg.j0.positive(), ran_c_reg.j0.negative(), 0};
  if (!(ext.domain_companion == ext.range_companion))
    throw PaddingRequired(ext.domain_companion, ext.range_companion);

  // Ǔ [S, Ed] = [T, Er]; [S, Ed]^{-1} = diag(Gs, Jc)^{-1} [S, Ed]* J_M.
  const Eigen::Index n = jm.dim();
  Mat src(n, n), dst(ji.dim(), n);
  src << witt.src, dom_c_reg.basis;
  dst << witt.dst, ran_c_reg.basis;
  const Mat gs_inv = witt.gram.size() ? Mat(witt.gram.partialPivLu().inverse()) : Mat(0, 0);
  Mat s = block_diag({gs_inv, dom_c_reg.j0.matrix()});
  ext.extension = dst * s * src.adjoint() * jm.matrix();
  ext.aux_dim = 0;
  ext.aux_symmetry = CanonicalSymmetry::identity(0);

  ext.unitarity_defect = j_unitarity_defect(ext.extension, jm, ji).max();
  ext.restriction_defect =
      dom.dim() ? op_norm(ext.extension * dom.basis() - image) / scale : 0.0;
  return ext;
}

Mat random_j_unitary(const CanonicalSymmetry& j, Rng& rng, int factors, double max_rapidity) {
  const int n = j.dim();
  if (n == 0) return Mat(0, 0);
  // Work in an eigenbasis of J so that J is diagonal.
  Mat frame = Mat::Identity(n, n);
  std::vector<int> signs;
  if (j.is_diagonal()) {
    signs = j.signs();
  } else {
    auto eig = hermitian_eigen(j.matrix());
    frame = eig.vectors;
    signs.resize(n);
    for (int i = 0; i < n; ++i) signs[i] = eig.values(i) > 0 ? 1 : -1;
  }
  if (factors < 0) factors = 3 * n;
  Mat w = Mat::Identity(n, n);
  for (int i = 0; i < n; ++i) w(i, i) = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
  if (n >= 2) {
    for (int f = 0; f < factors; ++f) {
      int a = rng.index(n), b = rng.index(n - 1);
      if (b >= a) ++b;
      const cplx phase = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
      Mat e = Mat::Identity(n, n);
      if (signs[a] == signs[b]) {
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        e(a, a) = std::cos(th);
        e(b, b) = std::cos(th);
        e(a, b) = -std::conj(phase) * std::sin(th);
        e(b, a) = phase * std::sin(th);
      } else {
        const double rho = rng.uniform(-max_rapidity, max_rapidity);
        e(a, a) = std::cosh(rho);
        e(b, b) = std::cosh(rho);
        e(a, b) = std::conj(phase) * std::sinh(rho);
        e(b, a) = phase * std::sinh(rho);
      }
      w = e * w;
    }
  }
  return frame * w * frame.adjoint();
}

}  // namespace jcs
