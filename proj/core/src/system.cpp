#include "jcs/system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jcs {

namespace {

void require_shape(const Mat& m, Eigen::Index r, Eigen::Index c, const char* what, int k) {
  if (m.rows() != r || m.cols() != c) {
    std::ostringstream os;
    os << "system: " << what << "[" << k << "] is " << m.rows() << "x" << m.cols()
       << ", expected " << r << "x" << c;
    throw DimensionError(os.str());
  }
}

std::vector<Mat> adjoints(const std::vector<Mat>& ms) {
  std::vector<Mat> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(m.adjoint());
  return out;
}

}  // namespace

MultiparametricSystem::MultiparametricSystem(std::vector<Mat> a, std::vector<Mat> b,
                                             std::vector<Mat> c, std::vector<Mat> d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  const auto n = a_.size();
  if (n == 0) throw DimensionError("system: N must be at least 1");
  if (b_.size() != n || c_.size() != n || d_.size() != n)
    throw DimensionError("system: A, B, C, D tuples must have equal length");
  dx_ = static_cast<int>(a_[0].rows());
  du_ = static_cast<int>(d_[0].cols());
  dy_ = static_cast<int>(d_[0].rows());
  if (du_ < 1 || dy_ < 1) throw DimensionError("system: input and output dimensions must be >= 1");
  for (std::size_t k = 0; k < n; ++k) {
    const int kk = static_cast<int>(k);
    require_shape(a_[k], dx_, dx_, "A", kk);
    require_shape(b_[k], dx_, du_, "B", kk);
    require_shape(c_[k], dy_, dx_, "C", kk);
    require_shape(d_[k], dy_, du_, "D", kk);
  }
}

MultiparametricSystem MultiparametricSystem::zero(int n, int dx, int du, int dy) {
  std::vector<Mat> a(n, Mat::Zero(dx, dx)), b(n, Mat::Zero(dx, du)), c(n, Mat::Zero(dy, dx)),
      d(n, Mat::Zero(dy, du));
  return MultiparametricSystem(a, b, c, d);
}

MultiparametricSystem MultiparametricSystem::from_operators(const std::vector<Mat>& g, int dx,
                                                            int du) {
  if (g.empty()) throw DimensionError("from_operators: empty tuple");
  const auto rows = g[0].rows(), cols = g[0].cols();
  if (dx < 0 || dx > rows || dx + du != cols)
    throw DimensionError("from_operators: state/input split does not fit the operator shape");
  const auto dy = rows - dx;
  std::vector<Mat> a, b, c, d;
  for (const auto& gk : g) {
    if (gk.rows() != rows || gk.cols() != cols)
      throw DimensionError("from_operators: operators differ in shape");
    a.push_back(gk.topLeftCorner(dx, dx));
    b.push_back(gk.topRightCorner(dx, du));
    c.push_back(gk.bottomLeftCorner(dy, dx));
    d.push_back(gk.bottomRightCorner(dy, du));
  }
  return MultiparametricSystem(a, b, c, d);
}

std::vector<Mat> system_operators(const MultiparametricSystem& sys) {
  std::vector<Mat> g;
  g.reserve(sys.n());
  for (int k = 0; k < sys.n(); ++k) {
    Mat gk(sys.dx() + sys.dy(), sys.dx() + sys.du());
    gk << sys.a(k), sys.b(k), sys.c(k), sys.d(k);
    g.push_back(std::move(gk));
  }
  return g;
}

MultiparametricSystem conjugate_system(const MultiparametricSystem& sys) {
  MultiparametricSystem out(adjoints(sys.a()), adjoints(sys.c()), adjoints(sys.b()),
                            adjoints(sys.d()));
  out.name = sys.name;
  return out;
}

double ConservativityDefects::max() const { return std::max({r1, r2, r3, r4}); }

ConservativityDefects operator_defects(const std::vector<Mat>& g, const CanonicalSymmetry& j1,
                                       const CanonicalSymmetry& j2) {
  for (const auto& gk : g)
    if (gk.rows() != j2.dim() || gk.cols() != j1.dim())
      throw DimensionError("operator_defects: operator shape does not match J1, J2");
  ConservativityDefects r;
  const auto& m1 = j1.matrix();
  const auto& m2 = j2.matrix();
  Mat s1 = -m1, s3 = -m2;
  for (const auto& gk : g) {
    s1 += gk.adjoint() * m2 * gk;
    s3 += gk * m1 * gk.adjoint();
  }
  r.r1 = hermitian_norm(s1);
  r.r3 = hermitian_norm(s3);
  for (std::size_t k = 0; k < g.size(); ++k)
    for (std::size_t l = 0; l < g.size(); ++l) {
      if (k == l) continue;
      r.r2 = std::max(r.r2, op_norm(g[k].adjoint() * m2 * g[l]));
      r.r4 = std::max(r.r4, op_norm(g[k] * m1 * g[l].adjoint()));
    }
  return r;
}

ConservativityDefects jconservativity_defect(const MultiparametricSystem& sys,
                                             const CanonicalSymmetry& j) {
  if (j.dim() != sys.dx()) {
    std::ostringstream os;
    os << "jconservativity_defect: J has dim " << j.dim() << " but the state space has dim "
       << sys.dx();
    throw DimensionError(os.str());
  }
  return operator_defects(system_operators(sys), j.plus_identity(sys.du()),
                          j.plus_identity(sys.dy()));
}

double torus_check(const MultiparametricSystem& sys, const CanonicalSymmetry& j,
                   const std::vector<Point>& samples) {
  if (j.dim() != sys.dx()) throw DimensionError("torus_check: J does not match the state space");
  const auto g = system_operators(sys);
  const auto j1 = j.plus_identity(sys.du());
  const auto j2 = j.plus_identity(sys.dy());
  double worst = 0.0;
  for (const auto& z : samples) {
    for (const auto& zk : z)
      if (std::abs(std::abs(zk) - 1.0) > 1e-12)
        throw NumericalError("torus_check: sample point is off the torus");
    worst = std::max(worst, j_unitarity_defect(linear_combination(z, g), j1, j2).max());
  }
  return worst;
}

std::vector<Point> torus_grid(int n) {
  const int m = 2 * n + 1;
  std::vector<Point> out;
  std::vector<int> idx(n, 0);
  while (true) {
    Point z(n);
    for (int k = 0; k < n; ++k) z[k] = std::polar(1.0, 2.0 * std::numbers::pi * idx[k] / m);
    out.push_back(std::move(z));
    int k = 0;
    while (k < n && ++idx[k] == m) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

ConservativityDefects torus_coefficient_defects(const MultiparametricSystem& sys,
                                                const CanonicalSymmetry& j) {
  const int n = sys.n();
  const auto g = system_operators(sys);
  const auto j1 = j.plus_identity(sys.du());
  const auto j2 = j.plus_identity(sys.dy());
  const auto grid = torus_grid(n);
  const double weight = 1.0 / static_cast<double>(grid.size());

  // Fourier coefficient at frequency e_l - e_k (k != l) or 0 (k == l == -1).
  auto coefficient = [&](const Point& z, int k, int l) {
    cplx c = 1.0;
    if (k >= 0) c = z[k] * std::conj(z[l]);  // conj(ζ^{e_l - e_k})
    return c;
  };

  Mat c1 = Mat::Zero(j1.dim(), j1.dim()), c3 = Mat::Zero(j2.dim(), j2.dim());
  std::vector<Mat> phi, psi;
  phi.reserve(grid.size());
  psi.reserve(grid.size());
  for (const auto& z : grid) {
    const Mat gz = linear_combination(z, g);
    phi.push_back(gz.adjoint() * j2.matrix() * gz - j1.matrix());
    psi.push_back(gz * j1.matrix() * gz.adjoint() - j2.matrix());
    c1 += weight * phi.back();
    c3 += weight * psi.back();
  }
  ConservativityDefects r;
  r.r1 = hermitian_norm(c1);
  r.r3 = hermitian_norm(c3);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      if (k == l) continue;
      Mat c2 = Mat::Zero(j1.dim(), j1.dim());
      Mat c4 = Mat::Zero(j2.dim(), j2.dim());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        // phi carries G_k* J2 G_l at ζ^{e_l - e_k}; psi carries G_k J1 G_l* at ζ^{e_k - e_l}.
        c2 += weight * coefficient(grid[i], k, l) * phi[i];
        c4 += weight * coefficient(grid[i], l, k) * psi[i];
      }
      r.r2 = std::max(r.r2, op_norm(c2));
      r.r4 = std::max(r.r4, op_norm(c4));
    }
  return r;
}

MultiparametricSystem random_jconservative(int n, int dx, int du, std::uint64_t seed,
                                           const CanonicalSymmetry& j) {
  if (n < 1) throw DimensionError("random_jconservative: N must be at least 1");
  if (j.dim() != dx) throw DimensionError("random_jconservative: J does not match dX");
  const int m = dx + du;
  if (m < n) {
    std::ostringstream os;
    os << "random_jconservative: partition infeasible, dX + dU = " << m << " < N = " << n;
    throw DimensionError(os.str());
  }
  Rng rng(seed);
  const auto j1 = j.plus_identity(du);

  // Eigenbasis of J1; P_k are coordinate projections in that basis.
  Mat frame = Mat::Identity(m, m);
  if (!j1.is_diagonal()) frame = hermitian_eigen(j1.matrix()).vectors;

  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  for (int i = m - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  std::vector<int> group(m);
  for (int i = 0; i < m; ++i) group[order[i]] = i < n ? i : rng.index(n);

  const Mat v = random_j_unitary(j1, rng);
  std::vector<Mat> g;
  for (int k = 0; k < n; ++k) {
    Mat p = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i)
      if (group[i] == k) p(i, i) = 1.0;
    g.push_back(v * frame * p * frame.adjoint());
  }
  auto sys = MultiparametricSystem::from_operators(g, dx, du);
  sys.name = "random-jconservative";
  return sys;
}

MultiparametricSystem one_parameter_slice(const MultiparametricSystem& sys, const Point& z) {
  return MultiparametricSystem({linear_combination(z, sys.a())}, {linear_combination(z, sys.b())},
                               {linear_combination(z, sys.c())}, {linear_combination(z, sys.d())});
}

MultiparametricSystem pad_io(const MultiparametricSystem& sys) {
  const int du = sys.du(), dy = sys.dy(), m = std::max(du, dy);
  if (du == dy) return sys;
  std::vector<Mat> a = sys.a(), b, c, d;
  for (int k = 0; k < sys.n(); ++k) {
    Mat bk = Mat::Zero(sys.dx(), m), ck = Mat::Zero(m, sys.dx()), dk = Mat::Zero(m, m);
    bk.leftCols(du) = sys.b(k);
    ck.topRows(dy) = sys.c(k);
    dk.topLeftCorner(dy, du) = sys.d(k);
    b.push_back(bk);
    c.push_back(ck);
    d.push_back(dk);
  }
  MultiparametricSystem out(a, b, c, d);
  out.name = sys.name;
  return out;
}

MultiparametricSystem hyperbolic_example() {
  Mat a(1, 1), b(1, 1), c(1, 1), d(1, 1);
  a << 1.25;
  b << 0.75;
  c << 0.75;
  d << 1.25;
  MultiparametricSystem s({a}, {b}, {c}, {d});
  s.name = "hyperbolic";
  return s;
}

MultiparametricSystem matrix_unit_example() {
  Mat one = Mat::Identity(1, 1), zero = Mat::Zero(1, 1);
  MultiparametricSystem s({one, zero}, {zero, zero}, {zero, zero}, {zero, one});
  s.name = "matrix-unit";
  return s;
}

}  // namespace jcs
