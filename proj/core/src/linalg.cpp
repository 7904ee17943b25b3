#include "jcs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace jcs {

namespace {

std::string stage_message(const std::string& stage, double residual, double tol) {
  std::ostringstream os;
  os << "stage '" << stage << "' failed: residual " << residual << " > tolerance " << tol;
  return os.str();
}

Eigen::VectorXd singular_values(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return Eigen::VectorXd();
  if (std::min(m.rows(), m.cols()) <= 16) return Eigen::JacobiSVD<Mat>(m).singularValues();
  return checked_svd(m).s;
}

template <class Svd>
SvdResult unpack(const Svd& svd) {
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

bool factorization_ok(const Mat& m, const SvdResult& f) {
  constexpr double tol = 1e-10;
  const Eigen::Index k = f.s.size();
  const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
  const Mat rec = f.u.leftCols(k) * f.s.asDiagonal() * f.v.leftCols(k).adjoint();
  if ((rec - m).norm() > tol * scale) return false;
  if ((f.u.adjoint() * f.u - Mat::Identity(f.u.cols(), f.u.cols())).norm() > tol * std::sqrt(double(f.u.cols())))
    return false;
  return (f.v.adjoint() * f.v - Mat::Identity(f.v.cols(), f.v.cols())).norm() <=
         tol * std::sqrt(double(f.v.cols()));
}

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

StageFailure::StageFailure(std::string stage, double residual, double tol)
    : Error(stage_message(stage, residual, tol)),
      stage_(std::move(stage)),
      residual_(residual),
      tol_(tol) {}

SvdResult checked_svd(const Mat& m, bool full_v) {
  const unsigned flags = Eigen::ComputeThinU | (full_v ? Eigen::ComputeFullV : Eigen::ComputeThinV);
  if (m.rows() == 0 || m.cols() == 0)
    return {Mat(m.rows(), 0), Eigen::VectorXd(), full_v ? Mat(Mat::Identity(m.cols(), m.cols())) : Mat(m.cols(), 0)};
  // Eigen 3.4's divide-and-conquer SVD occasionally returns a wrong factorization
  // for complex matrices with clustered singular values.
  if (std::min(m.rows(), m.cols()) > 16) {
    auto f = unpack(Eigen::BDCSVD<Mat>(m, flags));
    if (factorization_ok(m, f)) return f;
  }
  return unpack(Eigen::JacobiSVD<Mat>(m, flags));
}

double op_norm(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 8) return singular_values(m)(0);
  // λ_max of the smaller Gram matrix carries σ_max to full relative accuracy.
  const Mat gram = m.rows() < m.cols() ? Mat(m * m.adjoint()) : Mat(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double hermitian_norm(const Mat& h) {
  if (h.rows() == 0) return 0.0;
  Mat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

HermitianEigen hermitian_eigen(const Mat& h) {
  if (h.rows() != h.cols()) throw DimensionError("hermitian_eigen: matrix is not square");
  if (h.rows() == 0) return {Eigen::VectorXd(), Mat(0, 0)};
  Mat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  return {es.eigenvalues(), es.eigenvectors()};
}

int numerical_rank(const Mat& m, double rel_tol) {
  auto s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

Mat null_space(const Mat& m, double rel_tol, double scale) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Mat(0, 0);
  if (m.rows() == 0) return Mat::Identity(n, n);
  const auto svd = checked_svd(m, true);
  const auto& s = svd.s;
  const double ref = scale >= 0.0 ? scale : (s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * ref) ++rank;
  return svd.v.rightCols(n - rank);
}

Mat range_basis(const Mat& m, double rel_tol) {
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  const auto svd = checked_svd(m);
  const auto& s = svd.s;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return svd.u.leftCols(rank);
}

Mat block_diag(const std::vector<Mat>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Mat real_diag(const std::vector<double>& d) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) out(i, i) = d[i];
  return out;
}

Mat linear_combination(const Point& z, const std::vector<Mat>& terms) {
  if (z.size() != terms.size())
    throw DimensionError("linear_combination: point has " + std::to_string(z.size()) +
                         " coordinates but " + std::to_string(terms.size()) + " terms given");
  if (terms.empty()) throw DimensionError("linear_combination: no terms");
  Mat out = Mat::Zero(terms[0].rows(), terms[0].cols());
  for (std::size_t k = 0; k < terms.size(); ++k) out += z[k] * terms[k];
  return out;
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::index(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

cplx Rng::complex_normal() { return {normal(), normal()}; }

Point Rng::torus_point(int n) {
  Point z(n);
  for (auto& zk : z) zk = std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi));
  return z;
}

Point Rng::polydisk_point(int n, double r) {
  Point z(n);
  for (auto& zk : z) zk = std::polar(r * std::sqrt(uniform()), uniform(0.0, 2.0 * std::numbers::pi));
  return z;
}

Mat Rng::complex_matrix(int rows, int cols) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = complex_normal();
  return m;
}

Vec Rng::complex_vector(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal();
  return v;
}

}  // namespace jcs
