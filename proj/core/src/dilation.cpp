#include "jcs/dilation.hpp"

#include <algorithm>
#include <sstream>

#include "jcs/series.hpp"
#include "jcs/transfer.hpp"

namespace jcs {

namespace {

/// Coefficient of z^t in F(z) = col(F_k(z)).
Mat stacked_coefficient(const AglerDecomposition& dec, const MultiIndex& t) {
  Mat out = Mat::Zero(dec.total_dim(), dec.cols);
  if (level(t) > dec.degree) return out;
  for (int k = 0; k < dec.n; ++k) out.middleRows(dec.offset(k), dec.dim(k)) = dec.f[k].coefficient(t);
  return out;
}

/// Coefficient of z^t in zP F(z): block k carries F_k at t - e_k.
Mat shifted_coefficient(const AglerDecomposition& dec, const MultiIndex& t) {
  Mat out = Mat::Zero(dec.total_dim(), dec.cols);
  for (int k = 0; k < dec.n; ++k) {
    if (t[k] == 0) continue;
    const MultiIndex s = shifted(t, k, -1);
    if (level(s) > dec.degree) continue;
    out.middleRows(dec.offset(k), dec.dim(k)) = dec.f[k].coefficient(s);
  }
  return out;
}

std::vector<Point> polydisk_samples(int n, int count, double r, Rng& rng) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.polydisk_point(n, r));
  return out;
}

void record(DilationResult& res, const std::string& stage, double value) {
  res.defects[stage] = value;
  if (!(value <= res.tolerance(stage))) {
    res.failed.push_back(stage);
  }
}

bool truncation_stage(const std::string& stage) {
  return stage == "lin-tf" || stage == "lin-tf-chain" || stage == "transfer-coincidence";
}

}  // namespace

double DilationResult::tolerance(const std::string& stage) const {
  return truncation_stage(stage) ? truncation_tol : tol;
}

PartialIsometry build_U(const AglerDecomposition& dec, const std::vector<Mat>& g) {
  if (static_cast<int>(g.size()) != dec.n || g[0].cols() != dec.cols)
    throw DimensionError("build_U: decomposition does not match the operator tuple");
  const int n = dec.n;
  const int n1 = dec.cols;
  const int n2 = static_cast<int>(g[0].rows());
  const auto jm = dec.j_m();
  const Point origin(n, 0.0);
  const Mat f0 = dec.stacked(origin);

  PartialIsometry pu;
  // K_0: the J_M-orthogonal companion of Ran F(0).
  KreinSubspace k0(null_space(f0.adjoint() * jm.matrix()), jm);
  auto reg = regularize_subspace(k0);
  pu.k0_basis = reg.basis;
  pu.j0 = reg.j0;
  pu.j_i = pu.j0.plus_identity(n2);
  const int kd = static_cast<int>(pu.k0_basis.cols());
  const Mat to_k0 = pu.j0.matrix() * pu.k0_basis.adjoint() * jm.matrix();

  pu.max_degree = dec.exact ? dec.degree + 1 : dec.degree;
  const auto indices = indices_up_to(n, pu.max_degree, 1);
  const int cols = static_cast<int>(indices.size()) * n1;
  Mat l(dec.total_dim(), cols), r(kd + n2, cols);
  int c = 0;
  for (const auto& t : indices) {
    l.middleCols(c, n1) = shifted_coefficient(dec, t);
    Mat rt = Mat::Zero(kd + n2, n1);
    rt.topRows(kd) = to_k0 * stacked_coefficient(dec, t);
    if (level(t) == 1) {
      const int k = static_cast<int>(std::find(t.begin(), t.end(), 1) - t.begin());
      rt.bottomRows(n2) = g[k];
    }
    r.middleCols(c, n1) = rt;
    c += n1;
  }

  const auto svd = checked_svd(l);
  const auto& sv = svd.s;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankThreshold * sv(0)) ++rank;
  pu.domain = svd.u.leftCols(rank);
  const Mat vp = svd.v.leftCols(rank);
  pu.image = r * vp * sv.head(rank).cwiseInverse().asDiagonal();
  pu.ambient = pu.image * pu.domain.adjoint();
  // R must vanish on Ker L.
  pu.lsq_residual = op_norm(r - r * vp * vp.adjoint()) / std::max(1.0, op_norm(r));
  pu.isometry_defect = hermitian_norm(pu.image.adjoint() * pu.j_i.matrix() * pu.image -
                                      pu.domain.adjoint() * jm.matrix() * pu.domain);
  return pu;
}

LinearTfReport verify_linear_tf(const MultiparametricSystem& check, const std::vector<Mat>& g,
                                const std::vector<Point>& samples,
                                const std::vector<Point>& chain_samples, int horizon) {
  if (static_cast<int>(g.size()) != check.n() || g[0].rows() != check.dy() ||
      g[0].cols() != check.du())
    throw DimensionError("verify_linear_tf: check system does not match the operator tuple");
  LinearTfReport rep;
  for (const auto& z : samples)
    rep.transfer = std::max(rep.transfer, op_norm(eval_transfer(check, z) - linear_combination(z, g)));
  for (int k = 0; k < check.n(); ++k) rep.feedthrough = std::max(rep.feedthrough, op_norm(check.d(k) - g[k]));
  if (check.dx() > 0)
    for (const auto& z : chain_samples) {
      const Mat za = linear_combination(z, check.a());
      const Mat zc = linear_combination(z, check.c());
      Mat w = linear_combination(z, check.b());
      for (int p = 0; p <= horizon; ++p) {
        rep.chain = std::max(rep.chain, op_norm(zc * w));
        w = za * w;
      }
    }
  return rep;
}

DilationReport verify_dilation(const MultiparametricSystem& sys,
                               const MultiparametricSystem& alpha_tilde,
                               const CanonicalSymmetry& j, const std::vector<Point>& samples,
                               int x_offset) {
  const int dx = sys.dx();
  if (x_offset < 0) x_offset = alpha_tilde.dx() - dx;
  if (alpha_tilde.n() != sys.n() || alpha_tilde.du() != sys.du() || alpha_tilde.dy() != sys.dy() ||
      x_offset + dx > alpha_tilde.dx())
    throw DimensionError("verify_dilation: state space of alpha does not embed in the dilation");
  DilationReport rep;
  for (int k = 0; k < sys.n(); ++k) {
    rep.compression = std::max(
        {rep.compression, op_norm(alpha_tilde.a(k).block(x_offset, x_offset, dx, dx) - sys.a(k)),
         op_norm(alpha_tilde.b(k).middleRows(x_offset, dx) - sys.b(k)),
         op_norm(alpha_tilde.c(k).middleCols(x_offset, dx) - sys.c(k)),
         op_norm(alpha_tilde.d(k) - sys.d(k))});
  }
  for (const auto& z : samples)
    rep.transfer = std::max(rep.transfer, op_norm(eval_transfer(alpha_tilde, z) - eval_transfer(sys, z)));
  rep.defects = jconservativity_defect(alpha_tilde, j);
  rep.conservativity = rep.defects.max();
  return rep;
}

DilationResult build_dilation(const MultiparametricSystem& input, const AglerDecomposition& dec,
                              const DilationOptions& options) {
  DilationResult res;
  res.tol = options.tol;
  res.truncation_tol = options.truncation_tol >= 0.0 ? options.truncation_tol : options.tol;
  res.alpha = pad_io(input);
  const auto& sys = res.alpha;
  const auto g = system_operators(sys);
  const int n = sys.n();
  const int n1 = sys.dx() + sys.du();
  const int n2 = sys.dx() + sys.dy();
  if (dec.n != n || dec.cols != n1) {
    std::ostringstream os;
    os << "build_dilation: decomposition is for " << dec.n << " variables and " << dec.cols
       << " columns, system operators have N = " << n << " and " << n1 << " columns";
    if (input.du() != input.dy()) os << " (decompositions must be built for the padded system)";
    throw DimensionError(os.str());
  }
  auto fail_fast = [&]() {
    if (options.throw_on_failure && !res.failed.empty()) {
      const auto& stage = res.failed.front();
      throw StageFailure(stage, res.defects.at(stage), res.tolerance(stage));
    }
  };

  const auto jm = dec.j_m();
  const Point origin(n, 0.0);
  const Mat f0 = dec.stacked(origin);
  record(res, "semiunitarity", op_norm(f0.adjoint() * jm.matrix() * f0 - Mat::Identity(n1, n1)));
  fail_fast();

  res.partial = build_U(dec, g);
  const auto& pu = res.partial;
  res.k0_dim = static_cast<int>(pu.k0_basis.cols());
  record(res, "ls-consistency", pu.lsq_residual);
  record(res, "isometry", pu.isometry_defect);
  fail_fast();

  if (options.skip_extension) {
    res.u_extended = pu.ambient;
    res.aux_dim = 0;
    record(res, "extension", 0.0);
  } else {
    KreinSubspace dom(pu.domain, jm);
    KreinSubspace ran(range_basis(pu.image), pu.j_i);
    auto ext = extend_j_isometry(dom, ran, pu.ambient, std::max(options.tol, 1e-10));
    res.u_extended = ext.extension;
    res.aux_dim = ext.aux_dim;
    record(res, "extension", std::max(ext.unitarity_defect, ext.restriction_defect));
  }
  fail_fast();

  // Ǧ_k = Ǔ P_k [B0, F(0)].
  const int kd = res.k0_dim;
  Mat embed(dec.total_dim(), kd + n1);
  embed << pu.k0_basis, f0;
  res.check_operators.clear();
  for (int k = 0; k < n; ++k) {
    Mat pk = Mat::Zero(dec.total_dim(), kd + n1);
    pk.middleRows(dec.offset(k), dec.dim(k)) = embed.middleRows(dec.offset(k), dec.dim(k));
    res.check_operators.push_back(res.u_extended * pk);
  }
  res.check_symmetry = pu.j0;
  const auto j1 = pu.j0.plus_identity(n1);
  const auto j2 = pu.j0.plus_identity(n2);
  record(res, "conservativity", operator_defects(res.check_operators, j1, j2).max());

  Rng rng(options.seed);
  double torus = 0.0;
  for (const auto& z : polydisk_samples(n, options.torus_samples, 1.0, rng)) {
    Point zeta(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zeta[i] = std::polar(1.0, std::arg(z[i]));
    torus = std::max(torus, j_unitarity_defect(linear_combination(zeta, res.check_operators), j1, j2).max());
  }
  record(res, "torus", torus);
  fail_fast();

  const auto samples = polydisk_samples(n, options.samples, dec.radius, rng);
  const auto chain_samples = polydisk_samples(n, options.chain_samples, dec.radius, rng);
  const auto check = MultiparametricSystem::from_operators(res.check_operators, kd, n1);
  const int horizon = options.chain_horizon >= 0 ? options.chain_horizon : kd + 2;
  auto lin = verify_linear_tf(check, g, samples, chain_samples, horizon);
  record(res, "lin-tf", lin.transfer);
  record(res, "lin-tf-feedthrough", lin.feedthrough);
  record(res, "lin-tf-chain", lin.chain);
  fail_fast();

  res.alpha_tilde = MultiparametricSystem::from_operators(res.check_operators, kd + sys.dx(), sys.du());
  res.alpha_tilde.name = sys.name.empty() ? "dilation" : sys.name + "-dilation";
  res.j = CanonicalSymmetry::direct_sum({pu.j0, CanonicalSymmetry::identity(sys.dx())});
  res.x_offset = kd;
  auto rep = verify_dilation(sys, res.alpha_tilde, res.j, samples, res.x_offset);
  record(res, "compression", rep.compression);
  record(res, "transfer-coincidence", rep.transfer);
  record(res, "dilation-conservativity", rep.conservativity);

  const int taylor_degree = std::max(1, pu.max_degree);
  const auto ta = taylor_coefficients(sys, taylor_degree, TaylorMethod::recursive);
  const auto tb = taylor_coefficients(res.alpha_tilde, taylor_degree, TaylorMethod::recursive);
  double taylor = 0.0;
  for (const auto& [t, c] : ta.coefficients()) taylor = std::max(taylor, op_norm(c - tb.coefficient(t)));
  record(res, "transfer-taylor", taylor);
  fail_fast();
  return res;
}

}  // namespace jcs
