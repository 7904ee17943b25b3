#include "jcs/agler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jcs/transfer.hpp"

namespace jcs {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_norm(const std::vector<Mat>& g) {
  double m = 0.0;
  for (const auto& gk : g) m = std::max(m, op_norm(gk));
  return m;
}

void check_tuple(const std::vector<Mat>& g) {
  if (g.empty()) throw DimensionError("operator tuple is empty");
  for (const auto& gk : g)
    if (gk.rows() != g[0].rows() || gk.cols() != g[0].cols())
      throw DimensionError("operators in the tuple differ in shape");
}

/// PSD square root; eigenvalues in [-1e-10, 0) clamp to zero, below that is an error.
Mat psd_sqrt(const Mat& h, double floor, double& most_negative) {
  auto eig = hermitian_eigen(h);
  most_negative = eig.values.size() ? eig.values.minCoeff() : 0.0;
  if (most_negative < -floor) return Mat();
  Eigen::VectorXd s = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * s.asDiagonal() * eig.vectors.adjoint();
}

void check_pair(const Point& p, int n, double r) {
  if (static_cast<int>(p.size()) != n) throw DimensionError("kernel pair has the wrong number of coordinates");
  for (const auto& c : p)
    if (std::abs(c) > r * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "kernel pair leaves the certified radius " << r << " (|z_k| = " << std::abs(c) << ")";
      throw NumericalError(os.str());
    }
}

Mat pencil(const std::vector<Mat>& g, const Point& z) { return linear_combination(z, g); }

/// Σ_k (1 - conj(λ_k) z_k) F_k(λ)* J^(k) F_k(z).
Mat kernel_sum(const AglerDecomposition& dec, const Point& lambda, const Point& z) {
  Mat acc = Mat::Zero(dec.cols, dec.cols);
  for (int k = 0; k < dec.n; ++k) {
    const Mat fl = dec.f_k(k, lambda);
    const Mat fz = dec.f_k(k, z);
    const int mp = dec.m_plus[k];
    const int mm = dec.m_minus[k];
    Mat term = fl.topRows(mp).adjoint() * fz.topRows(mp);
    if (mm > 0) term -= fl.bottomRows(mm).adjoint() * fz.bottomRows(mm);
    acc += (1.0 - std::conj(lambda[k]) * z[k]) * term;
  }
  return acc;
}

double coefficient_scale(const AglerDecomposition& dec) {
  double s = 1.0 + dec.epsilon * dec.epsilon;
  for (const auto& fk : dec.f)
    for (const auto& [_, c] : fk.coefficients()) s += c.squaredNorm();
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

double AglerDecomposition::eta_at(double r) const {
  if (exact) return 0.0;
  if (r >= 1.0) throw NumericalError("certificate radius must be below 1");
  return eta_constant * std::pow(r, 2.0 * (degree + 1)) / (1.0 - r * r);
}

int AglerDecomposition::total_dim() const {
  int s = 0;
  for (int k = 0; k < n; ++k) s += dim(k);
  return s;
}

int AglerDecomposition::offset(int k) const {
  int s = 0;
  for (int i = 0; i < k; ++i) s += dim(i);
  return s;
}

CanonicalSymmetry AglerDecomposition::j_k(int k) const {
  return CanonicalSymmetry::standard(m_plus.at(k), m_minus.at(k));
}

CanonicalSymmetry AglerDecomposition::j_m() const {
  std::vector<CanonicalSymmetry> parts;
  for (int k = 0; k < n; ++k) parts.push_back(j_k(k));
  return CanonicalSymmetry::direct_sum(parts);
}

Mat AglerDecomposition::f_k(int k, const Point& z) const { return eval_series(f.at(k), z).value; }

Mat AglerDecomposition::stacked(const Point& z) const {
  Mat out(total_dim(), cols);
  for (int k = 0; k < n; ++k) out.middleRows(offset(k), dim(k)) = f_k(k, z);
  return out;
}

Mat AglerDecomposition::stacked_plus(const Point& z) const {
  int rows = 0;
  for (int k = 0; k < n; ++k) rows += m_plus[k];
  Mat out(rows, cols);
  int r = 0;
  for (int k = 0; k < n; ++k) {
    out.middleRows(r, m_plus[k]) = f_k(k, z).topRows(m_plus[k]);
    r += m_plus[k];
  }
  return out;
}

Mat AglerDecomposition::stacked_minus(const Point& z) const {
  int rows = 0;
  for (int k = 0; k < n; ++k) rows += m_minus[k];
  Mat out(rows, cols);
  int r = 0;
  for (int k = 0; k < n; ++k) {
    out.middleRows(r, m_minus[k]) = f_k(k, z).bottomRows(m_minus[k]);
    r += m_minus[k];
  }
  return out;
}

Mat AglerDecomposition::shifted(const Point& z) const {
  Mat out(total_dim(), cols);
  for (int k = 0; k < n; ++k) out.middleRows(offset(k), dim(k)) = z[k] * f_k(k, z);
  return out;
}

// ---------------------------------------------------------------------------

EpsilonBounds epsilon_bounds(const std::vector<Mat>& g, const std::vector<Point>& torus_samples) {
  check_tuple(g);
  EpsilonBounds b;
  for (const auto& z : torus_samples) b.lower = std::max(b.lower, op_norm(pencil(g, z)));
  b.upper = static_cast<double>(g.size()) * max_norm(g);
  b.lower = std::min(b.lower, b.upper);
  return b;
}

double minimal_constructive_epsilon(const std::vector<Mat>& g) {
  check_tuple(g);
  return std::max(1.0, static_cast<double>(g.size()) * max_norm(g));
}

AglerDecomposition construct_pencil_decomposition(const std::vector<Mat>& g, double epsilon,
                                                  int degree, double radius) {
  check_tuple(g);
  if (degree < 1) throw DimensionError("construct_pencil_decomposition: degree must be at least 1");
  if (!(radius > 0.0 && radius < 1.0))
    throw NumericalError("construct_pencil_decomposition: radius must lie in (0, 1)");
  const int n = static_cast<int>(g.size());
  const int n1 = static_cast<int>(g[0].cols());
  const int n2 = static_cast<int>(g[0].rows());
  const double e_min = minimal_constructive_epsilon(g);
  auto too_small = [&](const std::string& why) {
    std::ostringstream os;
    os << "construct_pencil_decomposition: epsilon " << epsilon << " is infeasible (" << why
       << "); minimal feasible epsilon is " << e_min;
    return NumericalError(os.str());
  };
  if (epsilon < 1.0) throw too_small("below 1");

  // Defect roots D_k = ((ε²/N) I - N G_k* G_k)^{1/2}.
  std::vector<Mat> dk(n);
  for (int k = 0; k < n; ++k) {
    const Mat sq = (epsilon * epsilon / n) * Mat::Identity(n1, n1) - n * g[k].adjoint() * g[k];
    double neg = 0.0;
    dk[k] = psd_sqrt(sq, 1e-10, neg);
    if (dk[k].size() == 0 && n1 > 0) {
      std::ostringstream os;
      os << "D_" << k + 1 << "^2 has eigenvalue " << neg;
      throw too_small(os.str());
    }
  }

  AglerDecomposition dec;
  dec.n = n;
  dec.cols = n1;
  dec.epsilon = epsilon;
  dec.degree = degree;
  dec.radius = radius;
  const bool negative = epsilon > 1.0;
  const double c_plus = epsilon / std::sqrt(static_cast<double>(n));
  const double c_minus = negative ? std::sqrt((epsilon * epsilon - 1.0) / n) : 0.0;
  const Mat id = Mat::Identity(n1, n1);

  for (int k = 0; k < n; ++k) {
    const int pairs_owned = n - 1 - k;
    const int mp = n1 * (degree + 1) + pairs_owned * degree * n2;
    const int mm = negative ? n1 * (degree + 1) : 0;
    dec.m_plus.push_back(mp);
    dec.m_minus.push_back(mm);
    TruncatedOperatorSeries fk(n, degree, mp + mm, n1);

    auto place = [&](const MultiIndex& s, int row, const Mat& block) {
      Mat c = fk.coefficient(s);
      c.block(row, 0, block.rows(), block.cols()) += block;
      fk.set(s, c);
    };
    const MultiIndex zero(n, 0);
    int row = 0;
    // (a) per-variable positive rows.
    place(zero, row, c_plus * id);
    row += n1;
    for (int p = 1; p <= degree; ++p) {
      MultiIndex s(n, 0);
      s[k] = p;
      place(s, row, dk[k]);
      row += n1;
    }
    // (b) cross rows z_k^p (z_k G_k - z_l G_l) for l > k.
    for (int l = k + 1; l < n; ++l)
      for (int p = 0; p < degree; ++p) {
        MultiIndex s1(n, 0), s2(n, 0);
        s1[k] = p + 1;
        s2[k] = p;
        s2[l] = 1;
        place(s1, row, g[k]);
        place(s2, row, -g[l]);
        row += n2;
      }
    // (c) negative rows.
    if (negative)
      for (int p = 0; p <= degree; ++p) {
        MultiIndex s(n, 0);
        s[k] = p;
        place(s, row, c_minus * id);
        row += n1;
      }
    dec.f.push_back(std::move(fk));
  }

  double c = epsilon * epsilon - 1.0;
  for (int k = 0; k < n; ++k) c += std::pow(op_norm(dk[k]), 2);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) c += std::pow(op_norm(g[j]) + op_norm(g[k]), 2);
  dec.eta_constant = c;
  return dec;
}

AglerDecomposition conservative_decomposition(const std::vector<Mat>& g, double tol) {
  check_tuple(g);
  const int n = static_cast<int>(g.size());
  const int n1 = static_cast<int>(g[0].cols());
  const int n2 = static_cast<int>(g[0].rows());
  Mat s = -Mat::Identity(n1, n1);
  double cross = 0.0;
  for (int k = 0; k < n; ++k) {
    s += g[k].adjoint() * g[k];
    for (int l = 0; l < n; ++l)
      if (l != k) cross = std::max(cross, op_norm(g[k].adjoint() * g[l]));
  }
  const double iso = hermitian_norm(s);
  if (iso > tol || cross > tol) {
    std::ostringstream os;
    os << "conservative_decomposition: tuple is not isometric (||Σ G_k*G_k - I|| = " << iso
       << ", max ||G_j*G_k|| = " << cross << ")";
    throw NumericalError(os.str());
  }
  AglerDecomposition dec;
  dec.n = n;
  dec.cols = n1;
  dec.epsilon = 1.0;
  dec.degree = 0;
  dec.exact = true;
  for (int k = 0; k < n; ++k) {
    dec.m_plus.push_back(n2);
    dec.m_minus.push_back(0);
    TruncatedOperatorSeries fk(n, 0, n2, n1);
    fk.set(MultiIndex(n, 0), g[k]);
    dec.f.push_back(std::move(fk));
  }
  return dec;
}

std::vector<LambdaZ> random_pairs(int n, int count, double r, Rng& rng) {
  std::vector<LambdaZ> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Point l = rng.polydisk_point(n, r);
    Point z = rng.polydisk_point(n, r);
    out.push_back({std::move(l), std::move(z)});
  }
  return out;
}

KernelCheck verify_kernel_identity(const std::vector<Mat>& g, const AglerDecomposition& dec,
                                   const std::vector<LambdaZ>& pairs) {
  check_tuple(g);
  if (static_cast<int>(g.size()) != dec.n || g[0].cols() != dec.cols)
    throw DimensionError("verify_kernel_identity: decomposition does not match the operator tuple");
  KernelCheck kc;
  const double rounding = 10.0 * kEps * coefficient_scale(dec);
  kc.bound = dec.eta() + rounding;
  const Mat id = Mat::Identity(dec.cols, dec.cols);
  for (const auto& [lambda, z] : pairs) {
    if (!dec.exact) {
      check_pair(lambda, dec.n, dec.radius);
      check_pair(z, dec.n, dec.radius);
    }
    const Mat lhs = id - pencil(g, lambda).adjoint() * pencil(g, z);
    kc.residual = std::max(kc.residual, op_norm(lhs - kernel_sum(dec, lambda, z)));
  }
  return kc;
}

double ZeroIdentityReport::max() const {
  return std::max({plus_constant, minus_constant, polarization, semiunitarity});
}

ZeroIdentityReport derived_zero_identities(const AglerDecomposition& dec,
                                           const std::vector<LambdaZ>& pairs) {
  ZeroIdentityReport rep;
  const Point origin(dec.n, 0.0);
  const Mat id = Mat::Identity(dec.cols, dec.cols);
  const double e2 = dec.epsilon * dec.epsilon;
  const Mat fp0 = dec.stacked_plus(origin);
  const Mat fm0 = dec.stacked_minus(origin);

  std::vector<Point> points{origin};
  for (const auto& [l, z] : pairs) {
    points.push_back(l);
    points.push_back(z);
  }
  for (const auto& z : points) {
    const Mat fpz = dec.stacked_plus(z);
    rep.plus_constant = std::max(rep.plus_constant, op_norm(fp0.adjoint() * fpz - e2 * id));
    const Mat fmz = dec.stacked_minus(z);
    const Mat minus = fm0.rows() ? Mat(fm0.adjoint() * fmz) : Mat(Mat::Zero(dec.cols, dec.cols));
    rep.minus_constant = std::max(rep.minus_constant, op_norm(minus - (e2 - 1.0) * id));
  }
  for (const auto& [l, z] : pairs) {
    for (int sign = 0; sign < 2; ++sign) {
      const Mat f0 = sign == 0 ? fp0 : fm0;
      if (f0.rows() == 0) continue;
      const Mat fl = sign == 0 ? dec.stacked_plus(l) : dec.stacked_minus(l);
      const Mat fz = sign == 0 ? dec.stacked_plus(z) : dec.stacked_minus(z);
      const Mat lhs = (fl - f0).adjoint() * (fz - f0);
      const Mat rhs = fl.adjoint() * fz - f0.adjoint() * f0;
      rep.polarization = std::max(rep.polarization, op_norm(lhs - rhs));
    }
  }
  const Mat f0 = dec.stacked(origin);
  rep.semiunitarity = op_norm(f0.adjoint() * dec.j_m().matrix() * f0 - id);
  return rep;
}

double TransformReport::max() const { return std::max({plus, minus, sum, j_weighted}); }

TransformReport transform_identities(const AglerDecomposition& dec, const std::vector<Mat>& g,
                                     const std::vector<LambdaZ>& pairs) {
  check_tuple(g);
  TransformReport rep;
  const Point origin(dec.n, 0.0);
  const Mat fp0 = dec.stacked_plus(origin);
  const Mat fm0 = dec.stacked_minus(origin);
  const Mat f0 = dec.stacked(origin);
  const Mat jm = dec.j_m().matrix();

  // Row selections of zP F(z) belonging to M^+ and M^-.
  auto split = [&](const Mat& full, bool plus) {
    int rows = 0;
    for (int k = 0; k < dec.n; ++k) rows += plus ? dec.m_plus[k] : dec.m_minus[k];
    Mat out(rows, full.cols());
    int r = 0;
    for (int k = 0; k < dec.n; ++k) {
      const int take = plus ? dec.m_plus[k] : dec.m_minus[k];
      const int from = dec.offset(k) + (plus ? 0 : dec.m_plus[k]);
      out.middleRows(r, take) = full.middleRows(from, take);
      r += take;
    }
    return out;
  };

  for (const auto& [l, z] : pairs) {
    if (!dec.exact) {
      check_pair(l, dec.n, dec.radius);
      check_pair(z, dec.n, dec.radius);
    }
    const Mat gg = pencil(g, l).adjoint() * pencil(g, z);
    const Mat sl = dec.shifted(l), sz = dec.shifted(z);
    const Mat slp = split(sl, true), szp = split(sz, true);
    const Mat slm = split(sl, false), szm = split(sz, false);
    const Mat fpl = dec.stacked_plus(l) - fp0, fpz = dec.stacked_plus(z) - fp0;
    const Mat fml = dec.stacked_minus(l) - fm0, fmz = dec.stacked_minus(z) - fm0;

    const Mat plus_l = slp.adjoint() * szp;
    const Mat plus_r = fpl.adjoint() * fpz + gg;
    Mat minus_l = Mat::Zero(dec.cols, dec.cols), minus_r = Mat::Zero(dec.cols, dec.cols);
    if (fm0.rows()) {
      minus_l = slm.adjoint() * szm;
      minus_r = fml.adjoint() * fmz;
    }
    rep.plus = std::max(rep.plus, op_norm(plus_l - plus_r));
    rep.minus = std::max(rep.minus, op_norm(minus_l - minus_r));

    const Mat dl = dec.stacked(l) - f0, dz = dec.stacked(z) - f0;
    rep.sum = std::max(rep.sum, op_norm(sl.adjoint() * sz - (dl.adjoint() * dz + gg)));
    rep.j_weighted = std::max(rep.j_weighted,
                              op_norm(sl.adjoint() * jm * sz - (dl.adjoint() * jm * dz + gg)));
  }
  return rep;
}

std::vector<Mat> prop2_functions(const MultiparametricSystem& sys, const AglerDecomposition& dec,
                                 const Point& z) {
  if (dec.cols != sys.dx() + sys.du() || dec.n != sys.n())
    throw DimensionError("prop2_functions: decomposition does not match the system");
  Mat v(sys.dx() + sys.du(), sys.du());
  if (sys.dx() > 0) v.topRows(sys.dx()) = resolvent(sys, z) * linear_combination(z, sys.b());
  v.bottomRows(sys.du()) = Mat::Identity(sys.du(), sys.du());
  std::vector<Mat> h;
  for (int k = 0; k < dec.n; ++k) h.push_back(dec.f_k(k, z) * v);
  return h;
}

TransferKernelReport transfer_kernel_check(const MultiparametricSystem& sys, const AglerDecomposition& dec,
                        const std::vector<LambdaZ>& pairs) {
  TransferKernelReport rep;
  const Mat id = Mat::Identity(sys.du(), sys.du());
  const double rounding = 10.0 * kEps * coefficient_scale(dec);
  for (const auto& [l, z] : pairs) {
    if (!dec.exact) {
      check_pair(l, dec.n, dec.radius);
      check_pair(z, dec.n, dec.radius);
    }
    const auto hl = prop2_functions(sys, dec, l);
    const auto hz = prop2_functions(sys, dec, z);
    Mat rhs = Mat::Zero(sys.du(), sys.du());
    for (int k = 0; k < dec.n; ++k) {
      const int mp = dec.m_plus[k], mm = dec.m_minus[k];
      Mat term = hl[k].topRows(mp).adjoint() * hz[k].topRows(mp);
      if (mm) term -= hl[k].bottomRows(mm).adjoint() * hz[k].bottomRows(mm);
      rhs += (1.0 - std::conj(l[k]) * z[k]) * term;
    }
    const Mat lhs = id - eval_transfer(sys, l).adjoint() * eval_transfer(sys, z);
    rep.residual = std::max(rep.residual, op_norm(lhs - rhs));
    // ||v(z)||^2 = 1 + ||(I - zA)^{-1} zB||^2.
    auto vnorm = [&](const Point& p) {
      if (sys.dx() == 0) return 1.0;
      const double x = op_norm(resolvent(sys, p) * linear_combination(p, sys.b()));
      return std::sqrt(1.0 + x * x);
    };
    rep.bound = std::max(rep.bound, (dec.eta() + rounding) * vnorm(l) * vnorm(z));
  }
  return rep;
}

// ---------------------------------------------------------------------------

GramSearchResult gram_feasibility_search(const std::vector<Mat>& g, double epsilon, int degree,
                                         const GramSearchOptions& opts) {
  check_tuple(g);
  if (degree < 0) throw DimensionError("gram_feasibility_search: negative degree");
  const int n = static_cast<int>(g.size());
  const int n1 = static_cast<int>(g[0].cols());
  const auto mono = indices_up_to(n, degree);
  const auto big = indices_up_to(n, degree + 1);
  const int nm = static_cast<int>(mono.size());
  const int b = nm * n1;
  const long unknowns = static_cast<long>(n) * b * b;
  if (unknowns > 40000)
    throw DimensionError("gram_feasibility_search: problem too large for the dense solver");

  std::map<MultiIndex, int> mono_pos, big_pos;
  for (int i = 0; i < nm; ++i) mono_pos[mono[i]] = i;
  for (int i = 0; i < static_cast<int>(big.size()); ++i) big_pos[big[i]] = i;
  const int nb = static_cast<int>(big.size());

  // Constraint rows: block (s, t) entry (a, c) of Σ_k [S_k(s,t) - S_k(s-e_k, t-e_k)].
  const long rows = static_cast<long>(nb) * nb * n1 * n1;
  Mat a = Mat::Zero(rows, unknowns);
  Vec rhs = Vec::Zero(rows);
  auto unk = [&](int k, int i, int j) { return static_cast<long>(k) * b * b + static_cast<long>(j) * b + i; };
  auto row_of = [&](int bs, int bt, int ea, int ec) {
    return ((static_cast<long>(bs) * nb + bt) * n1 + ea) * n1 + ec;
  };
  for (int bs = 0; bs < nb; ++bs)
    for (int bt = 0; bt < nb; ++bt) {
      const auto& s = big[bs];
      const auto& t = big[bt];
      for (int k = 0; k < n; ++k) {
        auto add = [&](const MultiIndex& ss, const MultiIndex& tt, double sign) {
          auto is = mono_pos.find(ss), it = mono_pos.find(tt);
          if (is == mono_pos.end() || it == mono_pos.end()) return;
          for (int ea = 0; ea < n1; ++ea)
            for (int ec = 0; ec < n1; ++ec)
              a(row_of(bs, bt, ea, ec), unk(k, is->second * n1 + ea, it->second * n1 + ec)) += sign;
        };
        add(s, t, 1.0);
        if (s[k] > 0 && t[k] > 0) add(shifted(s, k, -1), shifted(t, k, -1), -1.0);
      }
      // Target coefficient: ε² I at (0,0), -G_j* G_k at (e_j, e_k).
      Mat target = Mat::Zero(n1, n1);
      if (level(s) == 0 && level(t) == 0) target = epsilon * epsilon * Mat::Identity(n1, n1);
      if (level(s) == 1 && level(t) == 1) {
        const int j = static_cast<int>(std::find(s.begin(), s.end(), 1) - s.begin());
        const int k = static_cast<int>(std::find(t.begin(), t.end(), 1) - t.begin());
        target = -g[j].adjoint() * g[k];
      }
      for (int ea = 0; ea < n1; ++ea)
        for (int ec = 0; ec < n1; ++ec) rhs(row_of(bs, bt, ea, ec)) = target(ea, ec);
    }

  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  auto project_affine = [&](const Vec& x) -> Vec { return x - cod.solve(a * x - rhs); };
  auto project_psd = [&](Vec x) {
    for (int k = 0; k < n; ++k) {
      Eigen::Map<Mat> sk(x.data() + static_cast<long>(k) * b * b, b, b);
      auto eig = hermitian_eigen(sk);
      Eigen::VectorXd v = eig.values.cwiseMax(0.0);
      sk = eig.vectors * v.asDiagonal() * eig.vectors.adjoint();
    }
    return x;
  };

  GramSearchResult res;
  Vec x = project_affine(Vec::Zero(unknowns));
  for (res.iterations = 1; res.iterations <= opts.max_iterations; ++res.iterations) {
    const Vec p = project_psd(x);
    res.residual = (a * p - rhs).norm();
    if (res.residual <= opts.tol) {
      x = p;
      res.converged = true;
      break;
    }
    x = project_affine(p);
  }
  if (!res.converged) {
    res.iterations = opts.max_iterations;
    x = project_psd(x);
  }
  for (int k = 0; k < n; ++k)
    res.grams.push_back(Eigen::Map<Mat>(x.data() + static_cast<long>(k) * b * b, b, b));
  return res;
}

}  // namespace jcs
