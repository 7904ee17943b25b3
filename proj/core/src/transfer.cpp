#include "jcs/transfer.hpp"

#include <algorithm>
#include <sstream>

namespace jcs {

namespace {

std::string describe(const Point& z) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (k) os << ", ";
    os << z[k].real();
    if (z[k].imag() != 0.0) os << (z[k].imag() < 0 ? "-" : "+") << std::abs(z[k].imag()) << "i";
  }
  os << ")";
  return os.str();
}

void check_point(const MultiparametricSystem& sys, const Point& z) {
  if (static_cast<int>(z.size()) != sys.n()) {
    std::ostringstream os;
    os << "point has " << z.size() << " coordinates, system has N = " << sys.n();
    throw DimensionError(os.str());
  }
}

/// LU of I - zA with a condition check.
Eigen::PartialPivLU<Mat> factor(const MultiparametricSystem& sys, const Point& z) {
  const int n = sys.dx();
  const Mat m = Mat::Identity(n, n) - linear_combination(z, sys.a());
  Eigen::PartialPivLU<Mat> lu(m);
  const double rc = lu.rcond();
  if (!(rc * kResolventConditionLimit > 1.0)) {
    std::ostringstream os;
    os << "resolvent singular at z = " << describe(z) << " (reciprocal condition " << rc << ")";
    throw NumericalError(os.str());
  }
  return lu;
}

}  // namespace

Mat resolvent(const MultiparametricSystem& sys, const Point& z) {
  check_point(sys, z);
  if (sys.dx() == 0) return Mat(0, 0);
  return factor(sys, z).inverse();
}

Mat eval_transfer(const MultiparametricSystem& sys, const Point& z) {
  check_point(sys, z);
  Mat theta = linear_combination(z, sys.d());
  if (sys.dx() == 0) return theta;
  const Mat zb = linear_combination(z, sys.b());
  theta += linear_combination(z, sys.c()) * factor(sys, z).solve(zb);
  return theta;
}

TruncatedOperatorSeries taylor_coefficients(const MultiparametricSystem& sys, int d,
                                            TaylorMethod method, bool allow_large_degree) {
  if (d < 1) throw DimensionError("taylor_coefficients: degree must be at least 1");
  if (method == TaylorMethod::words && d > kWordDegreeCap && !allow_large_degree) {
    std::ostringstream os;
    os << "taylor_coefficients: word enumeration capped at degree " << kWordDegreeCap
       << " (requested " << d << ")";
    throw DimensionError(os.str());
  }
  const int n = sys.n();
  TruncatedOperatorSeries out(n, d, sys.dy(), sys.du());
  for (const auto& t : indices_up_to(n, d, 1)) out.set(t, Mat::Zero(sys.dy(), sys.du()));
  for (int k = 0; k < n; ++k) out.set(unit_index(n, k), sys.d(k));

  if (sys.dx() > 0 && d >= 2) {
    if (method == TaylorMethod::words) {
      // Depth-first over words k0 k1 ... k_{m-1}; prefix = C_{k0} A_{k1} ... A_{k_j}.
      std::map<MultiIndex, Mat> acc;
      MultiIndex counts(n, 0);
      auto dfs = [&](auto&& self, const Mat& prefix, int remaining) -> void {
        for (int k = 0; k < n; ++k) {
          ++counts[k];
          Mat closed = prefix * sys.b(k);
          auto it = acc.find(counts);
          if (it == acc.end())
            acc.emplace(counts, std::move(closed));
          else
            it->second += closed;
          if (remaining > 1) self(self, prefix * sys.a(k), remaining - 1);
          --counts[k];
        }
      };
      for (int k0 = 0; k0 < n; ++k0) {
        ++counts[k0];
        dfs(dfs, sys.c(k0), d - 1);
        --counts[k0];
      }
      for (auto& [t, m] : acc) out.set(t, m);
    } else {
      std::map<MultiIndex, Mat> p;  // coefficients of (I - zA)^{-1} zB
      for (int k = 0; k < n; ++k) p[unit_index(n, k)] = sys.b(k);
      for (int m = 2; m < d; ++m)
        for (const auto& t : indices_of_degree(n, m)) {
          Mat acc = Mat::Zero(sys.dx(), sys.du());
          for (int k = 0; k < n; ++k)
            if (t[k] > 0) acc += sys.a(k) * p.at(shifted(t, k, -1));
          p[t] = std::move(acc);
        }
      for (int m = 2; m <= d; ++m)
        for (const auto& t : indices_of_degree(n, m)) {
          Mat acc = Mat::Zero(sys.dy(), sys.du());
          for (int k = 0; k < n; ++k)
            if (t[k] > 0) acc += sys.c(k) * p.at(shifted(t, k, -1));
          out.set(t, acc);
        }
    }
  }

  out.tail.kind = SeriesTail::Kind::geometric;
  out.tail.magnitude = 1.0;
  out.tail.rho.resize(n);
  for (int k = 0; k < n; ++k)
    out.tail.rho[k] =
        std::max({op_norm(sys.a(k)), op_norm(sys.b(k)), op_norm(sys.c(k)), op_norm(sys.d(k))});
  return out;
}

ZTransformResiduals z_transform_check(const MultiparametricSystem& sys,
                                      const TruncatedOperatorSeries& u_hat,
                                      const std::vector<Point>& samples) {
  if (u_hat.rows() != sys.du() || u_hat.n() != sys.n())
    throw DimensionError("z_transform_check: input series does not match the system");
  ZTransformResiduals r;
  for (const auto& z : samples) {
    check_point(sys, z);
    const Mat u = eval_series(u_hat, z).value;
    const Mat za = linear_combination(z, sys.a());
    const Mat zbu = linear_combination(z, sys.b()) * u;
    Mat x = Mat::Zero(sys.dx(), u.cols());
    if (sys.dx() > 0) x = factor(sys, z).solve(zbu);
    const Mat y = eval_transfer(sys, z) * u;
    r.state = std::max(r.state, op_norm(x - za * x - zbu));
    r.output = std::max(r.output, op_norm(y - linear_combination(z, sys.c()) * x -
                                              linear_combination(z, sys.d()) * u));
  }
  return r;
}

}  // namespace jcs
