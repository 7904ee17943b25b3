#include "jcs/realize.hpp"

#include <algorithm>
#include <sstream>

#include "jcs/agler.hpp"
#include "jcs/transfer.hpp"

namespace jcs {

namespace {

bool is_zero(const Mat& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

/// theta placed in the leading corner of a dY' x dU' block of zeros.
Mat pad_corner(const Mat& m, int rows, int cols) {
  Mat out = Mat::Zero(rows, cols);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

void record(RealizationResult& res, const std::string& stage, double value, double tol) {
  res.defects[stage] = value;
  res.tolerances[stage] = tol;
  if (!(value <= tol)) res.failed.push_back(stage);
}

}  // namespace

MultiparametricSystem shift_register_realization(const TruncatedOperatorSeries& theta, int d,
                                                 bool allow_large_degree) {
  const int n = theta.n();
  const int du = theta.cols();
  const int dy = theta.rows();
  if (d < 1) throw DimensionError("shift_register_realization: degree must be at least 1");
  if (n >= 3 && d > kRealizeDegreeCapManyVariables && !allow_large_degree) {
    std::ostringstream os;
    os << "shift_register_realization: degree " << d << " exceeds the cap "
       << kRealizeDegreeCapManyVariables << " for N >= 3 (pass allow_large_degree to override)";
    throw DimensionError(os.str());
  }
  for (const auto& [t, c] : theta.coefficients()) {
    if (level(t) == 0 && !is_zero(c))
      throw NumericalError("shift_register_realization: theta does not vanish at 0");
    if (level(t) > d && !is_zero(c)) {
      std::ostringstream os;
      os << "shift_register_realization: theta has a nonzero coefficient of degree " << level(t)
         << " above d = " << d;
      throw DimensionError(os.str());
    }
  }

  const auto registers = indices_up_to(n, d - 1, 1);
  std::map<MultiIndex, int> slot;
  for (std::size_t i = 0; i < registers.size(); ++i) slot[registers[i]] = static_cast<int>(i) * du;
  const int dx = static_cast<int>(registers.size()) * du;

  std::vector<Mat> a(n, Mat::Zero(dx, dx)), b(n, Mat::Zero(dx, du)), c(n, Mat::Zero(dy, dx)),
      dd(n, Mat::Zero(dy, du));
  const Mat id = Mat::Identity(du, du);
  for (int k = 0; k < n; ++k) {
    const MultiIndex ek = unit_index(n, k);
    dd[k] = theta.coefficient(ek);
    if (d >= 2) b[k].middleRows(slot.at(ek), du) = id;
    for (const auto& s : registers) {
      const MultiIndex t = shifted(s, k);
      if (level(t) <= d - 1) a[k].block(slot.at(t), slot.at(s), du, du) = id;
      if (level(t) <= theta.degree())
        c[k].middleCols(slot.at(s), du) = theta.coefficient(t) / multinomial(t);
    }
  }
  return MultiparametricSystem(std::move(a), std::move(b), std::move(c), std::move(dd));
}

RealizationResult jconservative_realization(const TruncatedOperatorSeries& theta, int d,
                                            const RealizationOptions& options) {
  RealizationResult res;
  res.degree = d;
  res.shift_register = shift_register_realization(theta, d, options.allow_large_degree);
  res.shift_register.name = "shift-register";
  const int n = theta.n();
  const int dy = theta.rows();
  const int du = theta.cols();

  bool trivial = true;
  for (const auto& [t, c] : theta.coefficients())
    if (!is_zero(c)) trivial = false;
  if (trivial) {
    res.system = MultiparametricSystem::zero(n, 0, du, dy);
    res.system.name = "zero";
    res.j = CanonicalSymmetry::identity(0);
    res.epsilon = 0.0;
  } else {
    const auto padded = pad_io(res.shift_register);
    const auto g = system_operators(padded);
    Rng rng(options.seed);
    std::vector<Point> torus;
    for (int i = 0; i < options.samples; ++i) torus.push_back(rng.torus_point(n));
    res.epsilon_bounds = epsilon_bounds(g, torus);
    res.epsilon = options.epsilon > 0.0 ? options.epsilon : minimal_constructive_epsilon(g);
    const auto dec =
        construct_pencil_decomposition(g, res.epsilon, options.decomposition_degree, options.radius);

    DilationOptions dopt;
    dopt.tol = options.tol;
    dopt.truncation_tol = options.sample_tol;
    dopt.samples = options.samples;
    dopt.seed = options.seed;
    dopt.throw_on_failure = false;
    auto dil = build_dilation(res.shift_register, dec, dopt);
    res.defects = dil.defects;
    res.failed = dil.failed;
    for (const auto& [stage, _] : dil.defects) res.tolerances[stage] = dil.tolerance(stage);
    res.system = std::move(dil.alpha_tilde);
    res.system.name = "realization";
    res.j = dil.j;
    res.conservativity = jconservativity_defect(res.system, res.j).max();
    record(res, "realization-conservativity", res.conservativity, options.tol);
  }

  const int py = res.system.dy();
  const int pu = res.system.du();
  const auto tc = taylor_coefficients(res.system, d, TaylorMethod::recursive);
  for (const auto& t : indices_up_to(n, d, 1)) {
    const Mat want = pad_corner(theta.coefficient(t), py, pu);
    const double r = op_norm(tc.coefficient(t) - want);
    res.coefficient_residuals[t] = r;
    res.coefficient_residual = std::max(res.coefficient_residual, r / std::max(1.0, op_norm(want)));
  }
  record(res, "coefficient-match", res.coefficient_residual, options.coefficient_tol);

  Rng rng(options.seed ^ 0x5bd1e995ULL);
  for (int i = 0; i < options.samples; ++i) {
    const Point z = rng.polydisk_point(n, options.radius);
    const Mat want = pad_corner(eval_series(theta, z).value, py, pu);
    res.sample_residual = std::max(res.sample_residual, op_norm(eval_transfer(res.system, z) - want));
  }
  record(res, "sample-match", res.sample_residual, options.sample_tol);

  if (options.throw_on_failure && !res.failed.empty()) {
    const auto& stage = res.failed.front();
    throw StageFailure(stage, res.defects.at(stage), res.tolerances.at(stage));
  }
  return res;
}

}  // namespace jcs
