// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "jcs/agler.hpp"
#include "jcs/dilation.hpp"
#include "jcs/lattice.hpp"
#include "jcs/realize.hpp"
#include "jcs/transfer.hpp"

using namespace jcs;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what, double value, double bound) {
    if (!ok) pass = false;
    detail << " " << what << "=" << fmt(value) << (ok ? "<=" : ">") << fmt(bound) << ";";
  }
  void at_most(const std::string& what, double value, double bound) { require(value <= bound, what, value, bound); }
  void at_least(const std::string& what, double value, double bound) {
    if (!(value >= bound)) pass = false;
    detail << " " << what << "=" << fmt(value) << (value >= bound ? ">=" : "<") << fmt(bound) << ";";
  }
  void fact(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << " " << what << (ok ? "" : " (violated)") << ";";
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
  }
};

std::vector<Point> polydisk(int n, int count, double r, Rng& rng) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.polydisk_point(n, r));
  return out;
}

std::vector<Point> torus(int n, int count, Rng& rng) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.torus_point(n));
  return out;
}

Vec unit_vector(int dim, Rng& rng) {
  const Vec v = rng.complex_vector(dim);
  return v / v.norm();
}

LatticeSignal random_inputs(int n, int dim, int levels, Rng& rng) {
  LatticeSignal u(n, dim);
  for (int lv = 0; lv < levels; ++lv)
    for (const auto& t : indices_of_degree(n, lv)) u.set(t, unit_vector(dim, rng));
  return u;
}

struct EnergyRun {
  double residual = 0.0;
  double scale = 0.0;  ///< largest per-level energy term
};

EnergyRun run_energy(const MultiparametricSystem& sys, const CanonicalSymmetry& j, const LatticeSignal& x0,
                     const LatticeSignal& u, int levels) {
  const auto e = energy_balance_report(simulate(sys, x0, u, levels), j);
  EnergyRun r{e.max_residual, 0.0};
  for (const auto& l : e.levels) r.scale = std::max({r.scale, std::abs(l.state), l.input, l.output});
  return r;
}

// Random finite-support run with unit-norm data: initial state at the origin and at
// e_1 - e_N, inputs on the first three levels of the nonnegative orthant.
EnergyRun random_energy_run(const MultiparametricSystem& sys, const CanonicalSymmetry& j, int levels, Rng& rng) {
  const int n = sys.n();
  LatticeSignal x0(n, sys.dx());
  x0.set(MultiIndex(n, 0), unit_vector(sys.dx(), rng));
  if (n >= 2) x0.set(shifted(unit_index(n, 0), n - 1, -1), unit_vector(sys.dx(), rng));
  return run_energy(sys, j, x0, random_inputs(n, sys.du(), std::min(levels, 3), rng), levels);
}

double impulse_energy_run(const MultiparametricSystem& sys, const CanonicalSymmetry& j, int levels) {
  double worst = 0.0;
  for (int c = 0; c < sys.du(); ++c) {
    const auto p = single_impulse(sys.n(), Vec::Zero(sys.dx()), Vec::Unit(sys.du(), c));
    worst = std::max(worst, run_energy(sys, j, p.x0, p.u, levels).residual);
  }
  return worst;
}

// -------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto sys = hyperbolic_example();
  const auto j = CanonicalSymmetry::diagonal({-1});
  o.at_most("defect", jconservativity_defect(sys, j).max(), 1e-12);
  Rng rng(101);
  double energy = 0.0;
  for (const auto& s : {sys, conjugate_system(sys)}) {
    energy = std::max(energy, impulse_energy_run(s, j, 20));
    energy = std::max(energy, random_energy_run(s, j, 20, rng).residual);
  }
  o.at_most("energy", energy, 1e-10);
  o.at_most("theta(1/2)-1", std::abs(eval_transfer(sys, {0.5})(0, 0) - 1.0), 1e-12);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto sys = matrix_unit_example();
  o.at_most("defect", jconservativity_defect(sys, CanonicalSymmetry::identity(1)).max(), 1e-12);
  Rng rng(102);
  double worst = 0.0;
  for (const auto& z : polydisk(2, 100, 1.0, rng)) worst = std::max(worst, std::abs(eval_transfer(sys, z)(0, 0) - z[1]));
  o.at_most("theta-z2", worst, 1e-12);
  const auto b = epsilon_bounds(system_operators(sys), torus(2, 100, rng));
  o.at_most("bounds-(1,2)", std::max(std::abs(b.lower - 1.0), std::abs(b.upper - 2.0)), 1e-10);
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(103);
  // Energies grow like ||G||^(2n) under indefinite J; the relative residual is reported alongside.
  const int levels = 6;
  double energy = 0.0, relative = 0.0;
  double worst_ratio = 1e300;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + rng.index(3);
    const int dx = 1 + rng.index(4);
    const int du = std::max(1 + rng.index(4 - std::min(dx, 3)), n - dx);
    const int q = rng.index(dx + 1);
    const auto j = CanonicalSymmetry::standard(dx - q, q);
    const auto sys = random_jconservative(n, dx, du, 1000 + trial, j);
    for (const auto& s : {sys, conjugate_system(sys)}) {
      const auto run = random_energy_run(s, j, levels, rng);
      energy = std::max(energy, run.residual);
      relative = std::max(relative, run.residual / std::max(1.0, run.scale));
    }

    // Perturb one operator by δE with ||E|| = 1 and recover the coefficient
    // conditions purely from impulse-pattern energy discrepancies.
    auto g = system_operators(sys);
    const int k = rng.index(n);
    Mat e = rng.complex_matrix(static_cast<int>(g[k].rows()), static_cast<int>(g[k].cols()));
    e /= op_norm(e);
    const double delta = std::pow(10.0, -1.0 - 3.0 * rng.uniform());
    g[k] += delta * e;
    const auto perturbed = MultiparametricSystem::from_operators(g, dx, du);
    const auto rec = reconstruct_from_patterns(perturbed, j);
    worst_ratio = std::min(worst_ratio, rec.defects.max() / delta);
  }
  o.at_most("energy", energy, 1e-10);
  o.detail << " relative-energy=" << Outcome::fmt(relative) << ";";
  o.at_least("detected/perturbation", worst_ratio, 0.1);
  return o;
}

Outcome criterion4() {
  Outcome o;
  Rng rng(104);
  for (const auto& [name, sys] : {std::pair{"hyperbolic", hyperbolic_example()}, std::pair{"matrix-unit", matrix_unit_example()}}) {
    const auto g = system_operators(sys);
    const double eps = minimal_constructive_epsilon(g);
    const auto pairs = random_pairs(sys.n(), 200, 0.5, rng);
    const auto dec = construct_pencil_decomposition(g, eps, 12, 0.5);
    const auto kc = verify_kernel_identity(g, dec, pairs);
    const double zero = derived_zero_identities(dec, pairs).max();
    const double transform = transform_identities(dec, g, pairs).max();
    const std::string p = std::string(name) + ".";
    o.at_most(p + "kernel", kc.residual, std::min(1e-6, kc.bound));
    o.at_most(p + "zero", zero, 1e-6);
    o.at_most(p + "transform", transform, std::min(1e-6, kc.bound));
    const auto doubled = construct_pencil_decomposition(g, eps, 24, 0.5);
    const double r24 = verify_kernel_identity(g, doubled, pairs).residual;
    o.at_least(p + "doubling-gain", kc.residual / std::max(r24, 1e-300), 8.0);
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const auto& [name, sys] : {std::pair{"hyperbolic", hyperbolic_example()}, std::pair{"matrix-unit", matrix_unit_example()}}) {
    const auto g = system_operators(sys);
    const auto dec = construct_pencil_decomposition(g, 2.0, 24, 0.5);
    DilationOptions opt;
    opt.tol = 1e-6;
    opt.samples = 100;
    opt.throw_on_failure = false;
    const auto res = build_dilation(sys, dec, opt);
    const std::string p = std::string(name) + ".";
    double worst = 0.0;
    for (const auto& [stage, v] : res.defects) worst = std::max(worst, v);
    o.at_most(p + "max-defect", worst, 1e-6);
    o.at_most(p + "compression", res.defects.at("compression"), 1e-12);
    o.at_most(p + "transfer", res.defects.at("transfer-coincidence"), 1e-6);
    o.at_most(p + "check-conservativity", res.defects.at("conservativity"), 1e-8);
  }
  // ε′ = 1 for the matrix-unit tuple: exact decomposition, plain conservative dilation.
  const auto mu = matrix_unit_example();
  DilationOptions opt;
  opt.tol = 1e-6;
  opt.throw_on_failure = false;
  const auto res = build_dilation(mu, conservative_decomposition(system_operators(mu)), opt);
  o.fact(res.ok(), "unit-scale dilation ok");
  o.fact(res.j.negative() == 0, "unit-scale J negative index 0");
  return o;
}

Outcome criterion6() {
  Outcome o;
  TruncatedOperatorSeries product(2, 2, 1, 1);
  product.set({1, 1}, Mat::Ones(1, 1));
  const auto hyperbolic = taylor_coefficients(hyperbolic_example(), 8, TaylorMethod::recursive);
  RealizationOptions opt;
  opt.decomposition_degree = 20;
  opt.throw_on_failure = false;
  for (const auto& [name, theta, d] : {std::tuple{"z1z2", product, 2}, std::tuple{"hyperbolic-8", hyperbolic, 8}}) {
    const auto res = jconservative_realization(theta, d, opt);
    const std::string p = std::string(name) + ".";
    o.at_most(p + "coefficients", res.coefficient_residual, 1e-12);
    o.at_most(p + "conservativity", jconservativity_defect(res.system, res.j).max(), 1e-8);
    o.at_most(p + "samples", res.sample_residual, 1e-5);
  }
  return o;
}

// Coefficients from samples on a torus of radius r: c_t = mean_j θ(r ω^j) ω^{-j·t} / r^{|t|}.
std::map<MultiIndex, Mat> grid_coefficients(const MultiparametricSystem& sys, int d, int m, double r) {
  const int n = sys.n();
  const auto targets = indices_up_to(n, d, 1);
  std::map<MultiIndex, Mat> acc;
  for (const auto& t : targets) acc[t] = Mat::Zero(sys.dy(), sys.du());
  std::vector<int> j(n, 0);
  const double two_pi = 2.0 * std::numbers::pi;
  long total = 1;
  for (int k = 0; k < n; ++k) total *= m;
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    Point z(n);
    for (int k = 0; k < n; ++k) {
      j[k] = static_cast<int>(rest % m);
      rest /= m;
      z[k] = std::polar(r, two_pi * j[k] / m);
    }
    const Mat th = eval_transfer(sys, z);
    for (const auto& t : targets) {
      long phase = 0;
      for (int k = 0; k < n; ++k) phase += static_cast<long>(j[k]) * t[k];
      acc[t] += std::polar(1.0, -two_pi * static_cast<double>(phase % m) / m) * th;
    }
  }
  for (auto& [t, c] : acc) c /= static_cast<double>(total) * std::pow(r, level(t));
  return acc;
}

Outcome criterion7() {
  Outcome o;
  Rng rng(107);
  double grid = 0.0, impulse = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const int dx = 1 + rng.index(4);
    const int du = std::max(1 + rng.index(std::max(1, 4 - dx)), n - dx);
    const int d = 1 + rng.index(5);
    const int q = rng.index(dx + 1);
    const auto j = CanonicalSymmetry::standard(dx - q, q);
    const auto sys = random_jconservative(n, dx, du, 2000 + trial, j);
    double rho = 0.0;
    for (const auto& g : system_operators(sys)) rho = std::max(rho, op_norm(g));
    const auto series = taylor_coefficients(sys, d, TaylorMethod::words);
    const auto sampled = grid_coefficients(sys, d, 64, 1.0 / (2.0 * n * rho));
    for (const auto& [t, c] : series.coefficients())
      grid = std::max(grid, op_norm(c - sampled.at(t)) / std::max(1.0, op_norm(c)));
    for (int col = 0; col < du; ++col) {
      const auto p = single_impulse(n, Vec::Zero(dx), Vec::Unit(du, col));
      const auto traj = simulate(sys, p.x0, p.u, d);
      for (const auto& t : indices_up_to(n, d, 1))
        impulse = std::max(impulse, (traj.y.at(t) - series.coefficient(t).col(col)).norm() /
                                        std::max(1.0, series.coefficient(t).col(col).norm()));
    }
  }
  o.at_most("grid", grid, 1e-9);
  o.at_most("impulse", impulse, 1e-10);
  return o;
}

Outcome criterion8() {
  Outcome o;
  Rng rng(108);
  double unitarity = 0.0, restriction = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + rng.index(6);
    const int q = rng.index(dim + 1);
    const auto j = CanonicalSymmetry::standard(dim - q, q);
    const Mat w = random_j_unitary(j, rng);
    const KreinSubspace dom(rng.complex_matrix(dim, 1 + rng.index(dim)), j);
    const auto ext = extend_j_isometry(dom, KreinSubspace(w * dom.basis(), j), w);
    unitarity = std::max(unitarity, ext.unitarity_defect);
    restriction = std::max(restriction, ext.restriction_defect);
  }
  o.at_most("unitarity", unitarity, 1e-10);
  o.at_most("restriction", restriction, 1e-10);

  // Signature mismatch: pads must equal the brute-force sign counts.
  int rejected = 0, correct = 0, cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> sm, si;
    const int dm = 1 + rng.index(5), di = 1 + rng.index(5);
    for (int i = 0; i < dm; ++i) sm.push_back(i == 0 || rng.index(2) ? 1 : -1);
    for (int i = 0; i < di; ++i) si.push_back(i == 0 || rng.index(2) ? 1 : -1);
    int pm = 0, qm = 0, pi = 0, qi = 0;
    for (int s : sm) (s > 0 ? pm : qm)++;
    for (int s : si) (s > 0 ? pi : qi)++;
    if (pm == pi && qm == qi) continue;
    ++cases;
    const auto jm = CanonicalSymmetry::diagonal(sm), ji = CanonicalSymmetry::diagonal(si);
    // U maps the first (positive) coordinate of M onto the first coordinate of K_I.
    Mat u = Mat::Zero(di, dm);
    u(0, 0) = 1.0;
    Mat e_m = Mat::Zero(dm, 1), e_i = Mat::Zero(di, 1);
    e_m(0, 0) = 1.0;
    e_i(0, 0) = 1.0;
    try {
      extend_j_isometry(KreinSubspace(e_m, jm), KreinSubspace(e_i, ji), u);
    } catch (const PaddingRequired& e) {
      ++rejected;
      if (e.domain_pad_positive() == std::max(0, pi - pm) && e.domain_pad_negative() == std::max(0, qi - qm) &&
          e.range_pad_positive() == std::max(0, pm - pi) && e.range_pad_negative() == std::max(0, qm - qi))
        ++correct;
    }
  }
  o.fact(cases > 0 && rejected == cases, "mismatches rejected " + std::to_string(rejected) + "/" + std::to_string(cases));
  o.fact(correct == cases, "pads correct " + std::to_string(correct) + "/" + std::to_string(cases));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 hyperbolic benchmark", criterion1},     {"2 matrix-unit benchmark", criterion2},
      {"3 energy balance equivalence", criterion3}, {"4 kernel certificate", criterion4},
      {"5 dilation pipeline", criterion5},        {"6 realization pipeline", criterion6},
      {"7 oracle equivalence", criterion7},       {"8 Krein extension", criterion8},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    bool pass = false;
    std::string detail;
    try {
      const Outcome o = fn();
      pass = o.pass;
      detail = o.detail.str();
    } catch (const std::exception& e) {
      detail = std::string(" error: ") + e.what();
    }
    if (!pass) ++failures;
    std::printf("criterion %s: %s%s\n", name, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
