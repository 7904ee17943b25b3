#include "jcs/lattice.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace jcs {

LatticeSignal::LatticeSignal(int n, int dim) : n_(n), dim_(dim) {
  if (n < 1) throw DimensionError("LatticeSignal: N must be at least 1");
  if (dim < 0) throw DimensionError("LatticeSignal: negative vector dimension");
}

void LatticeSignal::set(const MultiIndex& t, const Vec& v) {
  if (static_cast<int>(t.size()) != n_ || v.size() != dim_) {
    std::ostringstream os;
    os << "LatticeSignal::set: expected index of length " << n_ << " and vector of size " << dim_;
    throw DimensionError(os.str());
  }
  levels_[jcs::level(t)][t] = v;
}

void LatticeSignal::add(const MultiIndex& t, const Vec& v) {
  if (!contains(t)) {
    set(t, v);
    return;
  }
  levels_[jcs::level(t)][t] += v;
}

Vec LatticeSignal::at(const MultiIndex& t) const {
  auto lv = levels_.find(jcs::level(t));
  if (lv != levels_.end()) {
    auto it = lv->second.find(t);
    if (it != lv->second.end()) return it->second;
  }
  return Vec::Zero(dim_);
}

bool LatticeSignal::contains(const MultiIndex& t) const {
  auto lv = levels_.find(jcs::level(t));
  return lv != levels_.end() && lv->second.count(t) > 0;
}

const LatticeSignal::Level& LatticeSignal::level(int n) const {
  static const Level empty;
  auto it = levels_.find(n);
  return it == levels_.end() ? empty : it->second;
}

void LatticeSignal::set_level(int n, Level entries) {
  for (const auto& [t, v] : entries)
    if (jcs::level(t) != n || static_cast<int>(t.size()) != n_ || v.size() != dim_)
      throw DimensionError("LatticeSignal::set_level: entry inconsistent with level or dimensions");
  if (entries.empty())
    levels_.erase(n);
  else
    levels_[n] = std::move(entries);
}

std::vector<int> LatticeSignal::levels() const {
  std::vector<int> out;
  for (const auto& [n, _] : levels_) out.push_back(n);
  return out;
}

std::size_t LatticeSignal::size() const {
  std::size_t s = 0;
  for (const auto& [_, lv] : levels_) s += lv.size();
  return s;
}

LevelStep evolve_level(const MultiparametricSystem& sys, const LatticeSignal::Level& x_prev,
                       const LatticeSignal::Level& u_prev) {
  const int n = sys.n();
  std::set<MultiIndex> targets;
  for (const auto* lv : {&x_prev, &u_prev})
    for (const auto& [t, _] : *lv) {
      if (static_cast<int>(t.size()) != n) throw DimensionError("evolve_level: index length differs from N");
      for (int k = 0; k < n; ++k) targets.insert(shifted(t, k));
    }
  for (const auto& [_, v] : x_prev)
    if (v.size() != sys.dx()) throw DimensionError("evolve_level: state vector has wrong size");
  for (const auto& [_, v] : u_prev)
    if (v.size() != sys.du()) throw DimensionError("evolve_level: input vector has wrong size");

  LevelStep out;
  for (const auto& t : targets) {
    Vec x = Vec::Zero(sys.dx());
    Vec y = Vec::Zero(sys.dy());
    for (int k = 0; k < n; ++k) {
      const MultiIndex s = shifted(t, k, -1);
      if (auto it = x_prev.find(s); it != x_prev.end()) {
        x += sys.a(k) * it->second;
        y += sys.c(k) * it->second;
      }
      if (auto it = u_prev.find(s); it != u_prev.end()) {
        x += sys.b(k) * it->second;
        y += sys.d(k) * it->second;
      }
    }
    out.x.emplace(t, std::move(x));
    out.y.emplace(t, std::move(y));
  }
  return out;
}

Trajectory simulate(const MultiparametricSystem& sys, const LatticeSignal& x0,
                    const LatticeSignal& u, int n_max) {
  if (n_max < 0) throw DimensionError("simulate: n_max must be nonnegative");
  if (x0.n() != sys.n() || u.n() != sys.n()) throw DimensionError("simulate: signal N differs from system N");
  if (x0.dim() != sys.dx() || u.dim() != sys.du())
    throw DimensionError("simulate: signal dimensions do not match the system");
  for (int lv : x0.levels())
    if (lv != 0) throw DimensionError("simulate: initial state must live on level 0");
  for (int lv : u.levels())
    if (lv < 0 || lv >= std::max(n_max, 1))
      throw DimensionError("simulate: input populated outside levels 0..n_max-1");

  Trajectory tr{LatticeSignal(sys.n(), sys.dx()), LatticeSignal(sys.n(), sys.du()),
                LatticeSignal(sys.n(), sys.dy()), n_max};
  tr.x.set_level(0, x0.level(0));
  for (int lv = 0; lv < n_max; ++lv) tr.u.set_level(lv, u.level(lv));
  for (int lv = 1; lv <= n_max; ++lv) {
    auto step = evolve_level(sys, tr.x.level(lv - 1), tr.u.level(lv - 1));
    tr.x.set_level(lv, std::move(step.x));
    tr.y.set_level(lv, std::move(step.y));
  }
  return tr;
}

EnergyReport energy_balance_report(const Trajectory& traj, const CanonicalSymmetry& j) {
  if (j.dim() != traj.x.dim()) throw DimensionError("energy_balance_report: J does not match the state space");
  EnergyReport rep;
  rep.levels.resize(traj.n_max + 1);
  for (int n = 0; n <= traj.n_max; ++n) {
    auto& e = rep.levels[n];
    e.n = n;
    for (const auto& [_, x] : traj.x.level(n)) e.state += j.quadratic(x);
    if (n == 0) continue;
    for (const auto& [_, u] : traj.u.level(n - 1)) e.input += u.squaredNorm();
    for (const auto& [_, y] : traj.y.level(n)) e.output += y.squaredNorm();
    e.residual = std::abs((e.state - rep.levels[n - 1].state) - (e.input - e.output));
    rep.max_residual = std::max(rep.max_residual, e.residual);
  }
  return rep;
}

ImpulsePattern single_impulse(int n, const Vec& x0, const Vec& u0) {
  ImpulsePattern p{LatticeSignal(n, static_cast<int>(x0.size())),
                   LatticeSignal(n, static_cast<int>(u0.size()))};
  const MultiIndex origin(n, 0);
  p.x0.set(origin, x0);
  p.u.set(origin, u0);
  return p;
}

ImpulsePattern pair_impulse(int n, const Vec& x1, const Vec& x2, const Vec& u1, const Vec& u2,
                            int k, int j) {
  if (k == j) throw DimensionError("pair_impulse: k and j must differ");
  if (k < 0 || j < 0 || k >= n || j >= n) throw DimensionError("pair_impulse: index out of range");
  ImpulsePattern p{LatticeSignal(n, static_cast<int>(x1.size())),
                   LatticeSignal(n, static_cast<int>(u1.size()))};
  MultiIndex t(n, 0);
  t[k] += 1;
  t[j] -= 1;
  const MultiIndex origin(n, 0);
  p.x0.set(t, x1);
  p.x0.set(origin, x2);
  p.u.set(t, u1);
  p.u.set(origin, u2);
  return p;
}

double level_one_discrepancy(const MultiparametricSystem& sys, const CanonicalSymmetry& j,
                             const ImpulsePattern& p) {
  auto rep = energy_balance_report(simulate(sys, p.x0, p.u, 1), j);
  const auto& e = rep.levels[1];
  return (e.state - rep.levels[0].state) - e.input + e.output;
}

namespace {

struct Splitter {
  int dx;
  int du;
  Vec x(const Vec& v) const { return v.head(dx); }
  Vec u(const Vec& v) const { return v.tail(du); }
};

Mat polarize_single(const MultiparametricSystem& sys, const CanonicalSymmetry& j) {
  const int m = sys.dx() + sys.du();
  const Splitter sp{sys.dx(), sys.du()};
  auto q = [&](const Vec& v) {
    return level_one_discrepancy(sys, j, single_impulse(sys.n(), sp.x(v), sp.u(v)));
  };
  const Mat id = Mat::Identity(m, m);
  Mat out = Mat::Zero(m, m);
  for (int a = 0; a < m; ++a) out(a, a) = q(id.col(a));
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const double base = out(a, a).real() + out(b, b).real();
      const double re = 0.5 * (q(id.col(a) + id.col(b)) - base);
      // v* M v with v = e_a + i e_b picks up -2 Im M_ab.
      const double im = -0.5 * (q(id.col(a) + cplx(0, 1) * id.col(b)) - base);
      out(a, b) = cplx(re, im);
      out(b, a) = std::conj(out(a, b));
    }
  return out;
}

Mat polarize_pair(const MultiparametricSystem& sys, const CanonicalSymmetry& j, int jj, int kk) {
  const int m = sys.dx() + sys.du();
  const Splitter sp{sys.dx(), sys.du()};
  const Mat id = Mat::Identity(m, m);
  auto single = [&](const Vec& v) {
    return level_one_discrepancy(sys, j, single_impulse(sys.n(), sp.x(v), sp.u(v)));
  };
  std::vector<double> base(m);
  for (int a = 0; a < m; ++a) base[a] = single(id.col(a));
  Mat out(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      auto cross = [&](const Vec& v2) {
        const Vec v1 = id.col(a);
        const auto p = pair_impulse(sys.n(), sp.x(v1), sp.x(v2), sp.u(v1), sp.u(v2), kk, jj);
        return 0.5 * (level_one_discrepancy(sys, j, p) - base[a] - single(v2));
      };
      const double re = cross(id.col(b));
      const double im = cross(cplx(0, -1) * id.col(b));
      out(a, b) = cplx(re, im);
    }
  return out;
}

}  // namespace

PatternReconstruction reconstruct_from_patterns(const MultiparametricSystem& sys,
                                                const CanonicalSymmetry& j) {
  if (j.dim() != sys.dx()) throw DimensionError("reconstruct_from_patterns: J does not match the state space");
  PatternReconstruction rec;
  const int n = sys.n();
  const auto dual = conjugate_system(sys);

  rec.isometry_form = polarize_single(sys, j);
  rec.defects.r1 = hermitian_norm(rec.isometry_form);
  rec.defects.r3 = hermitian_norm(polarize_single(dual, j));

  rec.cross.assign(n, std::vector<Mat>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      rec.cross[a][b] = polarize_pair(sys, j, a, b);
      rec.defects.r2 = std::max(rec.defects.r2, op_norm(rec.cross[a][b]));
      rec.defects.r4 = std::max(rec.defects.r4, op_norm(polarize_pair(dual, j, a, b)));
    }
  return rec;
}

}  // namespace jcs
