#pragma once

// Simulation of the multiparametric recursion along diagonals |t| = n of Z^N
// and the energy balance in the J-metric.

#include <map>
#include <vector>

#include "jcs/krein.hpp"
#include "jcs/multiindex.hpp"
#include "jcs/system.hpp"

namespace jcs {

/// Finitely supported map Z^N -> C^dim, stored per level.
class LatticeSignal {
public:
  using Level = std::map<MultiIndex, Vec>;

  LatticeSignal() = default;
  LatticeSignal(int n, int dim);

  int n() const noexcept { return n_; }
  int dim() const noexcept { return dim_; }

  void set(const MultiIndex& t, const Vec& v);
  /// Adds v to the entry at t (creating it if absent).
  void add(const MultiIndex& t, const Vec& v);
  /// Entry at t, or zero when t is not populated.
  Vec at(const MultiIndex& t) const;
  bool contains(const MultiIndex& t) const;

  /// Entries on level n in lexicographic order (empty when none).
  const Level& level(int n) const;
  void set_level(int n, Level entries);
  /// Populated level numbers, ascending.
  std::vector<int> levels() const;
  std::size_t size() const;

private:
  int n_ = 0;
  int dim_ = 0;
  std::map<int, Level> levels_;
};

/// One step of the recursion: x(t), y(t) for all |t| = n reachable from level n-1.
struct LevelStep {
  LatticeSignal::Level x;
  LatticeSignal::Level y;
};
LevelStep evolve_level(const MultiparametricSystem& sys, const LatticeSignal::Level& x_prev,
                       const LatticeSignal::Level& u_prev);

struct Trajectory {
  LatticeSignal x;  ///< levels 0..n_max
  LatticeSignal u;  ///< levels 0..n_max-1
  LatticeSignal y;  ///< levels 1..n_max
  int n_max = 0;
};

/// x0 must live on level 0; u may populate levels 0..n_max-1.
Trajectory simulate(const MultiparametricSystem& sys, const LatticeSignal& x0,
                    const LatticeSignal& u, int n_max);

struct LevelEnergy {
  int n = 0;
  double state = 0.0;   ///< Σ_{|t|=n} [x(t), x(t)]_J
  double input = 0.0;   ///< Σ_{|t|=n-1} ||u(t)||^2
  double output = 0.0;  ///< Σ_{|t|=n} ||y(t)||^2
  double residual = 0.0;
};

struct EnergyReport {
  std::vector<LevelEnergy> levels;  ///< index n = 0..n_max (level 0 has no residual)
  double max_residual = 0.0;
};

/// Per level n >= 1: |(E_x(n) - E_x(n-1)) - (E_u(n-1) - E_y(n))|.
EnergyReport energy_balance_report(const Trajectory& traj, const CanonicalSymmetry& j);

struct ImpulsePattern {
  LatticeSignal x0;
  LatticeSignal u;
};

/// x(0) = x0, u(0) = u0.
ImpulsePattern single_impulse(int n, const Vec& x0, const Vec& u0);
/// x, u equal (x1, u1) at t = e_k - e_j and (x2, u2) at t = 0 (k != j, 0-based).
ImpulsePattern pair_impulse(int n, const Vec& x1, const Vec& x2, const Vec& u1, const Vec& u2,
                            int k, int j);

/// Level-1 energy discrepancy of a pattern: E_x(1) - E_x(0) - E_u(0) + E_y(1).
double level_one_discrepancy(const MultiparametricSystem& sys, const CanonicalSymmetry& j,
                             const ImpulsePattern& p);

struct PatternReconstruction {
  Mat isometry_form;               ///< Σ G_k* J2 G_k - J1 from single patterns
  std::vector<std::vector<Mat>> cross;  ///< cross[j][k] = G_j* J2 G_k from pair patterns
  ConservativityDefects defects;   ///< r1, r2 from alpha; r3, r4 from alpha*
};

/// Recover the coefficient conditions purely from energy discrepancies of the
/// single and pair impulse patterns (polarization with the -i substitution).
PatternReconstruction reconstruct_from_patterns(const MultiparametricSystem& sys,
                                                const CanonicalSymmetry& j);

}  // namespace jcs
