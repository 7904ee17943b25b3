#include <gtest/gtest.h>

#include "jcs/realize.hpp"
#include "jcs/transfer.hpp"
#include "support.hpp"

using namespace jcs;

namespace {

TruncatedOperatorSeries scalar_series(int n, int degree, const std::map<MultiIndex, cplx>& entries) {
  TruncatedOperatorSeries s(n, degree, 1, 1);
  for (const auto& [t, v] : entries) s.set(t, Mat::Constant(1, 1, v));
  return s;
}

TruncatedOperatorSeries random_series(int n, int d, int rows, int cols, Rng& rng, double scale = 0.3) {
  TruncatedOperatorSeries s(n, d, rows, cols);
  for (const auto& t : indices_up_to(n, d, 1)) s.set(t, scale * rng.complex_matrix(rows, cols));
  return s;
}

}  // namespace

TEST(ShiftRegister, CubeInOneVariable) {
  const auto theta = scalar_series(1, 3, {{{3}, 1.0}});
  const auto sys = shift_register_realization(theta, 3);
  EXPECT_EQ(sys.dx(), 2);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Point z = rng.polydisk_point(1, 0.9);
    EXPECT_LE(std::abs(eval_transfer(sys, z)(0, 0) - z[0] * z[0] * z[0]), 1e-14);
  }
}

TEST(ShiftRegister, StateSpaceLayout) {
  Rng rng(2);
  const auto theta = random_series(2, 4, 2, 3, rng);
  const auto sys = shift_register_realization(theta, 4);
  // One register of width dU per index with 1 <= |s| <= 3: 2 + 3 + 4 = 9 registers.
  EXPECT_EQ(sys.dx(), 9 * 3);
  EXPECT_EQ(sys.du(), 3);
  EXPECT_EQ(sys.dy(), 2);
  for (int k = 0; k < 2; ++k) EXPECT_EQ(sys.d(k), theta.coefficient(unit_index(2, k)));
}

TEST(ShiftRegister, LinearSolveOracle) {
  // For d <= 3 the read-out weights solve a small linear system: every coefficient
  // θ̂_t is a sum of multinomial(t) words, each contributing one read-out block.
  Rng rng(3);
  for (int n = 1; n <= 3; ++n)
    for (int d = 1; d <= 3; ++d) {
      const auto theta = random_series(n, d, 1, 2, rng);
      const auto sys = shift_register_realization(theta, d);
      const auto words = taylor_coefficients(sys, d, TaylorMethod::words);
      for (const auto& t : indices_up_to(n, d, 1)) {
        EXPECT_LE(op_norm(words.coefficient(t) - theta.coefficient(t)), 1e-14) << "n=" << n << " d=" << d;
        if (level(t) >= 2) {
          // Each word ending in register s = t - e_k reads θ̂_t / multinomial(t).
          for (int k = 0; k < n; ++k) {
            if (t[k] == 0) continue;
            const MultiIndex s = shifted(t, k, -1);
            int slot = 0;
            for (const auto& r : indices_up_to(n, d - 1, 1)) {
              if (r == s) break;
              ++slot;
            }
            const Mat read = sys.c(k).middleCols(slot * 2, 2);
            EXPECT_LE(op_norm(read * multinomial(t) - theta.coefficient(t)), 1e-14);
          }
        }
      }
    }
}

TEST(ShiftRegister, HigherCoefficientsVanish) {
  Rng rng(4);
  const auto theta = random_series(2, 4, 1, 1, rng);
  const auto sys = shift_register_realization(theta, 4);
  const auto s = taylor_coefficients(sys, 7, TaylorMethod::recursive);
  for (const auto& t : indices_up_to(2, 7, 5)) EXPECT_TRUE(s.coefficient(t).isZero(1e-15));
}

TEST(ShiftRegister, Preconditions) {
  EXPECT_THROW(shift_register_realization(scalar_series(1, 2, {{{0}, 1.0}}), 2), NumericalError);
  EXPECT_THROW(shift_register_realization(scalar_series(1, 4, {{{4}, 1.0}}), 3), DimensionError);
  EXPECT_THROW(shift_register_realization(scalar_series(3, 7, {{{1, 0, 0}, 1.0}}), 7), DimensionError);
  EXPECT_NO_THROW(shift_register_realization(scalar_series(3, 7, {{{1, 0, 0}, 1.0}}), 7, true));
  EXPECT_THROW(shift_register_realization(scalar_series(1, 2, {{{1}, 1.0}}), 0), DimensionError);
}

TEST(Realization, ProductOfVariables) {
  const auto theta = scalar_series(2, 2, {{{1, 1}, 1.0}});
  const auto res = jconservative_realization(theta, 2);
  EXPECT_TRUE(res.ok());
  EXPECT_LE(res.coefficient_residual, 1e-12);
  EXPECT_LE(res.sample_residual, 1e-5);
  EXPECT_LE(jconservativity_defect(res.system, res.j).max(), 1e-8);
  EXPECT_EQ(res.epsilon, 2.0);
}

TEST(Realization, ZeroFunction) {
  const auto theta = scalar_series(2, 3, {});
  const auto res = jconservative_realization(theta, 3);
  EXPECT_TRUE(res.ok());
  EXPECT_EQ(res.system.dx(), 0);
  Rng rng(5);
  for (const auto& z : test::polydisk_samples(2, 10, 0.5, rng)) EXPECT_TRUE(eval_transfer(res.system, z).isZero(0));
}

TEST(Realization, RectangularData) {
  Rng rng(6);
  const auto theta = random_series(1, 3, 2, 1, rng);
  const auto res = jconservative_realization(theta, 3);
  EXPECT_TRUE(res.ok()) << (res.failed.empty() ? "" : res.failed.front());
  EXPECT_EQ(res.system.du(), 2);
  EXPECT_EQ(res.system.dy(), 2);
  // Padded inputs must produce zero output.
  const auto coeffs = taylor_coefficients(res.system, 3, TaylorMethod::recursive);
  for (const auto& [t, c] : coeffs.coefficients()) {
    EXPECT_LE(op_norm(c.col(1)), 1e-12);
    EXPECT_LE(op_norm(c.col(0) - theta.coefficient(t)), 1e-12);
  }
}

TEST(Realization, ThrowsNamedStage) {
  const auto theta = scalar_series(1, 3, {{{1}, 1.0}, {{3}, 0.5}});
  RealizationOptions opt;
  opt.decomposition_degree = 2;
  opt.sample_tol = 1e-12;
  try {
    jconservative_realization(theta, 3, opt);
    FAIL() << "expected StageFailure";
  } catch (const StageFailure& e) {
    EXPECT_FALSE(e.stage().empty());
  }
  opt.throw_on_failure = false;
  EXPECT_FALSE(jconservative_realization(theta, 3, opt).ok());
}
