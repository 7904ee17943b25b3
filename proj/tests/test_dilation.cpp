#include <gtest/gtest.h>

#include "jcs/dilation.hpp"
#include "jcs/transfer.hpp"
#include "support.hpp"

using namespace jcs;

namespace {

const char* const kExactStages[] = {"semiunitarity", "isometry", "extension", "conservativity",
                                    "torus", "lin-tf-feedthrough", "compression",
                                    "dilation-conservativity", "transfer-taylor"};

DilationOptions lenient() {
  DilationOptions opt;
  opt.tol = 1e-8;
  opt.truncation_tol = 1.0;
  opt.throw_on_failure = false;
  return opt;
}

}  // namespace

TEST(BuildU, PartialIsometry) {
  const auto g = system_operators(hyperbolic_example());
  const auto dec = construct_pencil_decomposition(g, 2.0, 8);
  const auto pu = build_U(dec, g);
  EXPECT_LE(pu.isometry_defect, 1e-10);
  EXPECT_LE(pu.lsq_residual, 1e-10);
  EXPECT_EQ(pu.max_degree, 8);
  const Mat b0 = pu.k0_basis;
  EXPECT_LE(op_norm(b0.adjoint() * dec.j_m().matrix() * b0 - pu.j0.matrix()), 1e-10);
  // K_0 is J-orthogonal to Ran F(0).
  EXPECT_LE(op_norm(b0.adjoint() * dec.j_m().matrix() * dec.stacked({0.0})), 1e-10);
}

TEST(Dilation, MatrixUnitExactDecomposition) {
  const auto sys = matrix_unit_example();
  const auto dec = conservative_decomposition(system_operators(sys));
  DilationOptions opt;
  opt.tol = 1e-12;
  const auto res = build_dilation(sys, dec, opt);
  EXPECT_TRUE(res.ok());
  EXPECT_EQ(res.j.negative(), 0);
  Rng rng(1);
  for (const auto& z : test::polydisk_samples(2, 100, 0.5, rng))
    EXPECT_LE(std::abs(eval_transfer(res.alpha_tilde, z)(0, 0) - z[1]), 1e-12);
}

TEST(Dilation, HyperbolicExactStages) {
  const auto sys = hyperbolic_example();
  const auto dec = construct_pencil_decomposition(system_operators(sys), 2.0, 10);
  const auto res = build_dilation(sys, dec, lenient());
  for (const char* stage : kExactStages) EXPECT_LE(res.defects.at(stage), 1e-8) << stage;
  // The state X sits last and the compression reproduces A, B, C, D.
  EXPECT_EQ(res.x_offset + sys.dx(), res.alpha_tilde.dx());
  EXPECT_EQ(res.k0_dim, dec.total_dim() - 2);
  EXPECT_EQ(res.aux_dim, 0);
}

TEST(Dilation, TaylorCoefficientsMatchToDegree) {
  const auto sys = hyperbolic_example();
  const int d = 8;
  const auto dec = construct_pencil_decomposition(system_operators(sys), 2.0, d);
  const auto res = build_dilation(sys, dec, lenient());
  const auto lhs = taylor_coefficients(res.alpha_tilde, d, TaylorMethod::recursive);
  const auto rhs = taylor_coefficients(sys, d, TaylorMethod::recursive);
  for (const auto& [t, c] : rhs.coefficients())
    EXPECT_LE(op_norm(lhs.coefficient(t) - c), 1e-9 * std::max(1.0, op_norm(c))) << test::index_string(t);
}

TEST(Dilation, TruncationErrorDecays) {
  const auto sys = hyperbolic_example();
  double prev = 0.0;
  for (int d : {6, 10, 14}) {
    const auto dec = construct_pencil_decomposition(system_operators(sys), 2.0, d);
    const double err = build_dilation(sys, dec, lenient()).defects.at("transfer-coincidence");
    if (d > 6) EXPECT_LT(err, prev / 4.0);
    prev = err;
  }
}

TEST(Dilation, RandomConservativeSystems) {
  for (int trial = 0; trial < 4; ++trial) {
    const int q = trial % 2;
    const auto j = CanonicalSymmetry::standard(2 - q, q);
    const auto sys = random_jconservative(1 + trial % 2, 2, 1, 900 + trial, j);
    const auto g = system_operators(sys);
    const auto dec = construct_pencil_decomposition(g, minimal_constructive_epsilon(g), 6);
    const auto res = build_dilation(sys, dec, lenient());
    for (const char* stage : kExactStages) EXPECT_LE(res.defects.at(stage), 1e-8) << stage << " trial " << trial;
  }
}

TEST(Dilation, PadsRectangularIo) {
  Rng rng(2);
  std::vector<Mat> a{0.2 * rng.complex_matrix(1, 1)}, b{0.2 * rng.complex_matrix(1, 1)},
      c{0.2 * rng.complex_matrix(2, 1)}, d{0.2 * rng.complex_matrix(2, 1)};
  const MultiparametricSystem sys(a, b, c, d);
  const auto padded = pad_io(sys);
  const auto g = system_operators(padded);
  const auto dec = construct_pencil_decomposition(g, minimal_constructive_epsilon(g), 6);
  const auto res = build_dilation(sys, dec, lenient());
  EXPECT_EQ(res.alpha_tilde.du(), 2);
  for (const char* stage : kExactStages) EXPECT_LE(res.defects.at(stage), 1e-8) << stage;
}

TEST(Dilation, RejectsMismatchedDecomposition) {
  const auto dec = construct_pencil_decomposition(system_operators(hyperbolic_example()), 2.0, 4);
  EXPECT_THROW(build_dilation(matrix_unit_example(), dec), DimensionError);
}

TEST(Dilation, StageFailureNamesStage) {
  const auto sys = hyperbolic_example();
  const auto dec = construct_pencil_decomposition(system_operators(sys), 2.0, 4);
  DilationOptions opt;
  opt.tol = 1e-8;
  try {
    build_dilation(sys, dec, opt);
    FAIL() << "expected StageFailure";
  } catch (const StageFailure& e) {
    EXPECT_EQ(e.stage(), "lin-tf");
    EXPECT_GT(e.residual(), e.tolerance());
  }
}

TEST(Dilation, NegativeControlWithoutExtension) {
  const auto sys = hyperbolic_example();
  const auto dec = construct_pencil_decomposition(system_operators(sys), 2.0, 8);
  auto opt = lenient();
  opt.skip_extension = true;
  const auto res = build_dilation(sys, dec, opt);
  EXPECT_FALSE(res.ok());
  EXPECT_GT(res.defects.at("conservativity"), 1e-3);
}

TEST(VerifyDilation, TrivialDilation) {
  const auto sys = hyperbolic_example();
  Rng rng(3);
  const auto rep = verify_dilation(sys, sys, CanonicalSymmetry::diagonal({-1}), test::polydisk_samples(1, 20, 0.5, rng), 0);
  EXPECT_EQ(rep.compression, 0.0);
  EXPECT_EQ(rep.transfer, 0.0);
  EXPECT_LE(rep.conservativity, 1e-15);
}
