#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "jcs/io.hpp"
#include "jcs/transfer.hpp"
#include "support.hpp"

using namespace jcs;

namespace {

bool bit_equal(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a.data()[i].real() != b.data()[i].real() || a.data()[i].imag() != b.data()[i].imag()) return false;
  return true;
}

}  // namespace

TEST(Io, SystemRoundTripIsBitIdentical) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto j = CanonicalSymmetry::standard(2, 1);
    auto sys = random_jconservative(2, 3, 1, seed, j);
    sys.name = "random";
    const std::string text = io::write_system({sys, j, seed});
    const auto back = io::read_system(text);
    ASSERT_TRUE(back.j.has_value());
    ASSERT_TRUE(back.seed.has_value());
    EXPECT_EQ(*back.seed, seed);
    EXPECT_EQ(back.system.name, "random");
    EXPECT_TRUE(bit_equal(back.j->matrix(), j.matrix()));
    const auto g = system_operators(sys), gb = system_operators(back.system);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_TRUE(bit_equal(g[k], gb[k]));
    EXPECT_EQ(io::write_system(back), text);
  }
}

TEST(Io, SystemWithoutOptionalFields) {
  const auto back = io::read_system(io::write_system({matrix_unit_example(), std::nullopt, std::nullopt}));
  EXPECT_FALSE(back.j.has_value());
  EXPECT_FALSE(back.seed.has_value());
}

TEST(Io, AcceptsPlainRealEntries) {
  const std::string text = R"({"format":"jcs-system","version":"v1","N":1,"dims":{"x":1,"u":1,"y":1},
    "A":[[[1.25]]],"B":[[[0.75]]],"C":[[[0.75]]],"D":[[[1.25]]],"J":[[-1]]})";
  const auto b = io::read_system(text);
  EXPECT_NEAR(std::abs(eval_transfer(b.system, {0.5})(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_EQ(b.j->negative(), 1);
}

TEST(Io, RejectsMalformedBundles) {
  EXPECT_THROW(io::read_system("{"), io::FormatError);
  EXPECT_THROW(io::read_system(R"({"format":"jcs-series","version":"v1"})"), io::FormatError);
  EXPECT_THROW(io::read_system(R"({"format":"jcs-system","version":"v2"})"), io::FormatError);
  EXPECT_THROW(io::read_system(R"({"format":"jcs-system","version":"v1","N":1,"dims":{"x":1,"u":1,"y":1},
    "A":[[[1,0],[2,0]]],"B":[[[0.75]]],"C":[[[0.75]]],"D":[[[1.25]]]})"),
               io::FormatError);
  EXPECT_THROW(io::read_system(R"({"format":"jcs-system","version":"v1","N":1,"dims":{"x":1,"u":1,"y":1},
    "A":[[["a",0]]],"B":[[[0.75]]],"C":[[[0.75]]],"D":[[[1.25]]]})"),
               io::FormatError);
}

TEST(Io, SeriesRoundTrip) {
  const auto s = taylor_coefficients(random_jconservative(2, 2, 1, 3, CanonicalSymmetry::identity(2)), 4);
  const std::string text = io::write_series(s);
  const auto back = io::read_series(text);
  EXPECT_EQ(back.n(), 2);
  EXPECT_EQ(back.degree(), 4);
  EXPECT_EQ(back.tail.kind, SeriesTail::Kind::geometric);
  EXPECT_EQ(back.tail.rho, s.tail.rho);
  for (const auto& [t, c] : s.coefficients()) EXPECT_TRUE(bit_equal(back.coefficient(t), c));
  EXPECT_EQ(io::write_series(back), text);
}

TEST(Io, SeriesEntryLayout) {
  TruncatedOperatorSeries s(2, 2, 1, 1);
  s.set({1, 1}, Mat::Constant(1, 1, cplx(0.5, -2)));
  const auto j = nlohmann::json::parse(io::write_series(s));
  const auto& entry = j.at("coefficients").at(0);
  EXPECT_EQ(entry.at(0), nlohmann::json({1, 1}));
  EXPECT_EQ(entry.at(1), nlohmann::json({{0.5}}));
  EXPECT_EQ(entry.at(2), nlohmann::json({{-2.0}}));
}

TEST(Io, DecompositionRoundTrip) {
  const auto g = system_operators(matrix_unit_example());
  const auto dec = construct_pencil_decomposition(g, 2.0, 5);
  const auto back = io::read_decomposition(io::write_decomposition(dec));
  EXPECT_EQ(back.m_plus, dec.m_plus);
  EXPECT_EQ(back.m_minus, dec.m_minus);
  EXPECT_EQ(back.eta_constant, dec.eta_constant);
  EXPECT_EQ(back.radius, dec.radius);
  Rng rng(1);
  const Point z = rng.polydisk_point(2, 0.5);
  EXPECT_TRUE(bit_equal(back.stacked(z), dec.stacked(z)));
}

TEST(Io, DilationRoundTrip) {
  const auto sys = matrix_unit_example();
  DilationOptions opt;
  opt.tol = 1e-12;
  const auto res = build_dilation(sys, conservative_decomposition(system_operators(sys)), opt);
  const auto bundle = io::to_bundle(res);
  const auto back = io::read_dilation(io::write_dilation(bundle));
  EXPECT_EQ(back.x_offset, res.x_offset);
  EXPECT_EQ(back.k0_dim, res.k0_dim);
  EXPECT_EQ(back.defects, res.defects);
  EXPECT_EQ(back.failed, res.failed);
  ASSERT_TRUE(back.dilation.j.has_value());
  EXPECT_TRUE(bit_equal(back.dilation.j->matrix(), res.j.matrix()));
  const auto g = system_operators(res.alpha_tilde), gb = system_operators(back.dilation.system);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_TRUE(bit_equal(g[k], gb[k]));
}

TEST(Io, Files) {
  const auto path = std::filesystem::temp_directory_path() / "jcs_io_test.json";
  io::write_file(path.string(), "hello\n");
  EXPECT_EQ(io::read_file(path.string()), "hello\n");
  std::filesystem::remove(path);
  EXPECT_THROW(io::read_file((std::filesystem::temp_directory_path() / "jcs_missing" / "x.json").string()),
               io::FormatError);
}
