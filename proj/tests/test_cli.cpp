#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "jcs/io.hpp"

using namespace jcs;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("jcs_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    hyperbolic_ = path("hyperbolic.json");
    io::write_file(hyperbolic_, io::write_system({hyperbolic_example(), CanonicalSymmetry::diagonal({-1}), std::nullopt}));
    matrix_unit_ = path("matrix_unit.json");
    io::write_file(matrix_unit_, io::write_system({matrix_unit_example(), CanonicalSymmetry::identity(1), std::nullopt}));
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::string hyperbolic_, matrix_unit_;
};

}  // namespace

TEST_F(CliTest, CheckHyperbolic) {
  const auto r = run({"check", hyperbolic_, "--json"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  for (const auto& c : j.at("checks")) EXPECT_LE(c.at("residual").get<double>(), 1e-14);
  EXPECT_EQ(j.at("status"), "ok");
}

TEST_F(CliTest, CheckReportsFailingStage) {
  const auto plain = path("plain.json");
  io::write_file(plain, io::write_system({hyperbolic_example(), std::nullopt, std::nullopt}));
  const auto r = run({"check", plain});
  EXPECT_EQ(r.code, cli::kResidualFailure);
  EXPECT_NE(r.err.find("stage 'r1' failed"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateMatrixUnit) {
  const auto r = run({"simulate", matrix_unit_, "--levels", "10", "--json"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("data").at("energy").size(), 11u);
  for (const auto& row : j.at("data").at("energy")) EXPECT_LE(row.at("residual").get<double>(), 1e-14);
}

TEST_F(CliTest, SimulateRandomAndConjugate) {
  EXPECT_EQ(run({"simulate", hyperbolic_, "--input", "random", "--levels", "20", "--conjugate"}).code, cli::kOk);
  EXPECT_EQ(run({"simulate", hyperbolic_, "--input", "noise"}).code, cli::kParseError);
}

TEST_F(CliTest, TransferAtHalf) {
  const auto r = run({"transfer", hyperbolic_, "--at", "0.5"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("[1.0]"), std::string::npos) << r.out;
}

TEST_F(CliTest, TransferComplexPoint) {
  const auto r = run({"transfer", matrix_unit_, "--at", "0.2,0.3-0.1i"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("[0.3-0.1i]"), std::string::npos) << r.out;
  EXPECT_EQ(run({"transfer", matrix_unit_, "--at", "0.2,0.3,0.1"}).code, cli::kParseError);
  EXPECT_EQ(run({"transfer", matrix_unit_, "--at", "x"}).code, cli::kParseError);
  EXPECT_EQ(run({"transfer", matrix_unit_, "--at", "1,0"}).code, cli::kResidualFailure);
}

TEST_F(CliTest, TransferSeriesFile) {
  const auto out = path("series.json");
  const auto r = run({"transfer", hyperbolic_, "--degree", "5", "--out", out});
  EXPECT_EQ(r.code, cli::kOk);
  const auto s = io::read_series(io::read_file(out));
  EXPECT_EQ(s.degree(), 5);
  EXPECT_EQ(s.coefficient({2})(0, 0), cplx(9.0 / 16.0));
}

TEST_F(CliTest, JsonIsDeterministic) {
  const auto a = run({"decompose", matrix_unit_, "--json", "--seed", "3"});
  const auto b = run({"decompose", matrix_unit_, "--json", "--seed", "3"});
  EXPECT_EQ(a.code, cli::kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, ParseErrors) {
  EXPECT_EQ(run({}).code, cli::kParseError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kParseError);
  EXPECT_EQ(run({"check", hyperbolic_, "--bogus"}).code, cli::kParseError);
  EXPECT_EQ(run({"check", path("missing.json")}).code, cli::kParseError);
  const auto bad = path("bad.json");
  io::write_file(bad, "{\"format\": \"jcs-system\"");
  EXPECT_EQ(run({"check", bad}).code, cli::kParseError);
  EXPECT_EQ(run({"check", hyperbolic_, "--stage-tol", "r1"}).code, cli::kParseError);
  EXPECT_EQ(run({"check", hyperbolic_, "--radius", "2"}).code, cli::kParseError);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, StageOverride) {
  const auto r = run({"check", hyperbolic_, "--stage-tol", "torus=-1"});
  EXPECT_EQ(r.code, cli::kResidualFailure);
  EXPECT_NE(r.err.find("'torus'"), std::string::npos);
}

TEST_F(CliTest, GenThenCheck) {
  const auto out = path("gen.json");
  EXPECT_EQ(run({"gen", "--n", "3", "--dx", "3", "--du", "2", "--negative", "1", "--seed", "5", "--out", out}).code,
            cli::kOk);
  const auto b = io::read_system(io::read_file(out));
  EXPECT_EQ(b.j->negative(), 1);
  EXPECT_EQ(*b.seed, 5u);
  EXPECT_EQ(run({"check", out}).code, cli::kOk);
  EXPECT_EQ(run({"gen", "--dx", "2", "--negative", "3"}).code, cli::kParseError);
}

TEST_F(CliTest, DecomposeExact) {
  const auto out = path("dec.json");
  const auto r = run({"decompose", matrix_unit_, "--exact", "--out", out});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(io::read_decomposition(io::read_file(out)).exact);
}

TEST_F(CliTest, DilateAndVerify) {
  const auto out = path("dil.json");
  const auto r = run({"dilate", hyperbolic_, "--degree", "24", "--out", out});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  const auto v = run({"verify-dilation", hyperbolic_, out});
  EXPECT_EQ(v.code, cli::kOk) << v.err;
  EXPECT_EQ(run({"verify-dilation", hyperbolic_}).code, cli::kParseError);
}

TEST_F(CliTest, DilateFailsAtLowDegree) {
  const auto r = run({"dilate", hyperbolic_, "--degree", "6"});
  EXPECT_EQ(r.code, cli::kResidualFailure);
  EXPECT_NE(r.err.find("transfer-coincidence"), std::string::npos) << r.err;
}

TEST_F(CliTest, DilateWithDecompositionFile) {
  const auto dec = path("dec.json");
  ASSERT_EQ(run({"decompose", matrix_unit_, "--exact", "--out", dec}).code, cli::kOk);
  const auto r = run({"dilate", matrix_unit_, "--decomposition", dec, "--json"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("info").at("dilation J signature").at(1), 0);
}

TEST_F(CliTest, RealizeProduct) {
  TruncatedOperatorSeries theta(2, 2, 1, 1);
  theta.set({1, 1}, Mat::Ones(1, 1));
  const auto series = path("z1z2.json");
  io::write_file(series, io::write_series(theta));
  const auto out = path("real.json");
  const auto r = run({"realize", series, "--out", out});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(run({"check", out}).code, cli::kOk);
}
