#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "tpk/cli.hpp"
#include "tpk/error.hpp"
#include "tpk/io.hpp"

using namespace tpk;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = parse_and_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tpk_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

double value_after(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string k;
  double v;
  while (in >> k) {
    if (k == key && in >> v) return v;
  }
  return NAN;
}

}  // namespace

TEST(Json, CurveRoundTrip) {
  ClosedCurve t = make_primitive(TorusKnot{}, 64, 3);
  ClosedCurve back = curve_from_json(curve_to_json(t));
  EXPECT_EQ(back.samples(), t.samples());
  EXPECT_EQ(back.rule(), DerivativeRule::spectral);
  Points sq(4, 2);
  sq << 0, 0, 1, 0, 1, 1, 0, 1;
  ClosedCurve poly = make_primitive(Polygon{sq}, 40);
  ClosedCurve pback = curve_from_json(curve_to_json(poly));
  EXPECT_EQ(pback.rule(), DerivativeRule::central_difference);
  EXPECT_EQ(pback.samples(), poly.samples());
}

TEST(Json, MalformedInput) {
  EXPECT_THROW(curve_from_json("not json"), DomainError);
  EXPECT_THROW(curve_from_json(R"({"dim": 2})"), DomainError);
  EXPECT_THROW(curve_from_json(R"({"dim": 2, "samples": [[0, 0], [1]]})"), DomainError);
  EXPECT_THROW(curve_from_json(R"({"dim": 2, "samples": [[0,0],[1,0],[1,1]], "derivative_rule": "bogus"})"),
               DomainError);
  EXPECT_THROW(read_curve("/nonexistent/curve.json"), DomainError);
}

TEST(Csv, TraceRoundTrip) {
  std::vector<TraceRow> rows{{0, 30.041912582417402, 1.0, 856.5, -36.6, 0.07, 1.5707963267948966, 0.0},
                             {1, 1.0 / 3.0, 0.9999999999999999, 1e-300, 2.5e-17, 0.1, 2.0, 0.01}};
  std::string text = trace_to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), "iter,energy,length,grad_norm,lambda,min_dist,bilip,step");
  std::vector<TraceRow> back = trace_from_csv(text);
  ASSERT_EQ(back.size(), 2u);
  for (size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].iter, rows[k].iter);
    EXPECT_EQ(back[k].energy, rows[k].energy);
    EXPECT_EQ(back[k].length, rows[k].length);
    EXPECT_EQ(back[k].grad_norm, rows[k].grad_norm);
    EXPECT_EQ(back[k].lambda, rows[k].lambda);
    EXPECT_EQ(back[k].bilip, rows[k].bilip);
    EXPECT_EQ(back[k].step, rows[k].step);
  }
}

TEST(Csv, TableRoundTrip) {
  Table t{{"k", "value"}, {{1.0, 0.1}, {2.0, -1.0 / 7.0}, {3.0, 6.02214076e23}}};
  Table back = table_from_csv(table_to_csv(t));
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_THROW(table_from_csv("a,b\n1,x\n"), DomainError);
}

TEST(Config, TextRoundTrip) {
  RunConfig c;
  c.command = "flow";
  c.p = 4.25;
  c.q = 2.0;
  c.nodes = 128;
  c.seed = 18446744073709551615ull;
  c.out = "a b/c.json";
  c.threads = 3;
  c.options = {{"--steps", "200"}, {"--precondition", "true"}};
  EXPECT_EQ(RunConfig::from_text(c.to_text()), c);
  EXPECT_THROW(RunConfig::from_text("{}"), DomainError);
}

TEST_F(TempDir, CircleEnergyThroughFiles) {
  std::string curve = path("c.json");
  ASSERT_EQ(cli({"make-curve", "circle", "--n", "1024", "--out", curve}).code, 0);
  CliRun r = cli({"energy", "--curve", curve, "--p", "4", "--q", "2", "--unit-length"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(value_after(r.out, "energy") / (oracle::pi * oracle::pi), 1.0, 1e-2);
  EXPECT_NE(r.out.find("regime critical"), std::string::npos);
  // critical p = q + 2 is scale invariant, so the flag does not matter here
  CliRun raw = cli({"energy", "--curve", curve, "--p", "4", "--q", "2"});
  EXPECT_NEAR(value_after(raw.out, "energy") / value_after(r.out, "energy"), 1.0, 1e-12);
}

TEST_F(TempDir, EnergyStudyAndRichardson) {
  std::string curve = path("c.json");
  ASSERT_EQ(cli({"make-curve", "circle", "--n", "256", "--out", curve}).code, 0);
  CliRun r = cli({"energy", "--curve", curve, "--richardson", "--terms", "2", "--study"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n,energy,difference"), std::string::npos);
  EXPECT_NEAR(value_after(r.out, "energy") / oracle::circle_energy(1.0, 4.5, 2.0), 1.0, 1e-3);
}

TEST_F(TempDir, NonRepulsiveWarning) {
  std::string curve = path("c.json");
  ASSERT_EQ(cli({"make-curve", "ellipse", "--n", "64", "--out", curve}).code, 0);
  CliRun r = cli({"energy", "--curve", curve, "--p", "3", "--q", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("non-repulsive regime"), std::string::npos);
  EXPECT_TRUE(std::isfinite(value_after(r.out, "energy")));
}

TEST(Cli, ExitCodes) {
  CliRun r = cli({"spectrum", "--p", "5.5", "--kmax", "8"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--p"), std::string::npos);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"energy"}).code, 2);
  EXPECT_EQ(cli({"energy", "--curve", "/nonexistent.json"}).code, 2);
  EXPECT_EQ(cli({"make-curve", "circle", "--n", "abc"}).code, 2);
  EXPECT_EQ(cli({"make-curve", "torus-knot", "--wind-a", "2", "--wind-b", "4"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(TempDir, SelfIntersectionExitsThree) {
  std::string curve = path("eight.json");
  Points x = make_primitive(FigureEight{0.1}, 64, 3).samples();
  x.col(2).setZero();
  write_curve(ClosedCurve(x), curve);
  CliRun r = cli({"energy", "--curve", curve});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("samples 16, 48"), std::string::npos);
}

TEST(Cli, SpectrumCsv) {
  CliRun r = cli({"spectrum", "--p", "4.5", "--kmax", "8", "--lambda", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  Table t = table_from_csv(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"k", "rho_k", "rho_k_over_k_pow", "rho_tilde_k"}));
  ASSERT_EQ(t.rows.size(), 9u);
  EXPECT_EQ(t.rows[0][1], 0.0);
  EXPECT_NEAR(t.rows[1][1] / 996.26059798008434, 1.0, 1e-12);
  EXPECT_NEAR(t.rows[2][3], 2.0 * t.rows[2][1] + std::pow(4.0 * oracle::pi, 2), 1e-9);
}

TEST_F(TempDir, GradientCheckAndAnalyze) {
  std::string curve = path("t.json");
  ASSERT_EQ(cli({"make-curve", "torus-knot", "--n", "96", "--out", curve}).code, 0);
  CliRun g = cli({"gradient-check", "--curve", curve, "--trials", "3", "--seed", "5"});
  EXPECT_EQ(g.code, 0) << g.err;
  Table rows = table_from_csv(g.out);
  ASSERT_EQ(rows.rows.size(), 3u);
  for (const auto& row : rows.rows) EXPECT_LT(row[3], 1e-4);

  for (std::string kind : {"bilip", "holder", "seminorm"}) {
    CliRun a = cli({"analyze", kind, "--curve", curve});
    EXPECT_EQ(a.code, 0) << kind << a.err;
    EXPECT_EQ(table_from_csv(a.out).rows.size(), 1u);
  }
  std::string out = path("beta.csv");
  CliRun b = cli({"analyze", "beta", "--curve", curve, "--radii", "0.5", "1.0", "--out", out});
  EXPECT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(table_from_csv(read_text(out)).rows.size(), 2u);
}

TEST_F(TempDir, FlowWritesTraceAndSnapshots) {
  std::string curve = path("p.json"), trace = path("trace.csv"), fin = path("final.json"), snaps = path("snaps");
  ASSERT_EQ(cli({"make-curve", "perturbed-circle", "--n", "64", "--out", curve}).code, 0);
  CliRun r = cli({"flow", "--curve", curve, "--steps", "6", "--precondition", "--trace", trace, "--snapshot-every", "3",
               "--snap-dir", snaps, "--out", fin});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<TraceRow> rows = trace_from_csv(read_text(trace));
  EXPECT_GE(rows.size(), 2u);
  for (size_t k = 1; k < rows.size(); ++k) EXPECT_LE(rows[k].energy, rows[k - 1].energy);
  EXPECT_NEAR(read_curve(fin).length(), 1.0, 1e-8);
  if (rows.back().iter >= 3) { EXPECT_TRUE(fs::exists(fs::path(snaps) / "step_000003.json")); }
}

TEST_F(TempDir, PairEnergyAndConfig) {
  std::string a = path("a.json"), b = path("b.json"), cfg = path("cfg.json");
  ASSERT_EQ(cli({"make-curve", "circle", "--n", "64", "--out", a}).code, 0);
  ASSERT_EQ(cli({"make-curve", "circle", "--n", "64", "--radius", "0.5", "--out", b}).code, 0);
  CliRun ab = cli({"--save-config", cfg, "pair-energy", "--curve-a", a, "--curve-b", b});
  CliRun ba = cli({"pair-energy", "--curve-a", b, "--curve-b", a});
  ASSERT_EQ(ab.code, 0) << ab.err;
  EXPECT_NEAR(value_after(ab.out, "total") / value_after(ba.out, "total"), 1.0, 1e-12);
  RunConfig saved = RunConfig::from_text(read_text(cfg));
  EXPECT_EQ(saved.command, "pair-energy");
  EXPECT_EQ(RunConfig::from_text(saved.to_text()), saved);
}

TEST_F(TempDir, BinaryExitCodesAndDeterminism) {
  const std::string exe = TPK_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((exe + " spectrum --p 5.5 --kmax 8 2>/dev/null").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((exe + " 2>/dev/null >/dev/null").c_str())), 2);
  std::string a = path("a.csv"), b = path("b.csv");
  ASSERT_EQ(WEXITSTATUS(std::system((exe + " --threads 1 spectrum --kmax 16 --out " + a).c_str())), 0);
  ASSERT_EQ(WEXITSTATUS(std::system((exe + " --threads 4 spectrum --kmax 16 --out " + b).c_str())), 0);
  EXPECT_EQ(read_text(a), read_text(b));
}
