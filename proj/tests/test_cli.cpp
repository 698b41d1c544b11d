#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"

namespace fs = std::filesystem;
using testing_support::fixture_path;

namespace {

struct Run {
  int         code = -1;
  std::string out;  // stdout and stderr
};

Run run(std::string const& args) {
  auto  cmd  = std::string(RELGROWTH_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  Run   r;
  if (!pipe) {
    return r;
  }
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, pipe)) {
    r.out.append(buf, n);
  }
  int status = pclose(pipe);
  r.code     = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(fs::path const& p) {
  std::ifstream      in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    auto const* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path()
          / (std::string("relgrowth_cli_") + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override {
    fs::remove_all(dir);
  }

  std::string out(std::string const& sub = "") const {
    return " --out-dir " + (dir / sub).string();
  }
  static std::string input(std::string const& name) {
    return " --input " + fixture_path(name);
  }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, ValidateExitCodes) {
  EXPECT_EQ(run("validate" + input("f2.aut") + out()).code, 0);
  auto two = run("validate" + input("two_max_connected.aut") + out());
  EXPECT_EQ(two.code, 1);
  EXPECT_NE(two.out.find("witness: u2 v1"), std::string::npos) << two.out;
  auto hom = run("validate" + input("missing_hom.aut") + out());
  EXPECT_EQ(hom.code, 1);
  EXPECT_NE(hom.out.find("homomorphism incomplete"), std::string::npos);
  EXPECT_EQ(run("validate" + input("edge_into_star.aut") + out()).code, 1);
  EXPECT_TRUE(fs::exists(dir / "validation.txt"));
}

TEST_F(Cli, ConfigErrors) {
  EXPECT_EQ(run("count" + out()).code, 1);
  EXPECT_EQ(run("count --group f4" + out()).code, 1);
  EXPECT_EQ(run("count --group f2 --n-max 3" + out()).code, 1);
  EXPECT_EQ(run("scan --group f2 --grid 4" + out()).code, 1);
  EXPECT_EQ(run("count --group f2 --hom \"a:1\"" + out()).code, 1);
}

TEST_F(Cli, AnalyzeFreeGroup) {
  auto r = run("analyze" + input("f2.aut") + out());
  ASSERT_EQ(r.code, 0) << r.out;
  auto json = slurp(dir / "analysis.json");
  EXPECT_NE(json.find("\"1/2\""), std::string::npos);
  EXPECT_NE(json.find("\"lcm\": 2"), std::string::npos);
  EXPECT_NE(json.find("\"cross_check\": \"PASS\""), std::string::npos);

  auto one = run("analyze" + input("f2_nu1.aut") + out());
  EXPECT_EQ(one.code, 0);
  EXPECT_NE(one.out.find("D = 1"), std::string::npos);
}

TEST_F(Cli, AnalyzeZeroWeightFails) {
  EXPECT_NE(run("analyze" + input("zero_weight.aut") + out()).code, 0);
}

TEST_F(Cli, CountRows) {
  ASSERT_EQ(run("count --group f2 --n-max 12" + out()).code, 0);
  auto csv = slurp(dir / "count.csv");
  EXPECT_NE(csv.find("\n0,1,1,1\n"), std::string::npos);
  EXPECT_NE(csv.find("\n4,108,8,0.0740740740741\n"), std::string::npos);
  EXPECT_NE(csv.find("\n5,324,0,0\n"), std::string::npos);

  ASSERT_EQ(run("count --group f2 --n-max 4 --target 1,0" + out("t")).code, 0);
  EXPECT_NE(slurp(dir / "t" / "count.csv").find("\n1,4,0,0,1\n"),
            std::string::npos);
}

TEST_F(Cli, BudgetGivesPartialOutput) {
  auto r = run("count --group f2 --n-max 100 --table-budget 5000" + out());
  EXPECT_EQ(r.code, 2);
  auto csv = slurp(dir / "count.csv");
  EXPECT_NE(csv.find("\n15,19131876,0,0\n"), std::string::npos);
  EXPECT_EQ(run("oracle --group f2 --n-max 14 --word-budget 1000" + out()).code, 2);
}

TEST_F(Cli, ConfigFileFlagsWin) {
  {
    std::ofstream cfg(dir / "run.toml");
    cfg << "group = \"f2\"\nn-max = 30\nhom = \"a:1;b:0\"\n";
  }
  auto cfg = " --config " + (dir / "run.toml").string();
  ASSERT_EQ(run("count" + cfg + " --n-max 8" + out("c")).code, 0);
  auto csv = slurp(dir / "c" / "count.csv");
  EXPECT_NE(csv.find("\n8,8748,1206,"), std::string::npos);
  EXPECT_EQ(csv.find("\n9,"), std::string::npos);
}

TEST_F(Cli, OutputsAreDeterministic) {
  for (auto const& sub : {"x", "y"}) {
    ASSERT_EQ(run("count --group f2 --n-max 30 --table" + out(sub)).code, 0);
    ASSERT_EQ(run("scan --group f2 --grid 8 --samples 50 --seed 7" + out(sub)).code, 0);
    ASSERT_EQ(run("fourier --group f2 --n-max 10" + out(sub)).code, 0);
  }
  for (auto const& f : {"count.csv", "count_table.csv", "scan.csv", "scan.json",
                        "fourier.csv"}) {
    auto a = slurp(dir / "x" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(dir / "y" / f)) << f;
  }
  for (auto const& e : fs::directory_iterator(dir / "x")) {
    EXPECT_NE(e.path().extension(), ".tmp");
  }
}

TEST_F(Cli, SubcommandsOnFreeGroup) {
  EXPECT_EQ(run("oracle --group f2 --n-max 8" + out()).code, 0);
  EXPECT_TRUE(fs::exists(dir / "oracle.csv"));
  EXPECT_EQ(run("rationality --group f2 --n-max 60" + out()).code, 0);
  EXPECT_EQ(run("fourier --group f2 --n-max 6 --grid 8" + out()).code, 1);
  auto fit = run("fit --group f2 --n-max 100 --window 40:100" + out());
  EXPECT_EQ(fit.code, 0) << fit.out;
  EXPECT_TRUE(fs::exists(dir / "fit.dat"));
}

TEST_F(Cli, TruncatedReportSkipsFit) {
  auto r = run("report --group f2 --n-max 20" + out());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("SKIPPED  asymptotic fit"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("warning:"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
}

TEST_F(Cli, FullReportPasses) {
  auto r = run("report --group f2 --n-max 160" + out());
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS  totals rational control"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("SKIPPED"), std::string::npos) << r.out;
}
