#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"
#include "paraboloid/cli.hpp"
#include "paraboloid/plot.hpp"

namespace fs = std::filesystem;
using namespace paraboloid::cli;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("paraboloid_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

struct Invocation {
  int status;
  std::string out;
  std::string err;
};

Invocation invoke(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"paraboloid"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(Cli, ScalingFitReportsTheTheoremSlope) {
  TempDir dir;
  const auto r = invoke({"scaling-fit", "--n", "2", "--p", "1.8", "--N", "8,16,32,64,128", "--source", "box", "--out",
                         dir.path().string()});
  ASSERT_EQ(r.status, kExitPass) << r.err;
  const auto j = load_json(dir / "scaling-fit.json");
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["passed"].get<bool>());
  const auto& values = j["reports"][0]["values"];
  EXPECT_NEAR(values["slope"].get<double>(), -1.0 / 3.0, 0.15);
  EXPECT_NEAR(values["target"].get<double>(), -1.0 / 3.0, 1e-12);
  EXPECT_NE(slurp(dir / "scaling-fit.csv").find("n,N,p,source,value,target"), std::string::npos);
}

TEST(Cli, CoefficientCheckAgreesWithOracle) {
  TempDir dir;
  const auto r = invoke({"coeff-check", "--n", "2", "--N", "8", "--Q", "2", "--l", "0", "--seed", "1", "--out",
                         dir.path().string()});
  ASSERT_EQ(r.status, kExitPass) << r.out << r.err;
  EXPECT_NE(r.out.find("status: pass"), std::string::npos);
  const auto j = load_json(dir / "coeff-check.json");
  bool found = false;
  for (const auto& rep : j["reports"]) {
    if (rep["name"] != "coefficient_oracle") continue;
    found = true;
    EXPECT_EQ(rep["samples"], 50);
    EXPECT_LE(rep["constant"].get<double>(), 1e-8);
  }
  EXPECT_TRUE(found);
}

TEST(Cli, UnknownSubcommandIsUsageError) {
  const auto r = invoke({"frobnicate"});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UnknownFlagAndBadValuesAreUsageErrors) {
  TempDir dir;
  EXPECT_EQ(invoke({"norm-scan", "--bogus", "1"}).status, kExitUsage);
  EXPECT_EQ(invoke({"norm-scan", "--p", "2.5", "--out", dir.path().string()}).status, kExitUsage);
  EXPECT_EQ(invoke({"scaling-fit", "--N", "8,16,32", "--out", dir.path().string()}).status, kExitUsage);
  EXPECT_EQ(invoke({"gauss-check", "--N", "8", "--out", dir.path().string()}).status, kExitUsage);
  EXPECT_FALSE(fs::exists(dir / "scaling-fit.json"));
}

TEST(Cli, ExecutableReportsExitStatus) {
  TempDir dir;
  const std::string exe = PARABOLOID_EXE;
  const auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(exe + " frobnicate"), kExitUsage);
  EXPECT_EQ(status(exe + " separation-probe --N 4 --out " + dir.path().string()), kExitPass);
  EXPECT_EQ(status(exe + " --help"), kExitPass);
}

TEST(Cli, ParseExponentAcceptsFractions) {
  EXPECT_DOUBLE_EQ(parse_exponent("5/3"), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(parse_exponent("1.8"), 1.8);
  EXPECT_THROW(parse_exponent("1/0"), UsageError);
  EXPECT_THROW(parse_exponent("abc"), UsageError);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir dir;
  const auto cfg = dir / "run.toml";
  write_file(cfg, "experiment = \"scaling-fit\"\nn = 2\nN = [4, 8, 16, 32]\np = [2.0]\nsource = [\"delta\"]\n");
  std::ostringstream help;
  const std::vector<std::string> args{"paraboloid", "--config", cfg, "--p", "1.5"};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  const auto parsed = parse_args(static_cast<int>(argv.size()), argv.data(), help);
  ASSERT_TRUE(parsed.has_value());
  EXPECT_EQ(parsed->experiment, "scaling-fit");
  EXPECT_EQ(parsed->Ns, (std::vector<std::int64_t>{4, 8, 16, 32}));
  EXPECT_EQ(parsed->ps, (std::vector<double>{1.5}));
  EXPECT_EQ(parsed->sources, (std::vector<std::string>{"delta"}));

  const auto r = invoke({"--config", cfg, "--out", dir.path().string()});
  ASSERT_EQ(r.status, kExitPass) << r.err;
  const auto j = load_json(dir / "scaling-fit.json");
  EXPECT_NEAR(j["reports"][0]["values"]["slope"].get<double>(), -0.5, 0.05);
}

TEST(Cli, ConfigFileRejectsUnknownKeys) {
  TempDir dir;
  const auto cfg = dir / "bad.toml";
  write_file(cfg, "experiment = \"norm-scan\"\nwibble = 3\n");
  EXPECT_EQ(invoke({"--config", cfg, "--out", dir.path().string()}).status, kExitUsage);
}

TEST(Cli, ResolvedFillsDefaults) {
  RunConfig c;
  c.experiment = "norm-scan";
  const auto r = resolved(c);
  EXPECT_EQ(r.Ns, (std::vector<std::int64_t>{4, 8, 16, 32}));
  EXPECT_EQ(r.cutoff, "sharp");
  EXPECT_GT(r.iters, 0);
  RunConfig bad;
  bad.experiment = "no-such-thing";
  EXPECT_THROW(resolved(bad), UsageError);
}

TEST(Cli, OutputsAreDeterministicAcrossWorkerCounts) {
  TempDir a, b;
  ASSERT_EQ(invoke({"norm-scan", "--N", "4,8", "--iters", "300", "--workers", "1", "--out", a.path().string()}).status,
            kExitPass);
  ASSERT_EQ(invoke({"norm-scan", "--N", "4,8", "--iters", "300", "--workers", "3", "--out", b.path().string()}).status,
            kExitPass);
  EXPECT_EQ(slurp(a / "norm-scan.json"), slurp(b / "norm-scan.json"));
  EXPECT_EQ(slurp(a / "norm-scan.csv"), slurp(b / "norm-scan.csv"));
}

TEST(Cli, NoCsvNoJsonWritesNothing) {
  TempDir dir;
  ASSERT_EQ(invoke({"separation-probe", "--no-csv", "--no-json", "--out", dir.path().string()}).status, kExitPass);
  EXPECT_TRUE(fs::is_empty(dir.path()));
}

TEST(Plot, LogLogHasSeriesAndDashedReference) {
  TempDir dir;
  const auto csv = dir / "fit.csv";
  write_file(csv,
             "n,N,p,source,value,target\n"
             "2,8,1.8,box,0.35,-0.3333\n2,16,1.8,box,0.28,-0.3333\n"
             "2,32,1.8,box,0.22,-0.3333\n2,64,1.8,box,0.175,-0.3333\n");
  const auto r = invoke({"plot", "--csv", csv, "--kind", "loglog"});
  ASSERT_EQ(r.status, kExitPass) << r.err;
  const auto svg = slurp(dir / "fit.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Plot, SameCsvGivesIdenticalSvg) {
  TempDir dir;
  const auto csv = dir / "fit.csv";
  write_file(csv, "x,y\n1,2\n2,3.5\n3,1\n");
  ASSERT_EQ(invoke({"plot", "--csv", csv, "--kind", "profile", "--svg", dir / "a.svg"}).status, kExitPass);
  ASSERT_EQ(invoke({"plot", "--csv", csv, "--kind", "profile", "--svg", dir / "b.svg"}).status, kExitPass);
  EXPECT_FALSE(slurp(dir / "a.svg").empty());
  EXPECT_EQ(slurp(dir / "a.svg"), slurp(dir / "b.svg"));
}

TEST(Plot, EmptyCsvFailsWithoutWriting) {
  TempDir dir;
  const auto csv = dir / "empty.csv";
  write_file(csv, "n,N,p,source,value,target\n");
  const auto r = invoke({"plot", "--csv", csv});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_FALSE(fs::exists(dir / "empty.svg"));
}

TEST(Plot, ReadCsvRejectsRaggedRows) {
  TempDir dir;
  write_file(dir / "ragged.csv", "a,b\n1,2\n3\n");
  EXPECT_ANY_THROW(read_csv(dir / "ragged.csv"));
  write_file(dir / "ok.csv", "a,b\n1,2\n3,4\n");
  const auto t = read_csv(dir / "ok.csv");
  EXPECT_EQ(t.column("b"), 1);
  EXPECT_EQ(t.rows.size(), 2u);
}

TEST(Plot, LogLogNeedsItsColumns) {
  CsvTable t;
  t.header = {"x", "y"};
  t.rows = {{"1", "2"}, {"2", "4"}};
  EXPECT_ANY_THROW(render_plot(t, PlotKind::loglog));
  EXPECT_NO_THROW(render_plot(t, PlotKind::profile));
}
