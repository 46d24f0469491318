#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"
#include "dnsasm/ingest.hpp"
#include "dnsasm/report.hpp"

namespace fs = std::filesystem;
using dnsasm::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "dnsasm");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("dnsasm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  // Two days of light traffic with one attack on A and C, off the 10-minute grid.
  void small_gen(const std::string& events, const std::string& truth) {
    const auto r = call({"gen", "--days", "2", "--seed", "5", "--high-rate", "12000", "--low-rate",
                         "6000", "--attack", "1503:30:10:AC:1", "--events-out", path(events),
                         "--truth-out", path(truth)});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir;
};

}  // namespace

TEST(Cli, ExpectLowerAndInclusionExclusion) {
  auto r = call({"expect", "--l", "1440", "--k", "5", "--d", "3", "--alpha", "100", "--beta", "250",
                 "--mode", "lower"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2.9008\n");
  r = call({"expect", "--mode", "ie"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "8.5958\n");
}

TEST(Cli, ExpectMonteCarlo) {
  const auto r = call({"expect", "--l", "20", "--k", "2", "--d", "1", "--alpha", "3", "--beta", "4",
                       "--monte-carlo", "1000", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("monte_carlo mean="), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  auto r = call({"expect", "--bogus", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(call({"expect", "--beta", "50"}).code, 1);
  EXPECT_EQ(call({"expect", "--mode", "upper"}).code, 1);
  EXPECT_EQ(call({"detect", "--series", "x.csv", "--epsilon", "1.5"}).code, 1);
  EXPECT_EQ(call({"detect", "--series", "x.csv", "--k", "10", "--h", "10", "--lookback", "5"}).code, 1);
  EXPECT_EQ(call({"detect"}).code, 1);
  EXPECT_EQ(call({"gen", "--noise", "1.0"}).code, 1);
  EXPECT_EQ(call({"gen", "--days", "1", "--attack", "1430:30:10:AC"}).code, 1);
}

TEST(Cli, HelpDocumentsDefaults) {
  for (const char* sub : {"gen", "ingest", "detect", "eval", "sweep", "expect"}) {
    const auto r = call({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  for (const char* sub : {"detect", "sweep"}) {
    const auto r = call({sub, "--help"});
    for (const char* needle : {"--epsilon", "[0.1]", "--cos-threshold", "[0.9]",
                               "--cold-start-factor", "--restart-multiple", "[2]", "--k", "[10]",
                               "--lookback", "[1440]"}) {
      EXPECT_NE(r.out.find(needle), std::string::npos) << sub << " missing " << needle;
    }
  }
  const auto e = call({"expect", "--help"});
  for (const char* needle : {"[1440]", "[5]", "[3]", "[100]", "[250]"}) {
    EXPECT_NE(e.out.find(needle), std::string::npos) << needle;
  }
}

TEST_F(CliTest, GenIsDeterministic) {
  small_gen("e1.csv", "t1.csv");
  small_gen("e2.csv", "t2.csv");
  EXPECT_EQ(slurp(dir / "e1.csv"), slurp(dir / "e2.csv"));
  EXPECT_EQ(slurp(dir / "t1.csv"), slurp(dir / "t2.csv"));
  EXPECT_EQ(slurp(dir / "t1.csv"), "start_minute,end_minute,label\n20954943,20954972,attack-1 AC 172.28.10.7\n");
}

TEST_F(CliTest, DetectShortSeriesIsDataError) {
  {
    std::ofstream s(path("short.csv"));
    s << "series_key,minute,value\n";
    for (int m = 0; m < 20; ++m) s << "A," << m << ",5\n";
  }
  const auto r = call({"detect", "--series", path("short.csv"), "--report", path("r.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("at least 21"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingInputIsDataError) {
  const auto r = call({"detect", "--series", path("nope.csv")});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, Pipeline) {
  small_gen("events.csv", "truth.csv");
  auto r = call({"ingest", "--events", path("events.csv"), "--out-dir", path("series")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "series" / "A.csv"));
  EXPECT_TRUE(fs::exists(dir / "series" / "C_172.28.10.7.csv"));
  r = call({"ingest", "--events", path("events.csv"), "--out", path("all.csv")});
  ASSERT_EQ(r.code, 0) << r.err;

  std::vector<std::string> args{"detect", "--lookback", "720", "--report", path("report.json"),
                                "--emit-windows", path("windows.csv"), "--series"};
  for (const auto& e : fs::directory_iterator(dir / "series")) args.push_back(e.path().string());
  r = call(args);
  ASSERT_EQ(r.code, 0) << r.err;
  r = call({"detect", "--lookback", "720", "--series", path("all.csv"), "--report", path("report2.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "report.json"), slurp(dir / "report2.json"));
  r = call({"detect", "--lookback", "720", "--events", path("events.csv"), "--report", path("report3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "report.json"), slurp(dir / "report3.json"));

  std::ifstream rep(dir / "report.json");
  const auto events = dnsasm::parse_report_json(rep);
  ASSERT_FALSE(events.empty());
  EXPECT_GT(events.front().score, 4);
  EXPECT_EQ(slurp(dir / "windows.csv").substr(0, dnsasm::kWindowsHeader.size()), dnsasm::kWindowsHeader);

  r = call({"eval", "--report", path("report.json"), "--truth", path("truth.csv"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"tp\""), std::string::npos);
  EXPECT_NE(r.out.find("\"fn\": 0"), std::string::npos) << r.out;

  r = call({"detect", "--lookback", "720", "--method", "ar", "--format", "csv", "--series",
            path("all.csv"), "--report", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, dnsasm::kReportCsvHeader.size()), dnsasm::kReportCsvHeader);
}

TEST_F(CliTest, SweepDeterministic) {
  small_gen("events.csv", "truth.csv");
  const std::vector<std::string> base{"sweep", "--events", path("events.csv"), "--truth",
                                      path("truth.csv"), "--lookbacks", "0.08,0.5"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("s1.csv")});
  b.insert(b.end(), {"--out", path("s2.csv"), "--serial"});
  ASSERT_EQ(call(a).code, 0);
  ASSERT_EQ(call(b).code, 0);
  const std::string s = slurp(dir / "s1.csv");
  EXPECT_EQ(s, slurp(dir / "s2.csv"));
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 9);
  EXPECT_EQ(call({"sweep", "--events", path("events.csv")}).code, 1);
  EXPECT_EQ(call({"sweep", "--days", "1", "--lookbacks", "0.001"}).code, 1);
}

TEST_F(CliTest, EvalRejectsBadReport) {
  {
    std::ofstream s(path("bad.json"));
    s << "{\"not\": \"an array\"}";
  }
  {
    std::ofstream t(path("truth.csv"));
    t << "start_minute,end_minute,label\n";
  }
  EXPECT_EQ(call({"eval", "--report", path("bad.json"), "--truth", path("truth.csv")}).code, 2);
}
