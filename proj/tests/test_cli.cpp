#include <gtest/gtest.h>

#include <sstream>

#include "lgcp/cli.hpp"
#include "lgcp/error.hpp"
#include "lgcp/io.hpp"
#include "support.hpp"

using namespace lgcp;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = 0;
  std::string out, err;
  io::Json errorJson() const { return io::Json::parse(err.substr(err.rfind('{'))); }
};

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") {}

  Result run(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), {"lgcp", "--project", (dir_ / "project.json").string()});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    std::istringstream in(input);
    Result r;
    r.status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err, in);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void writeSquare(const std::string& name, double side) {
    io::writeJson(dir_ / name, io::windowToGeoJson(PolygonWindow::rectangle(0, 0, side, side)));
  }

  // Simulated 16 x 16 pattern over (0, 10], ingested into the project.
  void simulateAndIngest() {
    writeSquare("window.geojson", 16);
    const auto sim = run({"simulate", "--window", path("window.geojson"), "--tlim", "0,10",
                          "--sigma", "1", "--phi", "3", "--theta", "1", "--mu", "60", "--seed",
                          "7", "--out", path("sim.csv")});
    ASSERT_EQ(sim.status, 0) << sim.err;
    const auto ing = run({"ingest", "--points", path("sim.csv"), "--window",
                          path("sim.window.geojson"), "--tlim", "0,10"});
    ASSERT_EQ(ing.status, 0) << ing.err;
  }

  test::TempDir dir_;
};

}  // namespace

TEST(CliParsing, PairsListsAndAxes) {
  EXPECT_EQ(cli::parsePair("1.5,-2"), (std::pair<double, double>{1.5, -2}));
  EXPECT_THROW(cli::parsePair("1,2,3"), Error);
  EXPECT_THROW(cli::parsePair("1,x"), Error);
  EXPECT_EQ(cli::parseList("0.1, 0.5,0.9").size(), 3u);
  EXPECT_FALSE(cli::parseAxis("all").has_value());
  EXPECT_FALSE(cli::parseAxis("-1").has_value());
  const auto one = cli::parseAxis("4");
  ASSERT_TRUE(one.has_value());
  EXPECT_EQ(one->first, 4);
  EXPECT_EQ(one->last, 4);
  const auto range = cli::parseAxis("2,7");
  EXPECT_EQ(range->first, 2);
  EXPECT_EQ(range->last, 7);
}

TEST_F(CliTest, UnknownOptionIsReportedAsJson) {
  const auto r = run({"ingest", "--bogus"});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.errorJson()["error"], "InvalidArgument");
}

TEST_F(CliTest, IngestReportsTheOffendingRow) {
  writeSquare("w.geojson", 10);
  io::writeText(dir_ / "p.csv", "x,y,t\n1,1,0.5\n11,2,0.7\n");
  const auto r = run({"ingest", "--points", path("p.csv"), "--window", path("w.geojson"),
                      "--tlim", "0,1"});
  EXPECT_EQ(r.status, 1);
  const auto j = r.errorJson();
  EXPECT_EQ(j["error"], "PointOutsideWindow");
  EXPECT_EQ(j["index"], 1);
  const std::string msg = j["message"];
  EXPECT_NE(msg.find("row 2 (line 3"), std::string::npos) << msg;

  io::writeText(dir_ / "q.csv", "x,y,t\n1,1,0.5\n2,2,1.5\n");
  const auto t = run({"ingest", "--points", path("q.csv"), "--window", path("w.geojson"),
                      "--tlim", "0,1"});
  EXPECT_EQ(t.errorJson()["error"], "TimeOutsideTlim");
  EXPECT_EQ(t.errorJson()["index"], 1);

  io::writeText(dir_ / "bad.csv", "x,y,t\n1,oops,0.5\n");
  const auto b = run({"ingest", "--points", path("bad.csv"), "--window", path("w.geojson"),
                      "--tlim", "0,1"});
  EXPECT_EQ(b.errorJson()["error"], "ParseError");
}

TEST_F(CliTest, SimulateIsReproducibleBySeed) {
  writeSquare("w.geojson", 12);
  const std::vector<std::string> base{"simulate", "--window", path("w.geojson"), "--tlim", "0,3",
                                      "--mu",     "30",     "--seed", "11"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.csv")});
  b.insert(b.end(), {"--out", path("b.csv")});
  ASSERT_EQ(run(a).status, 0);
  ASSERT_EQ(run(b).status, 0);
  EXPECT_EQ(io::readText(dir_ / "a.csv"), io::readText(dir_ / "b.csv"));
  const auto manifest = io::readJson(dir_ / "a.manifest.json");
  EXPECT_EQ(manifest["seed"], 11);
  EXPECT_DOUBLE_EQ(manifest["timeStep"].get<double>(), 0.05);
  EXPECT_TRUE(fs::exists(dir_ / "a.window.geojson"));
}

TEST_F(CliTest, PredictRejectsLagBeyondData) {
  simulateAndIngest();
  const auto r = run({"predict", "--T", "3", "--laglength", "5", "--sigma", "1", "--phi", "3",
                      "--theta", "1", "--gridsize", "8,8", "--mala-length", "10", "--quiet",
                      "--out", path("pred")});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.errorJson()["error"], "TimeIndexOutOfRange");
  const auto late = run({"predict", "--T", "11", "--sigma", "1", "--phi", "3", "--theta", "1",
                         "--gridsize", "8,8", "--mala-length", "10", "--quiet", "--out",
                         path("pred")});
  EXPECT_EQ(late.errorJson()["error"], "TimeIndexOutOfRange");
}

TEST_F(CliTest, PredictWithoutDumpWritesSummaries) {
  simulateAndIngest();
  const auto r = run({"predict", "--T", "10", "--laglength", "1", "--sigma", "1", "--phi", "3",
                      "--theta", "1", "--cellwidth", "1", "--mala-length", "60", "--mcmc-diag",
                      "2", "--exceed", "1.5", "--out", path("pred")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.err.find("progress 100"), std::string::npos);
  const auto manifest = io::readJson(dir_ / "pred" / "prediction.json");
  EXPECT_FALSE(manifest.contains("store"));
  EXPECT_EQ(manifest["slices"].size(), 2u);
  for (const char* f : {"rr_10.json", "serr_10.json", "meanfield_9.json", "exceed_10.json",
                        "summary.txt", "htrace.csv", "diag.csv", "traces.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "pred" / f)) << f;
  }
  const auto rr = io::readJson(dir_ / "pred" / "rr_10.json");
  EXPECT_EQ(rr["M"], 16);
  EXPECT_EQ(rr["values"].size(), 256u);
}

TEST_F(CliTest, Walkthrough) {
  simulateAndIngest();
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"lambda", "--gridsize", "16,16"},
           {"mu", "--method", "lowess"},
           {"fit-spatial", "--phi-range", "0.5,8"},
           {"fit-theta", "--max-lag", "3"}}) {
    const auto r = run(args);
    ASSERT_EQ(r.status, 0) << args[0] << ": " << r.err;
  }
  const auto summaries = run({"summaries", "--kind", "g"});
  ASSERT_EQ(summaries.status, 0);
  EXPECT_EQ(summaries.out.rfind("r,empirical,theoretical", 0), 0u);
  const auto params = io::readJson(dir_ / "project.json")["params"];
  EXPECT_TRUE(params.contains("sigma"));
  EXPECT_TRUE(params.contains("theta"));

  const auto declined = run({"predict", "--T", "10", "--laglength", "2", "--cellwidth", "1",
                             "--mala-length", "40", "--quiet", "--dump", path("dump"), "--out",
                             path("pred")},
                            "n\n");
  EXPECT_EQ(declined.errorJson()["error"], "DiskSpaceWarningDeclined");

  const auto pred = run({"predict", "--T", "10", "--laglength", "2", "--cellwidth", "1",
                         "--mala-length", "40", "--mcmc-diag", "3", "--quiet", "--dump", path("dump"),
                         "--exceed", "1.5,2", "--out", path("pred")},
                        "y\n");
  ASSERT_EQ(pred.status, 0) << pred.err;
  EXPECT_TRUE(fs::exists(dir_ / "dump" / "samples.lgd1"));
  const auto again = run({"predict", "--T", "10", "--laglength", "2", "--cellwidth", "1",
                          "--mala-length", "40", "--quiet", "--yes", "--dump", path("dump"),
                          "--out", path("pred")});
  EXPECT_EQ(again.errorJson()["error"], "PathExists");

  const auto ext = run({"extract", "--x", "1,7", "--y", "1,4", "--t", "3"});
  ASSERT_EQ(ext.status, 0) << ext.err;
  const auto dims = io::Json::parse(ext.out)["dims"];
  EXPECT_EQ(dims, io::Json::parse("[7,4,1,40]"));
  const auto bad = run({"extract", "--x", "1,40"});
  EXPECT_EQ(bad.errorJson()["error"], "IndexOutOfRange");

  const auto exceed = run({"expectation", "--fun", "exceed:1.5,2"});
  ASSERT_EQ(exceed.status, 0) << exceed.err;
  const auto ej = io::Json::parse(exceed.out);
  EXPECT_EQ(ej["slices"].size(), 3u);
  EXPECT_EQ(ej["slices"][2]["layers"].size(), 2u);
  // The expectation over the store matches the in-run exceedance average.
  const auto inRun = io::readJson(dir_ / "pred" / "exceed_10.json")["layers"][1]["values"];
  const auto fromStore = ej["slices"][2]["layers"][1]["values"];
  for (std::size_t i = 0; i < inRun.size(); ++i) {
    EXPECT_NEAR(inRun[i].get<double>(), fromStore[i].get<double>(), 1e-12);
  }

  const auto q = run({"quantile", "--probs", "0.1,0.9", "--out", path("q.json")});
  ASSERT_EQ(q.status, 0) << q.err;
  EXPECT_EQ(io::readJson(dir_ / "q.json")["slices"][0]["layers"].size(), 2u);

  for (const char* what : {"rr", "serr", "intensity", "exceed", "quantile", "htrace", "trace"}) {
    const std::string out = path(std::string(what) + ".png");
    const auto p = run({"plot", "--what", what, "--out", out});
    EXPECT_EQ(p.status, 0) << what << ": " << p.err;
    EXPECT_GT(fs::file_size(out), 100u) << what;
  }

  const auto rot = run({"rotate-check", "--cellwidth", "1"});
  ASSERT_EQ(rot.status, 0);
  EXPECT_DOUBLE_EQ(io::Json::parse(rot.out)["gainPercent"].get<double>(), 0.0);
}
