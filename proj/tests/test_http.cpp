#include <gtest/gtest.h>

#include <httplib.h>

#include <algorithm>

#include "lgcp/estimation.hpp"
#include "lgcp/io.hpp"
#include "lgcp/project.hpp"
#include "lgcp/simulate.hpp"
#include "lgcp/tuner.hpp"
#include "support.hpp"

using namespace lgcp;

namespace {

class HttpTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir("http");
    const auto w = PolygonWindow::rectangle(0, 0, 32, 32);
    const CovarianceModel m{CovarianceFamily::Exponential, 1.2, 3.0, 1.0, 0.5};
    const auto sim = lgcpSim(w, {0, 12}, SpatialIntensity::uniform(buildGrid(w, 1.0)),
                             TemporalIntensity::constant({0, 12}, 80), 1.0, m, 21);
    pattern_ = new SpaceTimePointPattern(sim.pattern);
    io::writeJson(*dir_ / "pattern.json", io::patternToJson(sim.pattern));
    Project project = Project::load(*dir_ / "project.json");
    project.setArtifact("pattern", *dir_ / "pattern.json");
    project.save();
    server_ = new TunerServer(*dir_ / "project.json");
    port_ = server_->start("127.0.0.1", 0);
  }
  static void TearDownTestSuite() {
    delete server_;
    delete pattern_;
    delete dir_;
  }

  static io::Json get(const std::string& path, int expectStatus = 200) {
    httplib::Client c("127.0.0.1", port_);
    const auto res = c.Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expectStatus) << path << ": " << res->body;
    return io::Json::parse(res->body);
  }

  static test::TempDir* dir_;
  static SpaceTimePointPattern* pattern_;
  static TunerServer* server_;
  static int port_;
};

test::TempDir* HttpTest::dir_ = nullptr;
SpaceTimePointPattern* HttpTest::pattern_ = nullptr;
TunerServer* HttpTest::server_ = nullptr;
int HttpTest::port_ = 0;

SecondOrderSummary pcfOf(const SpaceTimePointPattern& p) {
  return ginhomAverage(p, SpatialIntensity::uniform(buildGrid(p.window(), 64, 64)),
                       constantInTime(p), defaultRGrid(p.window()));
}

}  // namespace

TEST_F(HttpTest, SummaryAsJsonAndCsv) {
  const auto g = get("/api/summary?kind=g");
  EXPECT_EQ(g["kind"], "g");
  EXPECT_EQ(g["r"].size(), 128u);
  EXPECT_EQ(g["intervalsUsed"], 12);
  const auto oracle = pcfOf(*pattern_);
  for (std::size_t i = 0; i < oracle.r.size(); i += 17) {
    EXPECT_NEAR(g["empirical"][i].get<double>(), oracle.empirical[i], 1e-12);
  }
  EXPECT_EQ(get("/api/summary?kind=acf")["lags"].size(), 10u);

  httplib::Client c("127.0.0.1", port_);
  const auto csv = c.Get("/api/summary?kind=k&format=csv");
  ASSERT_TRUE(csv);
  EXPECT_EQ(csv->status, 200);
  EXPECT_EQ(csv->body.rfind("r,empirical\n", 0), 0u);
  EXPECT_EQ(std::count(csv->body.begin(), csv->body.end(), '\n'), 129);
}

TEST_F(HttpTest, TheoreticalContrastAgreesWithFit) {
  const auto s = pcfOf(*pattern_);
  const SpatialFit fit = fitSpatialPars(s, CovarianceFamily::Exponential, 0.5, {0, 10}, {0, 10});
  const auto j = get("/api/theoretical?kind=g&family=exponential&sigma=" +
                     io::formatDouble(fit.sigma) + "&phi=" + io::formatDouble(fit.phi));
  EXPECT_NEAR(j["contrast"].get<double>(), fit.contrastValue, 1e-6);
  EXPECT_EQ(j["theoretical"].size(), s.r.size());
  // Any other parameter pair has a larger contrast.
  const auto off = get("/api/theoretical?kind=g&sigma=" + io::formatDouble(fit.sigma * 1.2) +
                       "&phi=" + io::formatDouble(fit.phi));
  EXPECT_GT(off["contrast"].get<double>(), fit.contrastValue);
}

TEST_F(HttpTest, AcfResidualAgreesWithThetaFit) {
  const ThetaFit fit = fitTheta(countAcf(*pattern_, 10), {0, 10});
  const auto j = get("/api/theoretical?kind=acf&theta=" + io::formatDouble(fit.theta));
  EXPECT_NEAR(j["residual"].get<double>(), fit.residual, 1e-12);
  EXPECT_NEAR(j["scale"].get<double>(), fit.scale, 1e-9);
}

TEST_F(HttpTest, LambdaPreviewFlattensWithHugeBandwidth) {
  const auto flat = get("/api/lambda-preview?bandwidth=100000&size=16");
  EXPECT_EQ(flat["M"], 16);
  EXPECT_EQ(flat["values"].size(), 256u);
  EXPECT_LT(flat["ratio"].get<double>(), 1.05);
  const auto rough = get("/api/lambda-preview?bandwidth=1");
  EXPECT_GT(rough["ratio"].get<double>(), 1.05);
}

TEST_F(HttpTest, ParamsRoundTrip) {
  httplib::Client c("127.0.0.1", port_);
  const auto res = c.Post("/api/params", R"({"sigma": 1.7, "phi": 2.5})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const auto p = get("/api/params");
  EXPECT_DOUBLE_EQ(p["sigma"].get<double>(), 1.7);
  EXPECT_DOUBLE_EQ(p["phi"].get<double>(), 2.5);
  EXPECT_DOUBLE_EQ(Project::load(*dir_ / "project.json").params()["sigma"].get<double>(), 1.7);
  // Saved parameters become the theoretical defaults.
  EXPECT_DOUBLE_EQ(get("/api/theoretical?kind=g")["sigma"].get<double>(), 1.7);
}

TEST_F(HttpTest, BadRequestsReturnJsonErrors) {
  httplib::Client c("127.0.0.1", port_);
  const auto bad = c.Post("/api/params", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(io::Json::parse(bad->body)["error"], "ParseError");
  EXPECT_EQ(get("/api/theoretical?kind=g&sigma=abc", 400)["error"], "InvalidArgument");
  EXPECT_EQ(get("/api/theoretical?kind=g&phi=-1", 400)["error"], "InvalidArgument");
  EXPECT_EQ(get("/api/summary?kind=z", 400).contains("error"), true);
  EXPECT_EQ(get("/api/lambda-preview?bandwidth=0", 400)["error"], "NonpositiveBandwidth");
}
