#include "persona/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "persona/report.hpp"

namespace fs = std::filesystem;
using namespace persona;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out;
    std::ostringstream err;
    const int status = cli::run(args, in, out, err);
    return {status, out.str(), err.str()};
}

const std::string fixture = std::string(PERSONA_TEST_DATA) + "/scenario_applicants.csv";

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("persona_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static std::string slurp(const std::string& file) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream text;
        text << in.rdbuf();
        return text.str();
    }

    fs::path dir_;
};

} // namespace

TEST_F(CliTest, ReportOnScenarioFixture) {
    const auto r = run_cli({"report", fixture, "--schema", "scenario3", "--k", "3", "--seed", "42", "--restarts",
                            "20", "--policy", "simple"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto report = parse_report(r.out);
    EXPECT_EQ(report.dimensions.size(), 5u);
    double sum = 0.0;
    for (double p : report.percent) {
        sum += p;
    }
    EXPECT_NEAR(sum, 100.0, 1e-9);
    EXPECT_EQ(report.metadata.k, 3u);
    EXPECT_EQ(report.metadata.seed, 42u);
    EXPECT_EQ(report.metadata.schema, "scenario3");
}

TEST_F(CliTest, InfeasibleKExitsTwoWithoutOutput) {
    const auto r = run_cli({"fit", fixture, "--schema", "scenario3", "--k", "10"});
    EXPECT_EQ(r.status, 2);
    EXPECT_TRUE(r.out.empty());
    EXPECT_NE(r.err.find("infeasible"), std::string::npos);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, InputErrorsExitOne) {
    EXPECT_EQ(run_cli({"fit", path("missing.csv"), "--schema", "scenario3", "--k", "2"}).status, 1);
    EXPECT_EQ(run_cli({"fit", fixture, "--schema", "nope", "--k", "2"}).status, 1);
    EXPECT_EQ(run_cli({"fit", fixture, "--schema", "scenario3", "--k", "2", "--policy", "fuzzy"}).status, 1);
    EXPECT_EQ(run_cli({"fit", fixture, "--schema", "scenario3"}).status, 1);
    EXPECT_EQ(run_cli({"frobnicate"}).status, 1);
    EXPECT_EQ(run_cli({"report", fixture, "--schema", "scenario3"}).status, 1);
    const auto bad = run_cli({"score", "--schema", "scenario3"}, "Scenario 1,Scenario 2,Scenario 3\n1,2,x\n");
    EXPECT_EQ(bad.status, 1);
    EXPECT_TRUE(bad.out.empty());
    EXPECT_NE(bad.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, FuseIdenticalReportsIsIdempotent) {
    const auto a = run_cli({"report", fixture, "--schema", "scenario3", "--k", "3", "--seed", "42"});
    ASSERT_EQ(a.status, 0);
    std::ofstream(path("a.json")) << a.out;
    const auto fused = run_cli({"fuse", path("a.json"), path("a.json"), "--w", "0.5"});
    ASSERT_EQ(fused.status, 0) << fused.err;
    EXPECT_EQ(parse_report(fused.out).percent, parse_report(a.out).percent);
}

TEST_F(CliTest, DeterministicOutput) {
    const std::vector<std::string> args{"report", fixture, "--schema", "scenario3", "--k", "3", "--seed", "5",
                                        "--restarts", "4", "--format", "text"};
    EXPECT_EQ(run_cli(args).out, run_cli(args).out);
}

TEST_F(CliTest, FitThenReportFromModel) {
    const auto fit = run_cli({"fit", fixture, "--schema", "scenario3", "--k", "3", "--seed", "42", "--restarts",
                              "20", "-o", path("model.json")});
    ASSERT_EQ(fit.status, 0) << fit.err;
    EXPECT_TRUE(fit.out.empty());
    const auto model = slurp(path("model.json"));
    EXPECT_NE(model.find("\"row_id\": \"DIYA B\""), std::string::npos);

    const auto direct =
        run_cli({"report", fixture, "--schema", "scenario3", "--k", "3", "--seed", "42", "--restarts", "20"});
    const auto reused = run_cli({"report", fixture, "--schema", "scenario3", "--model", path("model.json")});
    ASSERT_EQ(reused.status, 0) << reused.err;
    EXPECT_EQ(reused.out, direct.out);
}

TEST_F(CliTest, ElbowPrintsCurveAndSelection) {
    const auto r = run_cli({"elbow", fixture, "--schema", "scenario3", "--k-max", "4", "--restarts", "10"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, 7), "k\twcd\n1");
    EXPECT_NE(r.out.find("selected_k\t"), std::string::npos);
    const auto j = run_cli({"elbow", fixture, "--schema", "scenario3", "--k-max", "3", "--format", "json"});
    EXPECT_NE(j.out.find("\"selected_k\""), std::string::npos);
    EXPECT_EQ(run_cli({"elbow", fixture, "--schema", "scenario3", "--k-max", "12"}).status, 2);
}

TEST_F(CliTest, ScoreTable) {
    const auto r = run_cli({"score", fixture, "--schema", "scenario3"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("DIYA B\t2.000\t33.333\t2.000\t33.333\t2.000\t33.333\t0.000\t0.000\t0.000\t0.000"),
              std::string::npos)
        << r.out;
    EXPECT_EQ(run_cli({"score", fixture, "--schema", "scenario3", "--format", "piedata"}).status, 1);
}

TEST_F(CliTest, GenerateThenReadBack) {
    const auto gen = run_cli({"gen", "--schema", "ocean50", "--n", "30", "--seed", "3", "--noise", "0.1"});
    ASSERT_EQ(gen.status, 0) << gen.err;
    EXPECT_EQ(gen.out, run_cli({"gen", "--schema", "ocean50", "--n", "30", "--seed", "3", "--noise", "0.1"}).out);
    const auto score = run_cli({"score", "--schema", "ocean50", "--format", "json"}, gen.out);
    ASSERT_EQ(score.status, 0) << score.err;
    EXPECT_NE(score.out.find("\"R01\""), std::string::npos);
    EXPECT_EQ(run_cli({"gen", "--schema", "ocean50", "--n", "3", "--mixture", "1,0"}).status, 1);
}

TEST_F(CliTest, SchemaCommand) {
    const auto list = run_cli({"schema", "--list"});
    EXPECT_EQ(list.out, "iwp\nocean50\nscenario\nscenario3\n");
    const auto doc = run_cli({"schema", "ocean50"});
    ASSERT_EQ(doc.status, 0);
    std::ofstream(path("copy.json")) << doc.out;
    EXPECT_EQ(run_cli({"schema", path("copy.json")}).out, doc.out);
    std::ofstream(path("bad.json")) << R"({"name":"b","dimensions":["A"],"items":[{"column":"q","dimension":"Z"}]})";
    EXPECT_EQ(run_cli({"schema", path("bad.json")}).status, 1);
}

TEST_F(CliTest, AggregateMeanAndPiedata) {
    const auto r = run_cli({"report", fixture, "--schema", "scenario3", "--k", "3", "--aggregate", "mean",
                            "--format", "piedata"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
    const auto labels = run_cli({"report", fixture, "--schema", "scenario3", "--k", "3", "--labels"});
    EXPECT_NE(labels.out.find("\"clusters\""), std::string::npos);
}
