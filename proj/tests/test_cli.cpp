#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rankone/cli.hpp"
#include "rankone/construction.hpp"
#include "rankone/errors.hpp"
#include "rankone/json_io.hpp"
#include "test_support.hpp"

using namespace rankone;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "rankone");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("rankone_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name) << text;
        return path(name);
    }

    fs::path dir_;
};

}  // namespace

TEST(JsonIo, ScheduleRoundTripIsExact) {
    const Schedule& s = rankone::testing::desk_schedule();
    const json j = to_json(s);
    EXPECT_EQ(schedule_from_json(json::parse(j.dump())), s);
    EXPECT_EQ(j["stages"][1]["h"], "553/2");
    const Schedule p = build_schedule(Rat(1), Rat(1), TargetSets({Rat(3, 2)}, {Rat(2)}), 10, GrowthPolicy{},
                                      PerturbationConfig{true, 2});
    EXPECT_EQ(schedule_from_json(to_json(p)), p);
}

TEST(JsonIo, TamperedScheduleIsRejected) {
    json j = to_json(rankone::testing::desk_schedule());
    j["stages"][2]["h"] = "12345/1";
    EXPECT_THROW(schedule_from_json(j), ParseError);
    EXPECT_THROW(schedule_from_json(json{{"format", "other"}}), ParseError);
}

TEST(JsonIo, IntervalSetsAndRationals) {
    const IntervalSet s{{Rat(1, 2), Rat(3)}, {Rat(5), Rat(11, 2)}};
    EXPECT_EQ(to_json(s).dump(), R"([["1/2","3/1"],["5/1","11/2"]])");
    EXPECT_EQ(interval_set_from_json(to_json(s)), s);
    EXPECT_EQ(rat_from_json(json(7)), Rat(7));
    EXPECT_THROW(rat_from_json(json(1.5)), ParseError);
    EXPECT_THROW(interval_set_from_json(json::parse(R"([["2","1"]])")), ParseError);
}

TEST(JsonIo, ConfigValidation) {
    const LabConfig d = config_from_json(json::object());
    EXPECT_EQ(d.j_max, 8);
    EXPECT_EQ(d.C, (std::vector<Rat>{Rat(3, 2), Rat(5, 2)}));
    EXPECT_EQ(d.verify.oracle_samples, 10000);
    EXPECT_EQ(config_from_json(to_json(d)).C, d.C);
    EXPECT_THROW(config_from_json(json::parse(R"({"C":["3/2"],"D":["3/2"]})")), InvalidTargets);
    EXPECT_THROW(config_from_json(json::parse(R"({"C":[]})")), EmptyTargets);
    EXPECT_THROW(config_from_json(json::parse(R"({"colour":1})")), ParseError);
    EXPECT_THROW(config_from_json(json::parse(R"({"J_max":1})")), ParseError);
    EXPECT_THROW(config_from_json(json::parse(R"({"w1":"0"})")), ParseError);
    EXPECT_THROW(config_from_json(json::parse(R"({"perturbation":{"mode":"random"}})")), ParseError);
    EXPECT_THROW(config_from_json(json::parse(R"({"gauge":{"escalation_factor":"1"}})")), ParseError);
    const LabConfig p = config_from_json(json::parse(R"({"J_max":36,"perturbation":{"mode":"dyadic","net_depth":1}})"));
    EXPECT_TRUE(p.perturbation.enabled);
}

TEST_F(CliTest, BuildVerifyAndArtifacts) {
    const std::string out = path("run");
    ASSERT_EQ(run({"build", "--out", out}).code, cli::kPass);
    EXPECT_TRUE(fs::exists(dir_ / "run" / "schedule.json"));
    EXPECT_NE(slurp(dir_ / "run" / "build_log.txt").find("escalations: 0"), std::string::npos);

    const auto v = run({"verify", "--out", out, "--which", "all", "--jobs", "2"});
    EXPECT_EQ(v.code, cli::kPass) << v.out << v.err;
    const std::string first = slurp(dir_ / "run" / "verify_all.json");
    ASSERT_EQ(run({"verify", "--out", out, "--which", "all", "--jobs", "1"}).code, cli::kPass);
    EXPECT_EQ(slurp(dir_ / "run" / "verify_all.json"), first);
    EXPECT_TRUE(fs::exists(dir_ / "run" / "verify_all.txt"));

    const auto p = run({"profile", "--out", out});
    ASSERT_EQ(p.code, cli::kPass) << p.err;
    std::ifstream csv(dir_ / "run" / "profile.csv");
    std::string header, row0;
    std::getline(csv, header);
    std::getline(csv, row0);
    EXPECT_EQ(header, "t,value,t_exact,value_exact");
    EXPECT_EQ(row0, "0.000000000000,1.000000000000,0/1,1/1");

    const auto o = run({"oracle", "--out", out, "--triples", "5", "--membership", "300", "--n", "2000"});
    EXPECT_EQ(o.code, cli::kPass) << o.out << o.err;

    const auto d = run({"density", "--out", out, "--d", "2", "--s-max", "200", "--step", "0.0625"});
    EXPECT_EQ(d.code, cli::kPass) << d.out << d.err;
    EXPECT_TRUE(fs::exists(dir_ / "run" / "density.csv"));
}

TEST_F(CliTest, ShortScheduleHasNoCertifiedWindows) {
    const auto cfg = write("short.json", R"({"J_max": 2})");
    const auto r = run({"build", "--config", cfg, "--out", path("short")});
    EXPECT_EQ(r.code, cli::kPass);
    EXPECT_NE(r.out.find("no certified windows"), std::string::npos);
    EXPECT_EQ(run({"verify", "--out", path("short"), "--which", "dissipative"}).code, cli::kHorizon);
}

TEST_F(CliTest, ValidationErrorsAreUsageErrors) {
    const auto cfg = write("clash.json", R"({"C": ["3/2", "2"], "D": ["2", "3"]})");
    EXPECT_EQ(run({"build", "--config", cfg, "--out", path("x")}).code, cli::kUsage);
    EXPECT_EQ(run({"build", "--config", write("bad.json", "{"), "--out", path("x")}).code, cli::kUsage);
    EXPECT_EQ(run({"verify", "--out", path("missing")}).code, cli::kUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
    EXPECT_EQ(run({}).code, cli::kUsage);

    ASSERT_EQ(run({"build", "--out", path("ok")}).code, cli::kPass);
    EXPECT_EQ(run({"verify", "--out", path("ok"), "--which", "singular", "--c", "7/2"}).code, cli::kUsage);
    EXPECT_EQ(run({"verify", "--out", path("ok"), "--which", "everything"}).code, cli::kUsage);
}

TEST_F(CliTest, EscalationExhaustedExitsTwo) {
    const auto cfg = write("weak.json", R"({"C":["3/2"],"D":["2"],"J_max":6,
        "gauge":{"floor":"1","base":"1","max_retries":0}})");
    const auto r = run({"build", "--config", cfg, "--out", path("weak")});
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_NE(r.err.find("witness"), std::string::npos);
}

TEST_F(CliTest, NegativeControlFails) {
    ASSERT_EQ(run({"build", "--out", path("neg"), "--collision-d", "2", "--collision-stage", "3"}).code, cli::kPass);
    const auto r = run({"verify", "--out", path("neg"), "--which", "dissipative", "--d", "2"});
    EXPECT_EQ(r.code, cli::kCertificateFail);
    EXPECT_NE(r.out.find("witness"), std::string::npos);
    EXPECT_EQ(run({"density", "--out", path("neg"), "--d", "2"}).code, cli::kCertificateFail);
}

TEST_F(CliTest, HorizonExceededExitsFour) {
    ASSERT_EQ(run({"build", "--out", path("h")}).code, cli::kPass);
    const Schedule& s = rankone::testing::desk_schedule();
    const std::string far = (s.height(8) * Rat(3)).to_string();
    const std::string farther = (s.height(8) * Rat(4)).to_string();
    EXPECT_EQ(run({"profile", "--out", path("h"), "--lo", far, "--hi", farther}).code, cli::kHorizon);
    EXPECT_EQ(run({"oracle", "--out", path("h"), "--t-max", far, "--triples", "3", "--membership", "0"}).code,
              cli::kHorizon);
}

TEST_F(CliTest, PerturbedConfig) {
    const auto cfg = write("pert.json", R"({"J_max":36,"perturbation":{"mode":"dyadic","net_depth":1}})");
    ASSERT_EQ(run({"build", "--config", cfg, "--out", path("p")}).code, cli::kPass);
    const auto r = run({"verify", "--config", cfg, "--out", path("p"), "--which", "perturbed", "--c", "3/2"});
    EXPECT_EQ(r.code, cli::kPass) << r.out << r.err;
    EXPECT_NE(r.out.find("81 passed, 0 failed"), std::string::npos);
}
