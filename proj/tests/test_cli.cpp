#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = PLATESWARM_CLI;
const std::string kScenarioDir = PLATESWARM_SCENARIO_DIR;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("plateswarm_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    /// Exit status of the tool; stdout and stderr go to files in the work dir.
    int run(const std::string& args) {
        const std::string cmd = "\"" + kCli + "\" " + args + " >\"" + (dir_ / "stdout").string() +
                                "\" 2>\"" + (dir_ / "stderr").string() + "\"";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string read(const fs::path& p) const {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string err() const { return read(dir_ / "stderr"); }

    fs::path variant(const std::string& name, const std::function<void(json&)>& edit) const {
        std::ifstream in(kScenarioDir + "/paper_sec4.json");
        json doc = json::parse(in);
        edit(doc);
        const fs::path p = dir_ / name;
        std::ofstream(p) << doc.dump(2);
        return p;
    }

    std::size_t lines(const fs::path& p) const {
        std::ifstream in(p);
        std::size_t n = 0;
        for (std::string l; std::getline(in, l);) ++n;
        return n;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateWritesAllOutputs) {
    const fs::path out = dir_ / "run";
    ASSERT_EQ(run("simulate --scenario " + kScenarioDir + "/hover.json --duration 0.05 --out " +
                  out.string()),
              0)
        << err();
    EXPECT_EQ(lines(out / "trajectory.csv"), 52u);
    EXPECT_EQ(lines(out / "controls.csv"), 52u);
    const json summary = json::parse(read(out / "summary.json"));
    EXPECT_EQ(summary["status"], "ok");
    EXPECT_EQ(summary["metrics"]["samples"], 51);
}

TEST_F(Cli, ZeroDurationGivesASingleRow) {
    const fs::path out = dir_ / "run";
    ASSERT_EQ(run("simulate --scenario " + kScenarioDir + "/paper_sec4.json --duration 0 --out " +
                  out.string()),
              0)
        << err();
    EXPECT_EQ(lines(out / "trajectory.csv"), 2u);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
    const fs::path out = dir_ / "env";
    const std::string args = "simulate --scenario " + kScenarioDir + "/hover.json --duration 0.01";
    ASSERT_EQ(setenv("PLATE_SWARM_OUT", out.c_str(), 1), 0);
    const int code = run(args);
    unsetenv("PLATE_SWARM_OUT");
    ASSERT_EQ(code, 0) << err();
    EXPECT_TRUE(fs::exists(out / "summary.json"));
}

TEST_F(Cli, ConfigErrorsExitOne) {
    const fs::path bad = variant("collinear.json", [](json& d) {
        d["params"]["quadrotors"][0]["attachment"] = {-0.5, 0, 0};
        d["params"]["quadrotors"][1]["attachment"] = {0, 0, 0};
        d["params"]["quadrotors"][2]["attachment"] = {0.5, 0, 0};
    });
    EXPECT_EQ(run("simulate --scenario " + bad.string() + " --out " + (dir_ / "o").string()), 1);
    EXPECT_NE(err().find("rank"), std::string::npos) << err();

    const fs::path unknown = variant("unknown.json", [](json& d) { d["gains"]["k9"] = 1; });
    EXPECT_EQ(run("simulate --scenario " + unknown.string()), 1);
    EXPECT_NE(err().find("k9"), std::string::npos) << err();

    EXPECT_EQ(run("simulate --scenario " + (dir_ / "missing.json").string()), 1);
    EXPECT_EQ(run("simulate"), 1);
    EXPECT_EQ(run("verify --suite nonsense"), 1);
}

TEST_F(Cli, DivergenceExitsTwoAndStillWritesTheSummary) {
    const fs::path sc = variant("wide.json", [](json& d) {
        d["gains"]["eps"] = 0.4;
        d["integrator"]["duration"] = 0.3;
    });
    const fs::path out = dir_ / "run";
    EXPECT_EQ(run("simulate --scenario " + sc.string() + " --out " + out.string()), 2);
    const json summary = json::parse(read(out / "summary.json"));
    EXPECT_EQ(summary["status"], "diverged");
}

TEST_F(Cli, VerifyPassesAndFails) {
    const fs::path out = dir_ / "v";
    EXPECT_EQ(run("verify --suite algebra --seed 42 --out " + out.string()), 0) << err();
    const json report = json::parse(read(out / "verify.json"));
    EXPECT_TRUE(report["passed"].get<bool>());
    EXPECT_EQ(report["seed"], 42);

    const fs::path sc = variant("wide.json", [](json& d) {
        d["gains"]["eps"] = 0.4;
        d["integrator"]["duration"] = 1.0;
    });
    EXPECT_EQ(run("verify --suite lyapunov --scenario " + sc.string() + " --out " + out.string()), 3);
    EXPECT_NE(err().find("first failure"), std::string::npos) << err();
    EXPECT_NE(err().find("seed"), std::string::npos) << err();
}

TEST_F(Cli, PlotWritesFiguresAndRejectsEmptyCsv) {
    const fs::path out = dir_ / "run";
    ASSERT_EQ(run("simulate --scenario " + kScenarioDir + "/paper_sec4.json --duration 0.1 --out " +
                  out.string()),
              0);
    const fs::path figs = dir_ / "figs";
    ASSERT_EQ(run("plot --traj " + (out / "trajectory.csv").string() + " --figs all --out " +
                  figs.string()),
              0)
        << err();
    for (const char* f : {"attitude", "omega", "plate-pos", "plate-vel", "ball-pos", "ball-vel"}) {
        EXPECT_TRUE(fs::exists(figs / (std::string(f) + ".svg"))) << f;
    }
    const std::string first = read(figs / "ball-pos.svg");
    ASSERT_EQ(run("plot --traj " + (out / "trajectory.csv").string() + " --figs ball-pos --out " +
                  figs.string()),
              0);
    EXPECT_EQ(read(figs / "ball-pos.svg"), first);

    std::ofstream(dir_ / "empty.csv").close();
    EXPECT_EQ(run("plot --traj " + (dir_ / "empty.csv").string() + " --out " + figs.string()), 1);
    EXPECT_EQ(run("plot --traj " + (out / "trajectory.csv").string() + " --figs nope --out " +
                  figs.string()),
              1);
}

TEST_F(Cli, SweepRecordsEveryRun) {
    const fs::path sc = variant("short.json", [](json& d) { d["integrator"]["duration"] = 0.2; });
    const fs::path out = dir_ / "sweep";
    ASSERT_EQ(run("sweep --scenario " + sc.string() + " --param k4 --values 2,4 --threads 2 --out " +
                  out.string()),
              0)
        << err();
    EXPECT_EQ(lines(out / "sweep.csv"), 3u);
    EXPECT_TRUE(fs::exists(out / "k4=2" / "summary.json"));
    EXPECT_TRUE(fs::exists(out / "k4=4" / "summary.json"));
    EXPECT_EQ(run("sweep --scenario " + sc.string() + " --param k99 --values 1 --out " + out.string()), 1);
}
