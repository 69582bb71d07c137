#include "fixtures.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result sh(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " \"" CTRIG_CLI_PATH "\" " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) r.out += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("ctrig_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }

    std::string read(const std::string& name) const {
        std::ifstream in(dir / name);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path dir;
};

} // namespace

TEST_F(CliTest, Version) {
    const auto r = sh("version");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "causetrigger 0.1.0\n");
    EXPECT_EQ(sh("").code, 1);
    EXPECT_EQ(sh("frobnicate").code, 1);
}

TEST_F(CliTest, SplitCommand) {
    std::string csv = "a,step,flat\n";
    for (int i = 0; i < 100; ++i) csv += std::to_string(i) + "," + (i >= 64 ? "1" : "0") + ",2\n";
    const auto path = write("series.csv", csv);
    auto r = sh("split --csv " + path.string() + " --column step");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "t1=64\nmean_i1=0\nmean_i2=1\ndelta=1\naccepted=true\n");
    r = sh("split --csv " + path.string() + " --column flat --min-size 30 --threshold 0");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("accepted=false"), std::string::npos);
    EXPECT_EQ(sh("split --csv " + path.string() + " --column nope").code, 1);
    EXPECT_EQ(sh("split --csv " + (dir / "missing.csv").string() + " --column step").code, 1);
}

TEST_F(CliTest, SynthValidate) {
    auto r = sh("synth-validate --repetitions 10 --null-repetitions 10 --seed 3");
    EXPECT_EQ(r.code, 0);
    for (const char* key : {"recovery_rate=", "false_pair_rate=", "f_rejection_rate="}) {
        const auto pos = r.out.find(key);
        ASSERT_NE(pos, std::string::npos) << key;
        const double v = std::stod(r.out.substr(pos + std::string(key).size()));
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(sh("synth-validate --repetitions 0").code, 1);
    const auto scenario = write("s.txt", "gamma_interaction = 0\nlength = 250\n");
    EXPECT_EQ(sh("synth-validate --repetitions 5 --scenario " + scenario.string()).code, 0);
    const auto bad = write("bad.txt", "gamma = 0\n");
    r = sh("synth-validate --repetitions 5 --scenario " + bad.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("config-error"), std::string::npos);
}

TEST_F(CliTest, AnalyzeHappyPath) {
    const auto cells = ctrig::testing::synthetic_grid(4, 40);
    write("cells.csv", ctrig::testing::grid_csv(cells));
    const auto config = write("run.cfg", "input = cells.csv\ntarget = y\nlag = 2\noutput_dir = " +
                                             (dir / "out").string() + "\n");
    const auto r = sh("analyze --config " + config.string());
    EXPECT_EQ(r.code, 0) << r.out;
    for (const char* f : {"pairs.csv", "triggers_2d.jsonl", "triggers_3d.jsonl", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    }
    const auto pairs = ctrig::read_pairs_csv(dir / "out" / "pairs.csv");
    EXPECT_FALSE(pairs.empty());
    EXPECT_NE(read("out/manifest.json").find("\"target\": \"y\""), std::string::npos);
}

TEST_F(CliTest, AnalyzeMissingInput) {
    const auto config = write("run.cfg", "target = y\n");
    const auto r = sh("analyze --config " + config.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("config.input missing"), std::string::npos);
    EXPECT_EQ(sh("analyze").code, 1);
    EXPECT_EQ(sh("analyze --config " + (dir / "none.cfg").string()).code, 1);
}

TEST_F(CliTest, AnalyzePoisonedCell) {
    auto cells = ctrig::testing::synthetic_grid(3, 70);
    Eigen::MatrixXd m = cells[2].panel.values();
    m.col(4).setConstant(1.0);
    cells[2].panel = ctrig::TimeSeriesPanel(cells[2].panel.names(), m, {}, cells[2].key.meta());
    write("cells.csv", ctrig::testing::grid_csv(cells));
    const auto config = write("run.cfg", "input = cells.csv\ntarget = y\n");
    const auto r = sh("analyze --config " + config.string() + " --output-dir " + (dir / "out").string());
    EXPECT_EQ(r.code, 2) << r.out;
    const auto manifest = read("out/manifest.json");
    EXPECT_NE(manifest.find("\"status\": \"error\""), std::string::npos);
    EXPECT_NE(manifest.find("constant-series"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out" / "pairs.csv"));
}

TEST_F(CliTest, FlagPrecedence) {
    const auto cells = ctrig::testing::synthetic_grid(2, 5);
    write("cells.csv", ctrig::testing::grid_csv(cells));
    const auto config = write("run.cfg", "input = cells.csv\ntarget = y\nalpha = 0.2\nseed = 4\nworkers = 3\n");
    auto r = sh("analyze --config " + config.string() + " --alpha 0.01 --lag auto --backend genetic "
                "--aggregation coefficient --min-i2 35 --seed 9 --output-dir " + (dir / "a").string(),
                "CTRIG_WORKERS=2");
    EXPECT_EQ(r.code, 0) << r.out;
    const auto manifest = read("a/manifest.json");
    EXPECT_NE(manifest.find("\"alpha\": 0.01"), std::string::npos);
    EXPECT_NE(manifest.find("\"lag\": \"auto\""), std::string::npos);
    EXPECT_NE(manifest.find("\"backend\": \"genetic\""), std::string::npos);
    EXPECT_NE(manifest.find("\"aggregation\": \"coefficient\""), std::string::npos);
    EXPECT_NE(manifest.find("\"min_size_I2\": 35"), std::string::npos);
    EXPECT_NE(manifest.find("\"seed\": 9"), std::string::npos);
    r = sh("analyze --config " + config.string() + " --output-dir " + (dir / "b").string(), "CTRIG_WORKERS=zero");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(sh("analyze --config " + config.string() + " --backend lasso").code, 1);
}
