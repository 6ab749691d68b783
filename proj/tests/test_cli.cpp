#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
    int exit_code;
    std::string out;
    std::string err;
};

/// Runs the CLI through the shell, capturing stdout and stderr separately.
Run run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const fs::path err_file = fs::temp_directory_path() / ("ksf_cli_err_" + std::to_string(counter++));
    const std::string cmd = env + " " + KSF_CLI_PATH + " " + args + " 2>" + err_file.string();
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    std::ifstream in(err_file);
    std::string err((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return {WEXITSTATUS(status), out, err};
}

std::string sample(const std::string& name) { return std::string(KSF_SAMPLES_DIR) + "/" + name; }

Json without_manifest(Json j) {
    j.erase("manifest");
    return j;
}

}  // namespace

TEST(Cli, GenerateRoundTrip) {
    const fs::path out = fs::temp_directory_path() / "ksf_cli_peres_completed.json";
    auto r = run_cli("generate --complete --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::ifstream in(out);
    const std::string first((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const Json doc = Json::parse(first);
    EXPECT_EQ(doc["directions"].size(), 57u);
    EXPECT_EQ(doc["triads"].size(), 40u);

    // Reading the file back and regenerating yields the same bytes.
    r = run_cli("verify --set " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const Json v = Json::parse(r.out);
    EXPECT_EQ(v["status"], "Uncolorable");
    EXPECT_EQ(v["N"], 40);
    EXPECT_DOUBLE_EQ(v["threshold"].get<double>(), 1.0 / 40.0);
    EXPECT_EQ(v["cross_check"]["status"], "Uncolorable");
    EXPECT_TRUE(v["witness"].is_null());
    EXPECT_EQ(v["manifest"]["subcommand"], "verify");

    const auto again = run_cli("generate --complete");
    EXPECT_EQ(again.out, first);
}

TEST(Cli, VerifyColorableControls) {
    for (const char* name : {"axes.json", "shared-z.json"}) {
        const auto r = run_cli("verify --set " + sample(name));
        ASSERT_EQ(r.exit_code, 0) << r.err;
        const Json v = Json::parse(r.out);
        EXPECT_EQ(v["status"], "Colorable");
        EXPECT_TRUE(v["threshold"].is_null());
        EXPECT_EQ(v["witness"].size(), v["directions"].get<std::size_t>());
    }
    const auto peres = Json::parse(run_cli("verify --set peres --complete").out);
    EXPECT_EQ(peres["status"], "Uncolorable");
}

TEST(Cli, VerifyInputErrors) {
    auto r = run_cli("verify --set " + sample("non-orthogonal.json"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("triad 0"), std::string::npos) << r.err;
    r = run_cli("verify --set /does/not/exist.json");
    EXPECT_EQ(r.exit_code, 2);
    r = run_cli("verify");
    EXPECT_EQ(r.exit_code, 2);
    r = run_cli("frobnicate");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, SimulateZeroNoiseIsExcluded) {
    const auto r = run_cli("simulate --config " + sample("zero-noise.json"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const Json rep = Json::parse(r.out);
    EXPECT_EQ(rep["verdict"], "Excluded");
    EXPECT_EQ(rep["seed"], 1);
    EXPECT_EQ(rep["N"], 40);
    EXPECT_EQ(rep["config_digest"].get<std::string>().size(), 64u);
    EXPECT_EQ(rep["manifest"]["config"]["trials_per_triad"], 10000);
}

TEST(Cli, SimulateOverridesAndThreadIndependence) {
    const std::string args = "simulate --config " + sample("jittered.json") + " --trials 3000 --seed 5";
    const auto one = run_cli(args, "KSF_THREADS=1");
    const auto four = run_cli(args, "KSF_THREADS=4");
    ASSERT_EQ(one.exit_code, 0) << one.err;
    ASSERT_EQ(four.exit_code, 0) << four.err;
    const Json a = Json::parse(one.out), b = Json::parse(four.out);
    EXPECT_EQ(a["seed"], 5);
    EXPECT_EQ(a["trials_per_triad"], 3000);
    EXPECT_EQ(without_manifest(a).dump(), without_manifest(b).dump());

    const auto joint = Json::parse(run_cli(args + " --mode joint").out);
    EXPECT_NE(joint["config_digest"], a["config_digest"]);
    EXPECT_EQ(run_cli(args, "KSF_THREADS=zero").exit_code, 2);
}

TEST(Cli, SimulateColorableSetIsInputError) {
    const auto r = run_cli("simulate --config " + sample("zero-noise.json") + " --set " + sample("axes.json"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("colorable"), std::string::npos) << r.err;
}

TEST(Cli, Analyze) {
    auto r = run_cli("analyze --set peres-completed --counts " + sample("clean-trials.csv"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const Json rep = Json::parse(r.out);
    EXPECT_EQ(rep["epsilon_max"], 0.0);
    EXPECT_EQ(rep["verdict"], "Excluded");  // 500 clean trials per triad > 328 needed
    EXPECT_TRUE(rep["seed"].is_null());

    r = run_cli("analyze --set peres-completed --counts " + sample("malformed.csv"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
}

TEST(Cli, Ghz) {
    const auto r = run_cli("ghz --trials 2000 --seed 1");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const Json rep = Json::parse(r.out);
    EXPECT_EQ(rep["mode"], "ghz");
    EXPECT_EQ(rep["verdict"], "Excluded");
    EXPECT_DOUBLE_EQ(rep["threshold"].get<double>(), 0.25);
    EXPECT_EQ(rep["lhv_max_satisfiable"], 3);
    ASSERT_EQ(rep["contexts"].size(), 4u);
    EXPECT_EQ(rep["contexts"][1]["target_parity"], -1);
}
