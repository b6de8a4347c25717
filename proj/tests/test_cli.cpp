#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code{-1};
    std::string out;
    std::string err;
};

fs::path scratch() {
    auto p = fs::temp_directory_path() / "hcs_cli_tests";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in{p, std::ios::binary};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string &args) {
    const auto err_file = scratch() / "stderr.txt";
    const std::string cmd =
        std::string{HCS_CLI} + " " + args + " 2>" + err_file.string();
    Run r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err_file);
    return r;
}

std::string data(const char *name) { return (fs::path{HCS_DATA_DIR} / name).string(); }

} // namespace

TEST(Cli, EvaluateIsDeterministic) {
    const auto a = run("evaluate " + data("us_like_scenario.json") + " --samples 20000 --seed 3");
    const auto b = run("evaluate " + data("us_like_scenario.json") + " --samples 20000 --seed 3");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto doc = nlohmann::json::parse(a.out);
    EXPECT_NEAR(doc["l_index"].get<double>(),
                doc["q_life"].get<double>() * doc["e_life"].get<double>(), 1e-12);
}

TEST(Cli, SwedenHasFullEnsurance) {
    const auto r = run("evaluate " + data("sweden_like_scenario.json") + " --samples 1000");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["p_ei"].get<double>(), 1.0);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("evaluate /nonexistent.json").code, 1);
    EXPECT_EQ(run("bogus").code, 1);
    EXPECT_EQ(run("evaluate " + data("us_like_scenario.json") + " --year 1901").code, 1);

    const auto bad = scratch() / "bad.json";
    std::ofstream{bad} << "{ not json";
    const auto r = run("evaluate " + bad.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("\"parse\""), std::string::npos) << r.err;

    // A scenario whose allocation block has a baseline aid above the cap is a constraint failure.
    auto doc = nlohmann::json::parse(slurp(data("us_like_scenario.json")));
    doc["profile_ref"] = data("us_like.json");
    doc["allocation"]["baseline"][0] = 200000.0;
    const auto infeasible = scratch() / "infeasible.json";
    std::ofstream{infeasible} << doc.dump();
    const auto o = run("optimize " + infeasible.string());
    EXPECT_EQ(o.code, 2) << o.err;
    EXPECT_NE(o.err.find("constraint"), std::string::npos) << o.err;
}

TEST(Cli, CompareNeedsTwoScenarios) {
    const auto r = run("compare " + data("us_like_scenario.json"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("usage"), std::string::npos);
}

TEST(Cli, CompareDuplicatesKeepInputOrder) {
    const auto prefix = (scratch() / "cmp").string();
    const auto r = run("compare " + data("us_like_scenario.json") + " " +
                       data("us_like_scenario.json") + " --samples 5000 --out " + prefix);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(slurp(prefix + ".json"))["reports"];
    ASSERT_EQ(doc.size(), 2u);
    EXPECT_EQ(doc[0]["rank"], 1);
    EXPECT_EQ(doc[1]["rank"], 2);
    EXPECT_EQ(doc[0]["l_index"], doc[1]["l_index"]);
    EXPECT_TRUE(fs::exists(prefix + ".csv"));
    EXPECT_TRUE(fs::exists(prefix + "_long.csv"));
}

TEST(Cli, HistoryStrictAndLenient) {
    const auto strict = run("history " + data("us_like_scenario.json") + " --from 1980 --to 1990");
    EXPECT_EQ(strict.code, 1);
    EXPECT_NE(strict.err.find("1985"), std::string::npos) << strict.err;
    const auto lenient = run("history " + data("us_like_scenario.json") +
                             " --from 2006 --to 2010 --lenient --samples 2000");
    ASSERT_EQ(lenient.code, 0) << lenient.err;
    EXPECT_NE(lenient.err.find("warning"), std::string::npos);
}

TEST(Cli, OptimizeFullBudget) {
    const auto a = run("optimize " + data("us_like_scenario.json") + " --budget 300000");
    const auto b = run("optimize " + data("us_like_scenario.json") + " --budget 300000");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto doc = nlohmann::json::parse(a.out);
    EXPECT_TRUE(doc["feasible"].get<bool>());
    double sum = 0.0;
    for (const auto &v : doc["f"]) {
        sum += v.get<double>();
    }
    EXPECT_NEAR(sum, 300000.0, 300000.0 * 1e-12);
}

TEST(Cli, OptimizeOneStepIsSingleCategory) {
    const auto r = run("optimize " + data("us_like_scenario.json") + " --budget 1000 --step 1000 --solver greedy");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    int nonzero = 0;
    for (const auto &v : doc["f"]) {
        nonzero += v.get<double>() > 0.0 ? 1 : 0;
    }
    EXPECT_EQ(nonzero, 1);
}

TEST(Cli, OptimizeGridSolver) {
    const auto r = run("optimize " + data("us_like_scenario.json") +
                       " --solver grid --dims 1,2,3 --chunks 10");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["solver"], "grid");
    // 66 compositions, of which the aid cap leaves 30 (at most two 30000 chunks of aid)
    EXPECT_EQ(doc["iterations"], 30);
}
