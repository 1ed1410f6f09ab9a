#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(SPR3_BENCH_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, IkPureHeave) {
    const auto r = run("ik 60 0 0");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* k : {"l1", "l2", "l3"}) EXPECT_NEAR(j[k].get<double>(), 60.0, 1e-12);
}

TEST(Cli, FkOfIkWithinEnvelope) {
    const auto ik = run("ik 70 2 -1");
    ASSERT_EQ(ik.status, 0);
    const auto l = nlohmann::json::parse(ik.out);
    char args[256];
    std::snprintf(args, sizeof args, "fk %.17g %.17g %.17g --iters 30", l["l1"].get<double>(),
                  l["l2"].get<double>(), l["l3"].get<double>());
    const auto fk = run(args);
    ASSERT_EQ(fk.status, 0);
    const auto j = nlohmann::json::parse(fk.out);
    EXPECT_NEAR(j["Z"].get<double>(), 70.0, 0.1);
    EXPECT_NEAR(j["alpha_deg"].get<double>(), 2.0, 0.01);
    EXPECT_NEAR(j["beta_deg"].get<double>(), -1.0, 0.01);
    EXPECT_EQ(j["iterations"].get<int>(), 30);
}

TEST(Cli, FkPureHeaveFixedPoint) {
    const auto r = run("fk 60 60 60 --z-init 60");
    ASSERT_EQ(r.status, 0);
    EXPECT_NEAR(nlohmann::json::parse(r.out)["Z"].get<double>(), 60.0, 1e-12);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").status, 2);
    EXPECT_EQ(run("ik 1 2").status, 2);
    EXPECT_EQ(run("no-such-command").status, 2);
    EXPECT_EQ(run("ik 50 0 0 --geometry 1150,500,-1").status, 2);
}

TEST(Cli, VerifyBounds) {
    const auto empty = run("verify-bounds --samples 0");
    EXPECT_EQ(empty.status, 0);
    EXPECT_TRUE(nlohmann::json::parse(empty.out)["passed"].get<bool>());
    const auto bad = run("verify-bounds --samples 10 --geometry 1150,500,0");
    EXPECT_EQ(bad.status, 1);
    EXPECT_FALSE(nlohmann::json::parse(bad.out)["passed"].get<bool>());
    const auto small = run("verify-bounds --samples 30");
    EXPECT_EQ(small.status, 0);
}

TEST(Cli, Opcount) {
    const auto r = run("opcount");
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("13040"), std::string::npos);
    EXPECT_NE(r.out.find("404"), std::string::npos);
}

TEST(Cli, TrajectoryByteIdentical) {
    const std::string dir = ::testing::TempDir();
    const std::string a = dir + "/spr3_traj_a.csv", b = dir + "/spr3_traj_b.csv";
    ASSERT_EQ(run("trajectory --duration 2 --out " + a).status, 0);
    ASSERT_EQ(run("trajectory --duration 2 --out " + b).status, 0);
    const std::string ca = slurp(a);
    EXPECT_EQ(std::count(ca.begin(), ca.end(), '\n'), 1 + 2 * 201);
    EXPECT_EQ(ca, slurp(b));
}

TEST(Cli, ParasiticMapSummary) {
    const auto r = run("parasitic-map --resolution 4 --bins 5");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("bin,", 0), 0u);
}
