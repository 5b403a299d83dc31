#include "nlrom/dynamics.hpp"
#include "nlrom/io.hpp"
#include "nlrom/zoo.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nlrom;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    const std::string cmd = std::string(NLROM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("nlrom_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, UnknownCommandOrFlagExitsTwo) {
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("gamma --bogus x.json").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ZooWritesLoadableModel) {
    auto r = run("zoo two-dof --w1 1 --w2 3 --quad 2,1,1,1 --cubic 1,1,1,1,0.5 -o " + path("m.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    auto p = model_from_json(read_json_file(path("m.json")));
    EXPECT_EQ(p.n, 2);
    EXPECT_EQ(p.stiffness(1, 1), 9.0);
    EXPECT_EQ(p.quad({1, 0, 0}), 1.0);
    EXPECT_EQ(p.cubic({0, 0, 0, 0}), 0.5);
}

TEST_F(Cli, ConflictingCouplingIsRejected) {
    auto r = run("zoo two-dof --w1 1 --w2 3 --quad 2,1,1,1 --quad 1,2,1,0.5 -o " + path("m.json"));
    EXPECT_NE(r.code, 0);
}

TEST_F(Cli, GammaPrintsClosedForm) {
    ASSERT_EQ(run("zoo two-dof --w1 1 --w2 3 --quad 2,1,1,1 -o " + path("m.json")).code, 0);
    auto r = run("gamma " + path("m.json") + " --method nf --master 1");
    ASSERT_EQ(r.code, 0) << r.out;
    auto mm = make_two_dof(1.0, 3.0, {{1, 0, 0, 1.0}}, {});
    EXPECT_EQ(std::stod(r.out), gamma_closed_form(mm, 0, GammaMethod::NF));
    EXPECT_NE(r.out.find("-0.1055555555555555"), std::string::npos);
}

TEST_F(Cli, ResonantModelExitsOne) {
    ASSERT_EQ(run("zoo two-dof --w1 1 --w2 2 --quad 2,1,1,1 -o " + path("m.json")).code, 0);
    auto r = run("gamma " + path("m.json") + " --method nf --master 1");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("mode 2"), std::string::npos) << r.out;
    EXPECT_EQ(run("rom " + path("m.json") + " --method graph -o " + path("r.json")).code, 1);
}

TEST_F(Cli, StepModalRomBackboneChain) {
    ASSERT_EQ(run("zoo vk-beam --modes 3 -o " + path("beam.json")).code, 0);
    auto st = run("step --model " + path("beam.json") + " -o " + path("step.json"));
    ASSERT_EQ(st.code, 0) << st.out;
    json sj = read_json_file(path("step.json"));
    EXPECT_TRUE(sj.contains("provenance"));
    ASSERT_EQ(run("modal " + path("beam.json") + " -o " + path("modal.json")).code, 0);
    auto r = run("rom " + path("beam.json") + " --method nf --masters 1 -o " + path("rom.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    Rom rom = rom_from_json(read_json_file(path("rom.json")));
    EXPECT_EQ(rom.reduced.masters, std::vector<int>{0});
    auto b = run("backbone " + path("rom.json") + " --a-max 0.1 -o " + path("bb.csv"));
    ASSERT_EQ(b.code, 0) << b.out;
    Curve c = curve_from_csv(slurp(path("bb.csv")));
    EXPECT_GT(c.points.size(), 5u);
    EXPECT_GT(c.points.back().omega, 1.0);
}

TEST_F(Cli, FrfAndCompare) {
    ASSERT_EQ(run("zoo two-dof --w1 1 --w2 3.3 --quad 2,1,1,0.2 --cubic 1,1,1,1,1 -o " + path("m.json")).code, 0);
    ASSERT_EQ(run("rom " + path("m.json") + " --method graph --damping 0.02 -o " + path("g.json")).code, 0);
    ASSERT_EQ(run("rom " + path("m.json") + " --method ice-closed -o " + path("s.json")).code, 0);
    auto f = run("frf " + path("g.json") + " --omega-min 0.8 --omega-max 1.2 --force 0.005 -o " + path("f.csv"));
    ASSERT_EQ(f.code, 0) << f.out;
    EXPECT_FALSE(curve_from_csv(slurp(path("f.csv"))).points.empty());
    auto c = run("compare " + path("g.json") + " " + path("s.json") + " --amplitudes 0.01,0.1");
    EXPECT_EQ(c.code, 0) << c.out;
    EXPECT_FALSE(c.out.empty());
}

TEST_F(Cli, ValidateReportsChecks) {
    ASSERT_EQ(run("zoo two-dof --w1 1 --w2 3.3 --quad 2,1,1,0.2 --quad 1,1,1,0.3 --cubic 1,1,1,1,1 -o " +
                  path("m.json"))
                  .code,
              0);
    auto v = run("validate " + path("m.json") + " --master 1");
    EXPECT_EQ(v.code, 0) << v.out;
    EXPECT_NE(v.out.find("PASS"), std::string::npos);
    EXPECT_EQ(v.out.find("FAIL"), std::string::npos) << v.out;
}

TEST_F(Cli, MalformedModelNamesField) {
    std::ofstream(path("bad.json")) << R"({"n": 2, "mass": "identity", "quad": [], "cubic": []})";
    auto r = run("gamma " + path("bad.json") + " --method nf");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.out.find("stiffness"), std::string::npos) << r.out;
}
