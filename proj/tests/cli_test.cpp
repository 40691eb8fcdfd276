// Copyright 2026 The esrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string &args) {
    const std::string cmd = std::string(ESRSIM_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE *p = popen(cmd.c_str(), "r");
    if (p == nullptr) {
        return r;
    }
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) {
        r.out.append(buf, n);
    }
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path &path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::size_t lines(const std::string &s) {
    std::size_t n = 0;
    for (char c : s) {
        n += c == '\n';
    }
    return n;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("esrsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const char *name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, export_rect_pi) {
    Result r = run("export rect");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(lines(r.out), 130u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "0\t38.46\t0");
}

TEST_F(Cli, export_bb1_half_pi) {
    Result r = run("export bb1 --theta 1.5707963267948966 --out " + path("bb1.tsv"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(lines(slurp(path("bb1.tsv"))), 585u);
}

TEST_F(Cli, export_comb_stays_under_bound) {
    Result r = run("export comb");
    ASSERT_EQ(r.code, 0);
    std::istringstream is(r.out);
    double t, i, q, peak = 0;
    while (is >> t >> i >> q) {
        peak = std::max(peak, std::hypot(i, q));
    }
    EXPECT_LE(peak, 5 * 1.16 + 1e-6);
    EXPECT_GT(peak, 5.0);
}

TEST_F(Cli, run_twice_is_byte_identical) {
    const std::string args = " --sigma-grid -0.2,0,0.2 --packets 31";
    ASSERT_EQ(run("run fig2 --out " + path("a.csv") + args).code, 0);
    ASSERT_EQ(run("run fig2 --threads 1 --out " + path("b.csv") + args).code, 0);
    const std::string a = slurp(path("a.csv")), b = slurp(path("b.csv"));
    EXPECT_FALSE(a.empty());
    // The thread count is recorded in the header; data lines must match.
    EXPECT_EQ(a.substr(a.find("sigma,")), b.substr(b.find("sigma,")));
    ASSERT_EQ(run("run fig2 --out " + path("c.csv") + args).code, 0);
    EXPECT_EQ(a, slurp(path("c.csv")));
}

TEST_F(Cli, rerun_from_data_file_header) {
    ASSERT_EQ(run("run fig2 --sigma-grid 0,0.4 --packets 21 --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run("run --config " + path("a.csv") + " --out " + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(Cli, plot_stub_names_columns) {
    Result r = run("run fig2 --sigma-grid 0,0.2 --packets 11 --plot --out " + path("f.csv"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, path("f.csv") + "\n" + path("f.gp") + "\n");
    const std::string gp = slurp(path("f.gp"));
    EXPECT_NE(gp.find("set xlabel 'sigma'"), std::string::npos);
    EXPECT_NE(gp.find("'f.csv' using 1:5 with lines"), std::string::npos);
    EXPECT_EQ(gp.find("using 1:6"), std::string::npos);
}

TEST_F(Cli, sweep_writes_curve) {
    Result r = run("sweep --packets 21 --offsets -10,0,10 --out " + path("s.csv"));
    ASSERT_EQ(r.code, 0);
    const std::string s = slurp(path("s.csv"));
    EXPECT_NE(s.find("offset_mhz,echo_amplitude\n"), std::string::npos);
    EXPECT_NE(s.find("\n10,"), std::string::npos);
}

TEST_F(Cli, exit_codes) {
    EXPECT_EQ(run("run fig9").code, 1);
    EXPECT_EQ(run("run fig3 --sigma-grid 0.1").code, 1);
    EXPECT_EQ(run("run fig2 --error-scope sideways").code, 1);
    EXPECT_EQ(run("--bogus").code, 1);
    {
        std::ofstream(path("bad.json")) << R"({"tau_ns": "x"})";
    }
    EXPECT_EQ(run("run fig2 --config " + path("bad.json")).code, 1);
    EXPECT_EQ(run("run fig2 --packets 21 --sigma-grid -1.5").code, 2);
    EXPECT_EQ(run("export rect --rabi -3").code, 2);
    EXPECT_EQ(run("run fig2 --config " + path("missing.json")).code, 3);
    EXPECT_EQ(run("run fig2 --packets 11 --sigma-grid 0 --out /nonexistent_dir/x.csv").code, 3);
    EXPECT_EQ(run("--help").code, 0);
}
