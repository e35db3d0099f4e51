#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ottokz/io.hpp"

namespace fs = std::filesystem;
using namespace ottokz;

namespace {

const std::string kBase = R"([medium]
L = 20
h1 = 70
h2 = -5

[baths]
energizing_mu = 0.995
energizing_mu_prime = 1
relaxing_mu = 1
relaxing_mu_prime = 0
ground_population_min = 0.97

[strokes]
tau1 = 0.01
tau2 = 100
)";

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("ottokz_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) const {
        fs::path p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    }

    static std::string read(const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    int ottokz(const std::string& args, const std::string& env = "") const {
        const std::string cmd = env + " '" + std::string(OTTOKZ_EXE) + "' " + args + " > '" +
                                (dir_ / "stdout.txt").string() + "' 2> '" + (dir_ / "stderr.txt").string() + "'";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string err() const { return read(dir_ / "stderr.txt"); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunWritesResultsAndManifest) {
    const fs::path cfg = write("a.cfg", kBase);
    const fs::path out = dir_ / "out";
    ASSERT_EQ(ottokz("run --config " + cfg.string() + " --out " + out.string() + " --jobs 2"), 0) << err();
    const json run = json::parse(read(out / "run.json"));
    EXPECT_EQ(run["L"], 20);
    EXPECT_EQ(run["totals"]["class"], "engine");
    EXPECT_TRUE(run["W_inf_numeric"].is_number());
    EXPECT_EQ(run["converged"], true);

    const std::string modes = read(out / "modes.csv");
    EXPECT_EQ(std::count(modes.begin(), modes.end(), '\n'), 11);
    EXPECT_NE(modes.find("\r\n"), std::string::npos);

    const json manifest = json::parse(read(out / "manifest.json"));
    EXPECT_EQ(manifest["command"], "run");
    EXPECT_EQ(manifest["tool_version"], kToolVersion);
    EXPECT_EQ(manifest["config_hash"], run["config_hash"]);
    EXPECT_EQ(manifest["config_hash"], config_hash(load_config(cfg.string())));
    EXPECT_EQ(manifest["outputs"].size(), 3u);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
    const fs::path bad = write("bad.cfg", "[medium]\nL = 20\nh1 = \"x\"\n");
    EXPECT_EQ(ottokz("run --config " + bad.string() + " --out " + dir_.string()), 2);
    EXPECT_NE(err().find("medium.h1"), std::string::npos) << err();
    EXPECT_NE(err().find(":3:"), std::string::npos) << err();
    EXPECT_EQ(ottokz("run --out " + dir_.string()), 2);
    EXPECT_EQ(ottokz("run --config " + (dir_ / "missing.cfg").string()), 2);
    EXPECT_EQ(ottokz("frobnicate"), 2);
    const fs::path no_sweep = write("ns.cfg", kBase);
    EXPECT_EQ(ottokz("sweep --config " + no_sweep.string() + " --out " + dir_.string()), 2);
    EXPECT_NE(err().find("[sweep]"), std::string::npos);
}

TEST_F(Cli, SimulationErrorExitsThree) {
    const fs::path cfg = write("sim.cfg", kBase + "steady_method = evolve\n[integrator]\nmax_steps = 300\n");
    EXPECT_EQ(ottokz("run --config " + cfg.string() + " --out " + dir_.string()), 3);
    EXPECT_NE(err().find("steady state not reached"), std::string::npos) << err();
}

TEST_F(Cli, FitAssertOnSyntheticSweep) {
    const fs::path cfg = write("fit.cfg", kBase + "[sweep]\naxis = tau2\nvalues = 1\nw_inf = -100\nfit_min = 1\n");
    auto make_csv = [&](const char* name, double slope) {
        std::string csv = csv_row({"tau2", "W"});
        for (double t : {10.0, 20.0, 50.0, 100.0, 200.0, 500.0}) {
            csv += csv_row({format_double(t), format_double(-100.0 + 7.0 * std::pow(t, slope))});
        }
        return write(name, csv);
    };
    const fs::path good = make_csv("good.csv", -0.52);
    const fs::path off = make_csv("off.csv", -0.8);
    const std::string base = "fit --config " + cfg.string() + " --out " + dir_.string() + " --csv ";

    ASSERT_EQ(ottokz(base + good.string() + " --assert --tol 0.05"), 0) << err();
    const json fit = json::parse(read(dir_ / "fit.json"));
    EXPECT_NEAR(fit["fit"]["exponent"].get<double>(), -0.52, 1e-12);
    EXPECT_EQ(fit["W_inf_source"], "value");
    EXPECT_EQ(fit["assert_pass"], true);
    EXPECT_NEAR(fit["tau_opt"].get<double>(), std::pow(3.0 * 7.0 / (2.0 * 100.0), 2.0), 1e-9);

    EXPECT_EQ(ottokz(base + off.string() + " --assert --tol 0.05"), 4);
    EXPECT_EQ(ottokz(base + off.string()), 0);
    EXPECT_EQ(ottokz(base + off.string() + " --tol 0.05"), 2);

    const fs::path few = write("few.csv", "tau2,W\r\n10,-90\r\n20,-95\r\n");
    EXPECT_EQ(ottokz(base + few.string()), 4);
    EXPECT_EQ(ottokz(base + (dir_ / "none.csv").string()), 4);
}

TEST_F(Cli, SinglePointSweepMatchesRun) {
    const fs::path cfg = write("one.cfg", kBase + "[sweep]\naxis = tau2\nvalues = 100\n");
    ASSERT_EQ(ottokz("run --config " + cfg.string() + " --out " + dir_.string()), 0) << err();
    ASSERT_EQ(ottokz("sweep --config " + cfg.string() + " --out " + dir_.string()), 0) << err();
    const json run = json::parse(read(dir_ / "run.json"));
    const auto rows = parse_csv(read(dir_ / "sweep.csv"));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(std::stod(rows[1][1]), run["totals"]["W"].get<double>());
    EXPECT_EQ(std::stod(rows[1][4]), run["totals"]["eta"].get<double>());
    EXPECT_EQ(std::stod(rows[1][8]), run["W_inf_numeric"].get<double>());
}

TEST_F(Cli, SweepOutputIndependentOfJobs) {
    const fs::path cfg = write("sw.cfg", kBase + "[sweep]\naxis = tau2\nstart = 10\nstop = 1000\npoints = 5\n");
    ASSERT_EQ(ottokz("sweep --config " + cfg.string() + " --out " + (dir_ / "j1").string() + " --jobs 1"), 0);
    ASSERT_EQ(ottokz("sweep --config " + cfg.string() + " --out " + (dir_ / "j4").string() + " --jobs 4"), 0);
    ASSERT_EQ(ottokz("sweep --config " + cfg.string() + " --out " + (dir_ / "env").string(), "OTTOKZ_JOBS=3"), 0);
    const std::string a = read(dir_ / "j1" / "sweep.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, read(dir_ / "j4" / "sweep.csv"));
    EXPECT_EQ(a, read(dir_ / "env" / "sweep.csv"));
}

TEST_F(Cli, BoundWritesJson) {
    const fs::path cfg = write("b.cfg", R"([medium]
L = 100
h1 = 70
h2 = 30
[baths]
energizing_mu = 0.995
energizing_mu_prime = 1
relaxing_mu = 0.95
relaxing_mu_prime = 1
[strokes]
tau1 = 0.1
tau2 = 10
)");
    ASSERT_EQ(ottokz("bound --config " + cfg.string() + " --out " + dir_.string()), 0) << err();
    const json b = json::parse(read(dir_ / "bound.json"));
    const double eta_max = b["bound"]["eta_max"].get<double>();
    EXPECT_GT(eta_max, 0.0);
    EXPECT_LT(eta_max, 1.0);

    const fs::path pure_loss = write("pl.cfg", kBase);
    EXPECT_EQ(ottokz("bound --config " + pure_loss.string() + " --out " + dir_.string()), 2);
}
