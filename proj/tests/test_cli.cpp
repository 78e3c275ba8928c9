// Drives the built command-line tool as a subprocess.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(RAMPMERGE_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rampmerge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidatePrintsResolvedConfig) {
  const auto r = cli("validate " + write("ok.cfg", "demand_vph = 2400\n").string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("demand_vph = 2400\n"), std::string::npos);
  EXPECT_NE(r.output.find("controller.gain_k = 0.3\n"), std::string::npos);
}

TEST_F(Cli, ValidateReportsInvariantByKey) {
  const auto r = cli("validate " + write("bad.cfg", "timestep = -1\n").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("InvariantViolation: timestep"), std::string::npos) << r.output;
}

TEST_F(Cli, ValidateMissingFile) {
  const auto r = cli("validate " + (dir_ / "absent.cfg").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("FileNotFound"), std::string::npos) << r.output;
}

TEST_F(Cli, RunIsByteIdenticalAcrossInvocations) {
  const auto cfg = write("s.cfg", "demand_vph = 2400\npenetration_rate = 0.3\nduration = 120\n");
  const auto a = cli("run " + cfg.string() + " --out " + (dir_ / "a").string() + " --trajectories full --games full");
  const auto b = cli("run " + cfg.string() + " --out " + (dir_ / "b").string() + " --trajectories full --games full");
  ASSERT_EQ(a.code, 0) << a.output;
  ASSERT_EQ(b.code, 0) << b.output;
  for (const char* f : {"trips.csv", "trajectories.csv", "games.csv", "results.csv"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    EXPECT_GT(lines(dir_ / "a" / f), 1u) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(Cli, RunSeedOverrideChangesOutput) {
  const auto cfg = write("s.cfg", "duration = 120\n");
  ASSERT_EQ(cli("run " + cfg.string() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(cli("run " + cfg.string() + " --seed 7 --out " + (dir_ / "b").string()).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "trips.csv"), slurp(dir_ / "b" / "trips.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "a" / "trajectories.csv"));
}

TEST_F(Cli, RunAbortExitsTwo) {
  // Demand cannot drain within three times a one-second horizon.
  const auto r = cli("run " + write("s.cfg", "duration = 1\ndemand_vph = 3400\n").string() + " --out " +
                     (dir_ / "out").string());
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_NE(r.output.find("NonTermination"), std::string::npos);
}

TEST_F(Cli, SweepSingleCell) {
  const auto cfg = write("s.cfg", "duration = 120\n");
  const auto r = cli("sweep " + cfg.string() + " --demands 1400 --penetrations 0 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir_ / "light_d1400_p0_s42" / "trips.csv"));
  EXPECT_EQ(lines(dir_ / "table.csv"), 3u);  // header + ramp + mainline
}

TEST_F(Cli, SweepDefaultGrid) {
  const auto cfg = write("s.cfg", "duration = 60\n");
  const auto r = cli("sweep " + cfg.string() + " --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.output;
  std::size_t cells = 0;
  for (const auto& e : fs::directory_iterator(dir_))
    if (e.is_directory()) ++cells;
  EXPECT_EQ(cells, 12u);
  EXPECT_EQ(lines(dir_ / "table.csv"), 1u + 24u);
  EXPECT_TRUE(fs::exists(dir_ / "congested_d3400_p0.7_s42" / "results.csv"));
}

TEST_F(Cli, SweepSeedsAddAveragedRows) {
  const auto cfg = write("s.cfg", "duration = 60\n");
  const auto r =
      cli("sweep " + cfg.string() + " --demands 1400 --penetrations 0,1 --seeds 1,2 --jobs 2 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.output;
  // 2 groups x 2 penetrations x (2 seeds + 1 average)
  EXPECT_EQ(lines(dir_ / "table.csv"), 1u + 12u);
}

TEST_F(Cli, SweepWithFailingCellsExitsThree) {
  const auto cfg = write("s.cfg", "duration = 60\n");
  const auto r = cli("sweep " + cfg.string() + " --demands 1400,-5 --penetrations 0 --out " + dir_.string());
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_NE(r.output.find("failed"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "light_d1400_p0_s42" / "trips.csv"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(cli("").code, 0);
  EXPECT_NE(cli("run --trajectories sometimes").code, 0);
}
