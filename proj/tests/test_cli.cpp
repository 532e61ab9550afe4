#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "thermoq/experiments.hpp"
#include "thermoq/io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Proc {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "thermoq_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Proc run_cli(const std::string& args, const std::string& env = "") {
  const fs::path dir = scratch();
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" +
                          THERMOQ_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Proc p;
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  p.out = slurp(out);
  p.err = slurp(err);
  return p;
}

TEST(Cli, StrategyTableHasThreeRows) {
  const Proc p = run_cli("strategy-table");
  ASSERT_EQ(p.code, 0) << p.err;
  std::istringstream in(p.out);
  const auto rows = thermoq::io::read_csv(in);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "strategy");
  EXPECT_EQ(rows[1][0], "ramsey");
}

TEST(Cli, ValidationFailureExitsOneWithErrorObject) {
  const Proc p = run_cli("bound-qubit --w -1");
  EXPECT_EQ(p.code, 1);
  EXPECT_TRUE(p.out.empty());
  const json e = json::parse(p.err);
  EXPECT_EQ(e["error"]["kind"], "validation");
  EXPECT_EQ(e["error"]["exit_code"], 1);
  EXPECT_FALSE(e["error"]["message"].get<std::string>().empty());

  EXPECT_EQ(run_cli("bound-qubit --no-such-flag 1").code, 1);
  EXPECT_EQ(run_cli("bath-table --T-range 0:1:cubic:3").code, 1);
  EXPECT_EQ(run_cli("").code, 1);
}

TEST(Cli, NonConvergenceExitsTwo) {
  // The principal value diverges logarithmically at zero ohmicity.
  const Proc p = run_cli("bath-table --alpha 0 --T 0.001");
  EXPECT_EQ(p.code, 2) << p.out;
  const json e = json::parse(p.err);
  EXPECT_EQ(e["error"]["exit_code"], 2);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const std::string args = "bound-lamb --w 1 --omega 5 --alpha 1 "
                           "--T-range 0.01:2:log:40";
  const Proc a = run_cli(args);
  const Proc b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Proc one = run_cli(args, "THERMOQ_THREADS=1");
  const Proc four = run_cli(args, "THERMOQ_THREADS=4");
  EXPECT_EQ(one.out, a.out);
  EXPECT_EQ(four.out, a.out);
  EXPECT_EQ(run_cli(args, "THERMOQ_THREADS=abc").code, 1);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path cfg = scratch() / "cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"command": "bath-table", "w-range": "0.5:1:lin:2", "T": 2.0})";
  }
  const Proc p = run_cli("bath-table --config \"" + cfg.string() + "\" --T 0.5");
  ASSERT_EQ(p.code, 0) << p.err;
  std::istringstream in(p.out);
  const auto rows = thermoq::io::read_csv(in);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "0.5");
  EXPECT_EQ(rows[1][1], "0.5");
  EXPECT_EQ(rows[2][0], "1");

  const fs::path bad = scratch() / "bad.json";
  {
    std::ofstream f(bad);
    f << R"({"bogus": 1})";
  }
  EXPECT_EQ(run_cli("bath-table --config \"" + bad.string() + "\"").code, 1);
  EXPECT_EQ(run_cli("bath-table --config /nonexistent/cfg.json").code, 1);
}

TEST(Cli, JsonFormatAndOutputFile) {
  const fs::path out = scratch() / "out.json";
  fs::remove(out);
  const Proc p = run_cli("bound-qubit --T-range 0.5:1:lin:2 --format json "
                         "--output \"" + out.string() + "\"");
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_TRUE(p.out.empty());
  const json j = json::parse(slurp(out));
  EXPECT_EQ(j["meta"]["artifact_version"], thermoq::cli::kArtifactVersion);
  EXPECT_EQ(j["meta"]["command"], "bound-qubit");
  EXPECT_EQ(j["columns"][0], "T");
  ASSERT_EQ(j["rows"].size(), 2u);
}

TEST(Cli, MatchesLibraryRun) {
  const std::string flags = "--N 2,3 --gdt-range 1e-3:1:log:7";
  const Proc p = run_cli("collective-scan " + flags);
  ASSERT_EQ(p.code, 0) << p.err;
  const auto cfg = thermoq::cli::make_config(
      "collective-scan", json::object(),
      {{"N", "2,3"}, {"gdt-range", "1e-3:1:log:7"}});
  std::ostringstream expected;
  thermoq::io::write_csv(expected, thermoq::cli::run(cfg).table);
  EXPECT_EQ(p.out, expected.str());
}

TEST(Cli, Fig3CommandProducesFullScan) {
  const Proc p =
      run_cli("bound-lamb --w 1 --omega 5 --alpha 1 --T-range 0.01:2:log:100");
  ASSERT_EQ(p.code, 0) << p.err;
  std::istringstream in(p.out);
  EXPECT_EQ(thermoq::io::read_csv(in).size(), 101u);
}

}  // namespace
