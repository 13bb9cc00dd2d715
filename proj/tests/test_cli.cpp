#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "nnjump/cli/config.hpp"
#include "nnjump/cli/outputs.hpp"
#include "nnjump/cli/run.hpp"
#include "nnjump/cli/scenario.hpp"
#include "nnjump/error.hpp"

using namespace nnjump;
using namespace nnjump::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nnjump_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) {
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string bin() { return std::string(NNJUMP_BINARY); }
std::string scenario(const std::string& name) { return std::string(NNJUMP_SCENARIO_DIR) + "/" + name + ".conf"; }

std::string config_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    return e.what();
  }
  ADD_FAILURE() << "expected a Config error for:\n" << text;
  return {};
}

}  // namespace

TEST(Cli, PresetScenariosRoundTrip) {
  for (const auto& name : presets::names()) {
    const auto s = parse_scenario("model.preset = \"" + name + "\"\n");
    const auto text = serialize_scenario(s);
    const auto back = parse_scenario(text);
    EXPECT_EQ(back, s) << name << "\n" << text;
    EXPECT_EQ(serialize_scenario(back), text) << name;
  }
}

TEST(Cli, ShippedScenariosRoundTrip) {
  for (const auto& entry : fs::directory_iterator(NNJUMP_SCENARIO_DIR)) {
    if (entry.path().stem() == "bad_alpha") continue;
    const auto s = load_scenario(entry.path().string());
    EXPECT_EQ(parse_scenario(serialize_scenario(s)), s) << entry.path();
  }
}

TEST(Cli, RandomScenariosRoundTrip) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Scenario s;
    switch (i % 3) {
      case 0: s.model = presets::cir(3.0 * u(rng), 0.1 + u(rng), -2.0 * u(rng)); break;
      case 1: s.model = presets::cbi(u(rng), 0.1 + u(rng), 2.0 * u(rng) - 1.0); break;
      default: s.model = presets::stable_cbi(u(rng), u(rng), -u(rng), 0.1 + u(rng), 1.05 + 0.9 * u(rng));
    }
    s.config.dt_max = std::pow(10.0, -4.0 + 2.0 * u(rng));
    s.config.horizon = 0.1 + 3.0 * u(rng);
    s.config.n_paths = 1 + static_cast<std::size_t>(1e5 * u(rng));
    s.config.root_seed = rng();
    s.config.eps = 1e-3 + u(rng) * 0.1;
    s.x0 = 5.0 * u(rng);
    s.t_grid = {0.5 * s.config.horizon, s.config.horizon};
    s.outputs.path_cap = static_cast<std::size_t>(20 * u(rng));
    s.diagnostics.budget = u(rng);
    s.gadget.gamma = 0.5 + u(rng);
    s.gadget.k_max = 1 + i % 12;
    const auto text = serialize_scenario(s);
    const auto back = parse_scenario(text);
    EXPECT_EQ(back, s) << text;
    EXPECT_EQ(back.config.root_seed, s.config.root_seed);
  }
}

TEST(Cli, ConfigErrorsNameTheKey) {
  EXPECT_NE(config_error("model.preset = \"cbi\"\nconfig.bogus = 1\n").find("config.bogus"), std::string::npos);
  EXPECT_NE(config_error("model.preset = \"cbi\"\nconfig.dt = \"fast\"\n").find("config.dt"), std::string::npos);
  EXPECT_NE(config_error("model.preset = \"nope\"\n").find("model.preset"), std::string::npos);
  EXPECT_NE(config_error("model.preset = \"cbi\"\nmodel.nu0 = {type = \"weird\"}\n").find("model.nu0"),
            std::string::npos);
  config_error("model.preset = \"cbi\"\nconfig.t_grid = [0.5, \n");
}

TEST(Cli, DocumentSyntax) {
  const auto doc = parse_document("# c\na.b = 1 # trailing\nc = [1, 2,\n 3]\nd = {x = \"s\", y = true}\n");
  ASSERT_EQ(doc.size(), 3u);
  EXPECT_EQ(doc[0].first, "a.b");
  EXPECT_EQ(doc[1].second.as_array("c").size(), 3u);
  EXPECT_EQ(find(doc[2].second.as_record("d"), "x")->as_string("d.x"), "s");
  EXPECT_EQ(parse_document(serialize_document(doc)), doc);
  const auto big = parse_document("seed = 18446744073709551615\n");
  EXPECT_EQ(big[0].second.as_u64("seed"), 18446744073709551615ull);
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("exit");
  EXPECT_EQ(shell(bin() + " simulate --scenario " + scenario("bad_alpha") + " --out " + out.string() +
                  " > /dev/null 2>&1"),
            3);
  std::ofstream(out / "unknown.conf") << "model.preset = \"cir\"\nconfig.what = 3\n";
  EXPECT_EQ(shell(bin() + " simulate --scenario " + (out / "unknown.conf").string() + " --out " + out.string() +
                  " > /dev/null 2>&1"),
            2);
  EXPECT_EQ(shell(bin() + " simulate --scenario " + (out / "missing.conf").string() + " > /dev/null 2>&1"), 2);
  EXPECT_EQ(shell(bin() + " frobnicate --scenario " + scenario("cir") + " > /dev/null 2>&1"), 2);
  EXPECT_EQ(shell(bin() + " check-conditions --scenario " + scenario("cir") + " --out " + out.string() +
                  " > /dev/null 2>&1"),
            1);
}

TEST(Cli, SummaryIndependentOfThreads) {
  const auto a = scratch("thr1"), b = scratch("thr3");
  const std::string base = bin() + " simulate --scenario " + scenario("cbi") + " --paths 300 --dt 0.01";
  ASSERT_EQ(shell(base + " --threads 1 --out " + a.string() + " > /dev/null"), 0);
  ASSERT_EQ(shell(base + " --threads 3 --out " + b.string() + " > /dev/null"), 0);
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  EXPECT_EQ(slurp(a / "paths.csv"), slurp(b / "paths.csv"));
  EXPECT_EQ(slurp(a / "mean.svg"), slurp(b / "mean.svg"));
  const auto manifest = slurp(a / "manifest.json");
  EXPECT_NE(manifest.find("simulate"), std::string::npos);
  EXPECT_EQ(manifest, slurp(b / "manifest.json"));
  const auto csv = slurp(a / "paths.csv");
  EXPECT_EQ(csv.rfind("path_id,time,state,event_channel,event_size", 0), 0u);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto a = scratch("env");
  const auto ignored = scratch("env_ignored");
  ASSERT_EQ(shell("NNJUMP_OUT=" + a.string() + " " + bin() + " simulate --scenario " + scenario("cir") +
                  " --paths 50 --dt 0.01 --out " + ignored.string() + " > /dev/null"),
            0);
  EXPECT_TRUE(fs::exists(a / "summary.json"));
  EXPECT_FALSE(fs::exists(ignored / "summary.json"));
}

TEST(Cli, EmptyTimeGridRejectedBySvg) {
  Summary s;
  s.model = "cir";
  EXPECT_THROW(plot_svg(s), Error);
}

TEST(Cli, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, DiagnoseAndGadgetCommands) {
  const auto out = scratch("diag");
  EXPECT_EQ(shell(bin() + " diagnose --scenario " + scenario("cbi") + " --tests moment1 --paths 500 --dt 0.01 --out " +
                  out.string() + " > /dev/null"),
            0);
  EXPECT_NE(slurp(out / "diagnostics.json").find("moment"), std::string::npos);
  EXPECT_EQ(shell(bin() + " diagnose --scenario " + scenario("cbi") + " --tests nonsense --out " + out.string() +
                  " > /dev/null 2>&1"),
            2);
  EXPECT_EQ(shell(bin() + " gadget --scenario " + scenario("gadget") + " --out " + out.string() + " > /dev/null"), 0);
  EXPECT_TRUE(fs::exists(out / "gadget_partition.csv"));
  EXPECT_TRUE(fs::exists(out / "gadget_phi.csv"));
}

TEST(Cli, InProcessRunMatchesBinary) {
  const auto out = scratch("inproc");
  const int code = run({"nnjump", "check-conditions", "--scenario", scenario("bounded"), "--out", out.string()});
  EXPECT_EQ(code, shell(bin() + " check-conditions --scenario " + scenario("bounded") + " --out " + out.string() +
                        " > /dev/null"));
  EXPECT_TRUE(fs::exists(out / "conditions.json"));
}
