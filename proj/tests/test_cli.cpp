#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tiltflow/cli.hpp"

using namespace tiltflow;
namespace fs = std::filesystem;

namespace {

std::string configs() { return TILTFLOW_CONFIG_DIR; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tiltflow_cli_" + name);
  fs::remove_all(p);
  return p;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(Command cmd, std::optional<std::string> config, std::vector<std::string> sets,
               const fs::path& dir, bool geometry = false) {
  Invocation inv;
  inv.command = cmd;
  if (config) inv.config_path = configs() + "/" + *config;
  inv.overrides = std::move(sets);
  inv.out_dir = dir.string();
  inv.dump_geometry = geometry;
  std::ostringstream out, err;
  const int code = run(inv, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, FlowOnTheStraightExample) {
  const fs::path dir = scratch("flow");
  const Outcome o = invoke(Command::Flow, "flow_axis.json", {}, dir);
  ASSERT_EQ(o.code, exit_code::ok) << o.err;
  EXPECT_EQ(o.out, "phi=11 tau=11 dual=11\n");
  const Json report = Json::parse(slurp(dir / "flow_report.json"));
  EXPECT_EQ(report["phi"], 11.0);
  EXPECT_EQ(report["duality"]["equal"], true);
  EXPECT_FALSE(fs::exists(dir / "flow_geometry.json"));
}

TEST(Cli, FlowWithBoundaryConditionAndGeometry) {
  const fs::path dir = scratch("flow_tilted");
  const Outcome o = invoke(Command::Flow, "flow_tilted.json", {}, dir, true);
  ASSERT_EQ(o.code, exit_code::ok) << o.err;
  const Json report = Json::parse(slurp(dir / "flow_report.json"));
  EXPECT_TRUE(report.contains("phi_kappa"));
  const Json geo = Json::parse(slurp(dir / "flow_geometry.json"));
  EXPECT_EQ(geo["edges"].size(), report["graph"]["edges"].get<std::size_t>());
  EXPECT_FALSE(geo["top"].empty());
}

TEST(Cli, Selftest) {
  const Outcome o = invoke(Command::Selftest, std::nullopt, {}, scratch("selftest"));
  EXPECT_EQ(o.code, exit_code::ok) << o.err;
  EXPECT_EQ(o.out, "oracle: 200/200, duality: 500/500\n");
}

TEST(Cli, MalformedDistributionBlamesTheField) {
  const Outcome o = invoke(Command::Flow, "flow_axis.json", {"distribution.value=-1"}, scratch("bad"));
  EXPECT_EQ(o.code, exit_code::config_error);
  const Json rec = Json::parse(o.err);
  EXPECT_EQ(rec["error"], "InvalidDistribution");
  EXPECT_EQ(rec["field"], "distribution");
}

TEST(Cli, UnknownKeyIsRejected) {
  const Outcome o = invoke(Command::Flow, "flow_axis.json", {"hieght=3"}, scratch("unknown"));
  EXPECT_EQ(o.code, exit_code::config_error);
  const Json rec = Json::parse(o.err);
  EXPECT_EQ(rec["field"], "hieght");
}

TEST(Cli, WrongCommandForConfig) {
  const Outcome o = invoke(Command::Nu, "flow_axis.json", {}, scratch("wrong"));
  EXPECT_EQ(o.code, exit_code::config_error);
  EXPECT_EQ(Json::parse(o.err)["field"], "command");
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const fs::path a = scratch("repeat_a"), b = scratch("repeat_b");
  ASSERT_EQ(invoke(Command::Nu, "nu_bernoulli.json", {}, a).code, exit_code::ok);
  ASSERT_EQ(invoke(Command::Nu, "nu_bernoulli.json", {}, b).code, exit_code::ok);
  EXPECT_EQ(slurp(a / "nu_report.json"), slurp(b / "nu_report.json"));
  EXPECT_EQ(slurp(a / "nu_table.csv"), slurp(b / "nu_table.csv"));
  const std::string csv = slurp(a / "nu_table.csv");
  EXPECT_EQ(csv.substr(0, csv.find("\r\n")), "n,h,reps,mean,stderr,min,max");
}

TEST(Cli, NestedOverride) {
  const fs::path dir = scratch("nested");
  const Outcome o = invoke(Command::Lln, "lln_tilted.json",
                           {"height_rule.c=1", "n_values=[8,16]"}, dir);
  ASSERT_EQ(o.code, exit_code::ok) << o.err;
  const Json report = Json::parse(slurp(dir / "lln_report.json"));
  EXPECT_EQ(report["height_rule"]["c"], 1.0);
  EXPECT_EQ(report["rows"].size(), 2u);
}

TEST(Cli, LimitReport) {
  const fs::path dir = scratch("limit");
  const Outcome o = invoke(Command::Limit, "limit_tilted.json", {}, dir);
  ASSERT_EQ(o.code, exit_code::ok) << o.err;
  const Json report = Json::parse(slurp(dir / "limit_report.json"));
  EXPECT_NEAR(report["eta_hat"].get<double>(), 1.0823922002923940, 1e-12);
}

TEST(Cli, DeviationPreconditionIsARuntimeError) {
  const Outcome o = invoke(Command::Deviation, "deviation_bernoulli.json",
                           {"distribution.p=0.3"}, scratch("precondition"));
  EXPECT_NE(o.code, exit_code::ok);
  EXPECT_EQ(Json::parse(o.err)["error"], "PreconditionViolated");
}

// The installed binary, for the argument layer and the process exit codes.
TEST(Cli, BinaryExitCodes) {
  const std::string bin = TILTFLOW_CLI_PATH;
  const fs::path dir = scratch("binary");
  const auto status = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " > " + (dir / "stdout").string() + " 2> " +
                            (dir / "stderr").string();
    fs::create_directories(dir);
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("flow --config " + configs() + "/flow_axis.json --out " + dir.string()), 0);
  EXPECT_EQ(slurp(dir / "stdout"), "phi=11 tau=11 dual=11\n");
  EXPECT_EQ(status("flow --config " + configs() + "/flow_axis.json --set n=1 --out " + dir.string()), 2);
  EXPECT_EQ(status("flow"), 2);
  EXPECT_TRUE(Json::parse(slurp(dir / "stderr")).contains("error"));
  EXPECT_EQ(status("--help"), 0);
}
