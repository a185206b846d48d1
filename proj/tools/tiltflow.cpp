// tiltflow: maximal flows through tilted cylinders, command-line front end.

#include <iostream>

#include "CLI11.hpp"
#include "tiltflow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Maximal flows through tilted cylinders in planar first-passage percolation"};
  app.require_subcommand(1);

  tiltflow::Invocation inv;
  std::string config;
  std::vector<std::string> sets;
  std::string out_dir;

  const auto add = [&](const char* name, const char* help, bool config_required) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto* opt = sub->add_option("--config", config, "JSON experiment record");
    if (config_required) opt->required();
    sub->add_option("--set", sets, "override a config field, key.path=value (repeatable)");
    sub->add_option("--out", out_dir, "directory for the report and table");
    return sub;
  };
  CLI::App* flow = add("flow", "phi, tau and the dual check for one instance", true);
  flow->add_flag("--dump-geometry", inv.dump_geometry, "also write the lattice classification");
  add("nu", "Monte Carlo estimate of nu_theta from tau", true);
  add("limit", "inf of nu / cos over an angle window", true);
  add("lln", "trajectory of phi, tau or phi/tau against n", true);
  add("deviation", "empirical lower tail of phi", true);
  add("selftest", "brute-force oracle and duality suites", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << tiltflow::error_record("ConfigError", "arguments", e.what()) << "\n";
    return tiltflow::exit_code::config_error;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  inv.command = *tiltflow::parse_command(name);
  if (!config.empty()) inv.config_path = config;
  if (!out_dir.empty()) inv.out_dir = out_dir;
  inv.overrides = sets;
  return tiltflow::run(inv, std::cout, std::cerr);
}
