#include <CLI11.hpp>

#include <iostream>

#include "jetcartan/commands.hpp"

namespace {

std::map<std::string, double> parse_assignments(const std::vector<std::string>& raw,
                                                const char* what) {
  std::map<std::string, double> out;
  for (const std::string& chunk : raw) {
    std::stringstream ss(chunk);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError(std::string(what) + " entries look like name=value");
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jetcartan - balance systems on partial jet bundles"};
  app.require_subcommand(1);

  const std::vector<std::string> commands = {
      "derive",  "el-compare",      "admissible", "symmetry",  "noether",
      "classify", "energy-momentum", "ret-audit",  "verify",    "forms-selftest"};

  struct Args {
    std::string file;
    bool json = false;
    std::vector<std::string> at, params;
    int grid = 32;
    int stencil = 2;
    double tol = 1e-9;
    std::string field, section;
  };
  std::map<std::string, Args> args;
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    Args& a = args[name];
    if (name != "forms-selftest")
      sub->add_option("file", a.file, "system file (.sys)")->required();
    sub->add_flag("--json", a.json, "emit the stable machine-readable report");
    sub->add_option("--at", a.at, "evaluation point, e.g. \"y=1,t=0\"");
    sub->add_option("--grid", a.grid, "grid nodes per axis")->check(CLI::PositiveNumber);
    sub->add_option("--stencil", a.stencil, "finite-difference order")
        ->check(CLI::IsMember({2, 4}));
    sub->add_option("--tol", a.tol, "numeric tolerance");
    sub->add_option("--param", a.params, "parameter values, e.g. delta=0.1");
    sub->add_option("--field", a.field, "vector field name from [vectorfields]");
    sub->add_option("--section", a.section, "section name from [sections]");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  std::string command;
  for (const std::string& name : commands)
    if (app.get_subcommand(name)->parsed()) command = name;
  const Args& a = args[command];

  try {
    jc::SystemFile sys;
    if (!a.file.empty()) sys = jc::load(a.file);
    jc::RunOptions opt;
    opt.json = a.json;
    opt.at = parse_assignments(a.at, "--at");
    opt.params = parse_assignments(a.params, "--param");
    opt.grid = a.grid;
    opt.stencil = a.stencil;
    opt.tol = a.tol;
    opt.field = a.field;
    opt.section = a.section;
    jc::CommandResult result = jc::run_command(command, sys, opt);
    std::cout << (a.json ? result.json : result.text);
    return result.exit_code;
  } catch (const jc::SysError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const jc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
