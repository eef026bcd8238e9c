#ifndef JETCARTAN_COMMANDS_HPP
#define JETCARTAN_COMMANDS_HPP

#include <nlohmann/json_fwd.hpp>

#include "jetcartan/sysfile.hpp"

namespace jc {

struct RunOptions {
  bool json = false;
  std::map<std::string, double> at;      // --at "y=1,..."
  int grid = 32;                         // --grid N
  int stencil = 2;                       // --stencil {2,4}
  double tol = 1e-9;                     // --tol X
  std::map<std::string, double> params;  // --param name=val (overrides file defaults)
  std::string field;                     // --field <vectorfield name>
  std::string section;                   // --section <section name>
};

struct CommandResult {
  int exit_code = 0;  // 0 checks passed, 1 a check failed, 2 usage/parse
  std::string text;   // human-readable report
  std::string json;   // stable machine format (set when options.json)
};

// command in {derive, el-compare, admissible, symmetry, noether,
// energy-momentum, classify, ret-audit, verify, forms-selftest}
CommandResult run_command(const std::string& command, SystemFile& sys,
                          const RunOptions& options);

struct SelfTestReport {
  int passed = 0;
  int failed = 0;
  std::vector<std::string> lines;
};

// eta contraction table, d^2/dhat^2/dtilde^2 suites, prolongation
// homomorphism suite. corrupt_eta_table is a test fixture hook that plants a
// wrong table entry to prove failures surface.
SelfTestReport selftest(bool corrupt_eta_table = false);

}  // namespace jc

#endif
