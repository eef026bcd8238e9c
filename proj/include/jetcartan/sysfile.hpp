#ifndef JETCARTAN_SYSFILE_HPP
#define JETCARTAN_SYSFILE_HPP

#include "jetcartan/constitutive.hpp"
#include "jetcartan/prolong.hpp"

namespace jc {

class SysError : public std::runtime_error {
 public:
  SysError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_no(line) {}
  int line_no;
};

// Declarative system file: [context], [parameters], [constitutive],
// [connection], [vectorfields], [sections], [ret], [frame]. Strict: unknown
// sections or keys are errors.
struct SystemFile {
  JetContext ctx;
  std::optional<ConstitutiveRelation> cr;
  Connection connection;  // flat unless [connection] given
  std::map<std::string, VectorField> vectorfields;
  std::map<std::string, std::map<int, Expr>> sections;
  std::map<std::string, double> param_values;

  struct RetData {
    JetContext dual;                      // lam1..lamm chart, set when [ret] present
    std::optional<Expr> h0;               // primal entropy density
    std::vector<Expr> hflux;              // primal entropy flux (h^mu, optional)
    std::optional<std::vector<Expr>> hhat;  // dual four-potential
    std::optional<std::vector<Expr>> dual_pi;
    std::optional<Expr> psi;              // production potential
    bool present = false;
  } ret;

  std::optional<Frame> frame;
};

SystemFile load(const std::string& path);
SystemFile load_string(const std::string& text);

}  // namespace jc

#endif
