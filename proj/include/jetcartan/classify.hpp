#ifndef JETCARTAN_CLASSIFY_HPP
#define JETCARTAN_CLASSIFY_HPP

#include <Eigen/Dense>

#include "jetcartan/balance.hpp"

namespace jc {

// PDE type index at a point: h fields carry second time derivatives,
// p first only, e none; h + p + e = m.
struct TypeIndex {
  int h = 0, p = 0, e = 0;
  Eigen::MatrixXd K2;  // basis of ker A2 (columns)
  Eigen::MatrixXd K1;  // basis of ker A1
  Eigen::MatrixXd K;   // basis of ker A1 cap ker A2
  bool regularity_applicable = false;  // P has no time pairs
  bool regular = false;                // det A1 != 0 when applicable
  std::vector<std::string> warnings;
};

// Requires the standing assumption that time jets enter only through F^0.
TypeIndex classify(const ConstitutiveRelation& cr, const NumPoint& point,
                   const ParamValues& params = {});

}  // namespace jc

#endif
