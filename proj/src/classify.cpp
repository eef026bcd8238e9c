#include "jetcartan/classify.hpp"

namespace jc {

namespace {

constexpr double kRankTol = 1e-10;

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& a, std::vector<std::string>* warnings,
                             const std::string& label) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k) {
    double rel = top > 0 ? sv(k) / top : 0.0;
    if (rel > kRankTol) {
      ++rank;
      if (warnings && rel < 1e-8)
        warnings->push_back("marginal singular value (" + std::to_string(rel) + ") in " + label);
    }
  }
  return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace

TypeIndex classify(const ConstitutiveRelation& cr, const NumPoint& point,
                   const ParamValues& params) {
  const JetContext& ctx = cr.ctx();
  int m = ctx.m();

  // standing assumption: time jets only through F^0
  for (int j = 0; j < m; ++j) {
    if (!ctx.admitted(0, j)) continue;
    Coordinate zt = ctx.jet1(0, j);
    for (int i = 0; i < m; ++i) {
      for (int a = 1; a < ctx.n1(); ++a)
        if (depends_on(cr.F(a, i), zt))
          throw ContextError("classification assumption violated: F^" + ctx.base_names()[a] +
                             "_" + ctx.field_names()[i] + " depends on a time jet");
      if (depends_on(cr.Pi(i), zt))
        throw ContextError("classification assumption violated: source Pi_" +
                           ctx.field_names()[i] + " depends on a time jet");
    }
  }

  // defaults: every chart coordinate at 0, then the user's point on top
  NumPoint pt;
  for (int mu = 0; mu < ctx.n1(); ++mu) pt[ctx.base(mu)] = 0.0;
  for (int i = 0; i < m; ++i) pt[ctx.fiber(i)] = 0.0;
  for (const Coordinate& z : ctx.admitted_jet1()) pt[z] = 0.0;
  for (auto& [c, v] : point) pt[c] = v;

  Eigen::MatrixXd A1(m, m), A2(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      A1(i, j) = evaluate(differentiate(cr.F(0, i), ctx.fiber(j)), pt, params);
      A2(i, j) = ctx.admitted(0, j)
                     ? evaluate(differentiate(cr.F(0, i), ctx.jet1(0, j)), pt, params)
                     : 0.0;
    }

  TypeIndex out;
  out.K2 = kernel_basis(A2, &out.warnings, "A2 = dF0/dy_t");
  out.K1 = kernel_basis(A1, &out.warnings, "A1 = dF0/dy");
  Eigen::MatrixXd stacked(2 * m, m);
  stacked << A1, A2;
  out.K = kernel_basis(stacked, &out.warnings, "[A1; A2]");
  out.h = m - (int)out.K2.cols();
  out.e = (int)out.K.cols();
  out.p = m - out.h - out.e;

  out.regularity_applicable = true;
  for (int j = 0; j < m; ++j)
    if (ctx.admitted(0, j)) out.regularity_applicable = false;
  if (out.regularity_applicable)
    out.regular = (int)out.K1.cols() == 0;  // det A1 != 0
  return out;
}

}  // namespace jc
