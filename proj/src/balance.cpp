#include "jetcartan/balance.hpp"

#include <cmath>

namespace jc {

BalanceSystem generate(const ConstitutiveRelation& cr) {
  const JetContext& ctx = cr.ctx();
  BalanceSystem out;
  out.ctx = ctx;
  out.provenance = "direct route";
  for (int i = 0; i < ctx.m(); ++i) {
    Expr r = -cr.source_term(i);
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      Expr f = cr.F(mu, i);
      if (f.is_zero()) continue;
      r = r + total_derivative(ctx, mu, f, DerivMode::Full) + ctx.lambdaG_d(mu) * f;
    }
    out.residuals.push_back(r);
  }

  // independent route: the dhat-Iglesias differential of Theta_{C_-} collapses
  // onto (d_mu F + lambda F - Pi) dy^i ^ eta
  MixedForm theta = theta_pc(cr.with_negated_source());
  MixedForm dhat = iglesias_d_hat(ctx, MixedForm{theta.alpha, theta.beta});
  Monomial eta_mono;
  for (int mu = 0; mu < ctx.n1(); ++mu) eta_mono.d.push_back(ctx.base(mu));
  for (int i = 0; i < ctx.m(); ++i) {
    auto w = wedge_mono(Monomial{{ctx.fiber(i)}}, eta_mono);
    Expr coeff = w ? dhat.alpha.coefficient(w->first) : Expr::zero();
    if (w && w->second < 0) coeff = -coeff;
    Expr via_dhat = coeff / ctx.sqrt_detG();
    if (!expands_to_zero(via_dhat - out.residuals[i]))
      throw ContextError("internal: direct and reduced-horizontal balance routes disagree for field " +
                         ctx.field_names()[i]);
  }
  return out;
}

BalanceSystem euler_lagrange(const Expr& L, const JetContext& ctx) {
  BalanceSystem out;
  out.ctx = ctx;
  out.provenance = "euler-lagrange";
  for (int i = 0; i < ctx.m(); ++i) {
    Expr r = -differentiate(L, ctx.fiber(i));
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      if (!ctx.admitted(mu, i)) continue;
      Expr f = differentiate(L, ctx.jet1(mu, i));
      if (f.is_zero()) continue;
      r = r + total_derivative(ctx, mu, f, DerivMode::Full) + ctx.lambdaG_d(mu) * f;
    }
    out.residuals.push_back(r);
  }
  return out;
}

DivEquivalenceReport check_div_equivalence(const BalanceLaw& b1, const BalanceLaw& b2,
                                           const std::vector<Expr>& q) {
  const JetContext& ctx = b1.ctx;
  DivEquivalenceReport rep;
  if ((int)q.size() != ctx.n1()) {
    rep.violation = "witness q needs n+1 components";
    return rep;
  }
  // witness restrictions: d_mu(q^mu) may only produce admitted jet
  // coordinates, so d q^mu / d y^i forces (mu,i) into P
  for (int mu = 0; mu < ctx.n1(); ++mu) {
    for (const Coordinate& c : free_coords(q[mu])) {
      if (c.role == Role::Jet &&
          !(c.order() == 1 && ctx.admitted(c.dirs[0], c.field))) {
        rep.violation = "q^" + ctx.base_names()[mu] + " depends on '" + c.name +
                        "', not a coordinate of this chart";
        return rep;
      }
      if (c.role == Role::Fiber && !ctx.admitted(mu, c.field)) {
        if (ctx.is_ret())
          rep.violation = "RET chart: q cannot depend on " + c.name;
        else if (mu == 0)
          rep.violation = "q^0 cannot depend on " + c.name +
                          " (time jets absent from this chart)";
        else
          rep.violation = "q^" + ctx.base_names()[mu] + " cannot depend on " + c.name +
                          " (jet (" + ctx.base_names()[mu] + "," + c.name + ") absent)";
        if (!differentiate(q[mu], c).is_zero()) return rep;
        rep.violation.clear();
      }
    }
  }
  for (int mu = 0; mu < ctx.n1(); ++mu)
    if (!expands_to_zero(b2.flux[mu] - b1.flux[mu] - q[mu])) return rep;
  Expr div = Expr::zero();
  for (int mu = 0; mu < ctx.n1(); ++mu)
    div = div + total_derivative(ctx, mu, q[mu], DerivMode::Full);
  rep.equivalent = expands_to_zero(b2.source - b1.source - div);
  return rep;
}

namespace {

struct Grid {
  GridSpec spec;
  std::vector<double> h;
  std::vector<long> stride;
  long total = 1;

  explicit Grid(const GridSpec& s) : spec(s) {
    int d = (int)s.n.size();
    h.resize(d);
    stride.assign(d, 1);
    for (int a = 0; a < d; ++a) {
      if (s.n[a] < 8) throw ContextError("grid needs at least 8 nodes per axis");
      h[a] = (s.hi[a] - s.lo[a]) / s.n[a];
    }
    for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * s.n[a + 1];
    for (int a = 0; a < d; ++a) total *= s.n[a];
  }
  std::vector<int> decode(long idx) const {
    std::vector<int> c(spec.n.size());
    for (size_t a = 0; a < spec.n.size(); ++a) {
      c[a] = (int)(idx / stride[a]);
      idx %= stride[a];
    }
    return c;
  }
  double coord(int axis, int i) const { return spec.lo[axis] + i * h[axis]; }
};

std::vector<double> axis_derivative(const Grid& g, const std::vector<double>& f, int axis,
                                    bool periodic, int order) {
  std::vector<double> out(f.size());
  int n = g.spec.n[axis];
  double h = g.h[axis];
  auto at = [&](long base_idx, int i0, int shift) -> double {
    int i = i0 + shift;
    if (periodic) i = ((i % n) + n) % n;
    else i = std::max(0, std::min(n - 1, i));
    return f[base_idx + (long)(i - i0) * g.stride[axis]];
  };
  for (long idx = 0; idx < g.total; ++idx) {
    int i0 = (int)((idx / g.stride[axis]) % n);
    if (!periodic && (i0 == 0 || i0 == n - 1)) {
      int s = i0 == 0 ? 1 : -1;  // one-sided second order
      out[idx] = s * (-3 * at(idx, i0, 0) + 4 * at(idx, i0, s) - at(idx, i0, 2 * s)) / (2 * h);
      continue;
    }
    if (order >= 4 && (periodic || (i0 >= 2 && i0 <= n - 3))) {
      out[idx] = (at(idx, i0, -2) - 8 * at(idx, i0, -1) + 8 * at(idx, i0, 1) -
                  at(idx, i0, 2)) /
                 (12 * h);
    } else {
      out[idx] = (at(idx, i0, 1) - at(idx, i0, -1)) / (2 * h);
    }
  }
  return out;
}

}  // namespace

SectionReport verify_section(const BalanceSystem& b, const NumericSection& s,
                             const GridSpec& gs, const ParamValues& params) {
  const JetContext& ctx = b.ctx;
  Grid grid(gs);
  SectionReport rep;
  rep.l2_residual.assign(ctx.m(), 0.0);

  if (s.is_closed_form()) {
    std::vector<Expr> pulled;
    for (const Expr& r : b.residuals)
      pulled.push_back(pullback_section(ctx, r, s.closed_form));
    for (long idx = 0; idx < grid.total; ++idx) {
      auto c = grid.decode(idx);
      NumPoint pt;
      for (int a = 0; a < ctx.n1(); ++a) pt[ctx.base(a)] = grid.coord(a, c[a]);
      for (int i = 0; i < ctx.m(); ++i) {
        double v = evaluate(pulled[i], pt, params);
        rep.max_residual = std::max(rep.max_residual, std::abs(v));
        rep.l2_residual[i] += v * v;
      }
    }
    rep.stencil_error_estimate = 0;  // exact jets
  } else {
    if ((int)s.values.size() != ctx.m())
      throw ContextError("grid section needs one value array per field");
    // jets by finite differences, cached per (field, dirs)
    std::map<std::pair<int, std::vector<std::int16_t>>, std::vector<double>> jets;
    std::function<const std::vector<double>&(int, std::vector<std::int16_t>)> jet_grid =
        [&](int field, std::vector<std::int16_t> dirs) -> const std::vector<double>& {
      std::sort(dirs.begin(), dirs.end());
      auto key = std::make_pair(field, dirs);
      auto it = jets.find(key);
      if (it != jets.end()) return it->second;
      if (dirs.empty()) return s.values[field];
      std::vector<std::int16_t> rest(dirs.begin(), dirs.end() - 1);
      int axis = dirs.back();
      std::vector<double> d = axis_derivative(grid, jet_grid(field, rest), axis, s.periodic,
                                              s.stencil_order);
      return jets.emplace(key, std::move(d)).first->second;
    };
    // coordinates each residual needs
    std::set<Coordinate, CoordLess> coords;
    for (const Expr& r : b.residuals) collect_coords(r, coords);
    for (long idx = 0; idx < grid.total; ++idx) {
      auto c = grid.decode(idx);
      NumPoint pt;
      for (int a = 0; a < ctx.n1(); ++a) pt[ctx.base(a)] = grid.coord(a, c[a]);
      for (const Coordinate& co : coords) {
        if (co.role == Role::Fiber) pt[co] = s.values[co.field][idx];
        else if (co.role == Role::Jet) pt[co] = jet_grid(co.field, co.dirs)[idx];
      }
      for (int i = 0; i < ctx.m(); ++i) {
        double v = evaluate(b.residuals[i], pt, params);
        rep.max_residual = std::max(rep.max_residual, std::abs(v));
        rep.l2_residual[i] += v * v;
      }
    }
    double hmax = 0;
    for (double h : grid.h) hmax = std::max(hmax, h);
    rep.stencil_error_estimate = std::pow(hmax, s.stencil_order);
  }
  for (double& v : rep.l2_residual) v = std::sqrt(v / (double)grid.total);
  return rep;
}

}  // namespace jc
