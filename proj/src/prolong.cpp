#include "jetcartan/prolong.hpp"

#include <functional>

namespace jc {

namespace {

std::set<int> field_dirs(const JetContext& ctx, int i) {
  std::set<int> d;
  for (int mu = 0; mu < ctx.n1(); ++mu)
    if (ctx.admitted(mu, i)) d.insert(mu);
  return d;
}

void require_on_Y(const VectorField& xi) {
  for (auto& [c, e] : xi.components())
    if (c.role != Role::Base && c.role != Role::Fiber)
      throw LiftError("vector field must live on Y (base and fiber components only)");
  for (auto& [c, e] : xi.components())
    for (const Coordinate& fc : free_coords(e))
      if (fc.role != Role::Base && fc.role != Role::Fiber)
        throw LiftError("vector field components must depend on (x, y) only");
  if (!xi.projectable()) throw LiftError("vector field is not projectable");
}

void check_split_shape(const VectorField& xi) {
  const JetContext& ctx = xi.ctx();
  Coordinate t = ctx.base(0);
  for (int a = 1; a < ctx.n1(); ++a) {
    if (depends_on(xi.component(ctx.base(0)), ctx.base(a)))
      throw LiftError("S-case: time component xi^t may depend on t only");
    if (depends_on(xi.component(ctx.base(a)), t))
      throw LiftError("S-case: space components xi^A may not depend on t");
  }
  auto cls = [&](int i) { return *ctx.split_of(i); };
  for (int i = 0; i < ctx.m(); ++i) {
    Expr comp = xi.component(ctx.fiber(i));
    if (comp.is_zero()) continue;
    SplitKind ki = cls(i);
    for (const Coordinate& c : free_coords(comp)) {
      if (c.role == Role::Fiber && cls(c.field) != ki)
        throw LiftError("S-case: vertical component xi^{" + ctx.field_names()[i] +
                        "} may depend only on fields of its own S-class");
      if (c.role == Role::Base) {
        bool is_time = c.base == 0;
        if (ki == SplitKind::St && !is_time)
          throw LiftError("S-case: xi^{" + ctx.field_names()[i] +
                          "} (S_t class) may depend on t only");
        if (ki == SplitKind::Sx && is_time)
          throw LiftError("S-case: xi^{" + ctx.field_names()[i] +
                          "} (S_x class) may not depend on t");
      }
    }
  }
}

void check_partial_conditions(const VectorField& xi) {
  const JetContext& ctx = xi.ctx();
  for (int i = 0; i < ctx.m(); ++i) {
    std::set<int> Di = field_dirs(ctx, i);
    Expr comp = xi.component(ctx.fiber(i));
    for (int sigma = 0; sigma < ctx.n1(); ++sigma) {
      if (Di.count(sigma)) continue;
      if (depends_on(comp, ctx.base(sigma)))
        throw LiftError("vertical component xi^{" + ctx.field_names()[i] +
                        "} depends on complementary direction " + ctx.base_names()[sigma]);
      for (int nu : Di) {
        if (depends_on(xi.component(ctx.base(nu)), ctx.base(sigma)))
          throw LiftError("base component xi^{" + ctx.base_names()[nu] +
                          "} depends on complementary direction " + ctx.base_names()[sigma]);
        if (depends_on(xi.component(ctx.base(sigma)), ctx.base(nu)))
          throw LiftError("complementary component xi^{" + ctx.base_names()[sigma] +
                          "} depends on admitted direction " + ctx.base_names()[nu] +
                          " (K-partial liftability condition)");
      }
    }
    // jet slots for field i require the y-dependence to stay liftable
    if (!Di.empty())
      for (int j = 0; j < ctx.m(); ++j) {
        if (!depends_on(comp, ctx.fiber(j))) continue;
        std::set<int> Dj = field_dirs(ctx, j);
        for (int mu : Di)
          if (!Dj.count(mu))
            throw LiftError("xi^{" + ctx.field_names()[i] + "} depends on " +
                            ctx.field_names()[j] + " whose jet along " +
                            ctx.base_names()[mu] + " is not admitted");
      }
  }
}

}  // namespace

VectorField prolong_vector_field(const VectorField& xi) {
  const JetContext& ctx = xi.ctx();
  require_on_Y(xi);
  if (ctx.has_split()) check_split_shape(xi);
  else if (!ctx.is_full()) check_partial_conditions(xi);
  VectorField out = xi;
  for (int i = 0; i < ctx.m(); ++i) {
    for (int mu = 0; mu < ctx.n1(); ++mu) {
      if (!ctx.admitted(mu, i)) continue;
      // d_mu xi^i (truncated) minus z^i_nu d xi^nu / d x^mu
      Expr comp = differentiate(xi.component(ctx.fiber(i)), ctx.base(mu));
      for (int j = 0; j < ctx.m(); ++j) {
        Expr dy = differentiate(xi.component(ctx.fiber(i)), ctx.fiber(j));
        if (dy.is_zero()) continue;
        if (!ctx.admitted(mu, j))
          throw LiftError("lift needs jet " + ctx.field_names()[j] + "," +
                          ctx.base_names()[mu] + " outside P");
        comp = comp + Expr::coord(ctx.jet1(mu, j)) * dy;
      }
      for (int nu = 0; nu < ctx.n1(); ++nu) {
        if (!ctx.admitted(nu, i)) continue;
        Expr dxi = differentiate(xi.component(ctx.base(nu)), ctx.base(mu));
        if (dxi.is_zero()) continue;
        comp = comp - Expr::coord(ctx.jet1(nu, i)) * dxi;
      }
      out.set(ctx.jet1(mu, i), comp);
    }
  }
  return out;
}

bool Frame::holonomic() const {
  for (auto& a : torsion)
    for (auto& b : a)
      for (const Expr& t : b)
        if (!expands_to_zero(t)) return false;
  return true;
}

namespace {

std::vector<std::vector<Expr>> invert_matrix(const std::vector<std::vector<Expr>>& a) {
  size_t n = a.size();
  // adjugate / det
  auto minor_det = [&](size_t skip_r, size_t skip_c) {
    std::vector<std::vector<Expr>> m;
    for (size_t r = 0; r < n; ++r) {
      if (r == skip_r) continue;
      std::vector<Expr> row;
      for (size_t c = 0; c < n; ++c)
        if (c != skip_c) row.push_back(a[r][c]);
      m.push_back(std::move(row));
    }
    std::function<Expr(const std::vector<std::vector<Expr>>&)> det =
        [&](const std::vector<std::vector<Expr>>& g) -> Expr {
      if (g.empty()) return Expr::one();
      if (g.size() == 1) return g[0][0];
      Expr d = Expr::zero();
      for (size_t j = 0; j < g.size(); ++j) {
        std::vector<std::vector<Expr>> sub;
        for (size_t r = 1; r < g.size(); ++r) {
          std::vector<Expr> row;
          for (size_t c = 0; c < g.size(); ++c)
            if (c != j) row.push_back(g[r][c]);
          sub.push_back(std::move(row));
        }
        Expr term = g[0][j] * det(sub);
        d = j % 2 == 0 ? d + term : d - term;
      }
      return d;
    };
    return det(m);
  };
  std::function<Expr(const std::vector<std::vector<Expr>>&)> full_det =
      [&](const std::vector<std::vector<Expr>>& g) -> Expr {
    if (g.size() == 1) return g[0][0];
    Expr d = Expr::zero();
    for (size_t j = 0; j < g.size(); ++j) {
      std::vector<std::vector<Expr>> sub;
      for (size_t r = 1; r < g.size(); ++r) {
        std::vector<Expr> row;
        for (size_t c = 0; c < g.size(); ++c)
          if (c != j) row.push_back(g[r][c]);
        sub.push_back(std::move(row));
      }
      Expr term = g[0][j] * full_det(sub);
      d = j % 2 == 0 ? d + term : d - term;
    }
    return d;
  };
  Expr det = full_det(a);
  if (equivalent(det, Expr::zero()) != Equivalence::NotEqual)
    throw LiftError("frame is singular (det = 0)");
  std::vector<std::vector<Expr>> inv(n, std::vector<Expr>(n));
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) {
      Expr cof = minor_det(c, r);
      if ((r + c) % 2 == 1) cof = -cof;
      inv[r][c] = cof / det;
    }
  return inv;
}

}  // namespace

Frame make_frame(const JetContext& ctx, std::vector<std::vector<Expr>> legs) {
  int n1 = ctx.n1();
  if ((int)legs.size() != n1) throw LiftError("frame needs n+1 legs");
  for (auto& leg : legs) {
    if ((int)leg.size() != n1) throw LiftError("frame legs need n+1 components");
    for (const Expr& e : leg)
      for (const Coordinate& c : free_coords(e))
        if (c.role != Role::Base) throw LiftError("frame legs must depend on x only");
  }
  Frame f;
  f.ctx = ctx;
  f.legs = legs;
  // coframe matrix B: psi^mu = B^mu_lambda dx^lambda with B = A^{-1},
  // A^lambda_mu = legs[mu][lambda]
  std::vector<std::vector<Expr>> A(n1, std::vector<Expr>(n1));
  for (int mu = 0; mu < n1; ++mu)
    for (int lam = 0; lam < n1; ++lam) A[lam][mu] = legs[mu][lam];
  f.coframe = invert_matrix(A);
  // d psi^mu = sum_{s<l} (d_s B^mu_l - d_l B^mu_s) dx^s ^ dx^l
  //          = T^mu_{ab} psi^a ^ psi^b with T antisymmetric
  f.torsion.assign(n1, std::vector<std::vector<Expr>>(n1, std::vector<Expr>(n1, Expr::zero())));
  for (int mu = 0; mu < n1; ++mu) {
    // C^mu_{ab} from d psi^mu expanded over psi^a ^ psi^b via dx = A psi
    std::vector<std::vector<Expr>> C(n1, std::vector<Expr>(n1, Expr::zero()));
    for (int s = 0; s < n1; ++s)
      for (int l = 0; l < n1; ++l) {
        Expr dB = differentiate(f.coframe[mu][l], ctx.base(s));
        if (dB.is_zero()) continue;
        for (int a = 0; a < n1; ++a)
          for (int b = 0; b < n1; ++b)
            C[a][b] = C[a][b] + dB * A[s][a] * A[l][b];
      }
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n1; ++b)
        f.torsion[mu][a][b] = (C[a][b] - C[b][a]) / Expr::num(2l);
  }
  return f;
}

VectorField prolong_in_frame(const Frame& frame, const std::vector<Expr>& xbar,
                             const std::vector<Expr>& vertical, const std::vector<int>& K) {
  const JetContext& ctx = frame.ctx;
  int n1 = ctx.n1();
  std::set<int> Kset(K.begin(), K.end());
  auto leg_apply = [&](int mu, const Expr& f) {
    Expr out = Expr::zero();
    for (int lam = 0; lam < n1; ++lam)
      out = out + frame.legs[mu][lam] * differentiate(f, ctx.base(lam));
    return out;
  };
  // admissibility: xi_sigma . xbar^nu + 2 T^nu_{beta sigma} xbar^beta = 0
  for (int sigma = 0; sigma < n1; ++sigma) {
    if (Kset.count(sigma)) continue;
    for (int nu : K) {
      Expr cond = leg_apply(sigma, xbar[nu]);
      for (int beta = 0; beta < n1; ++beta)
        cond = cond + Expr::num(2l) * frame.torsion[nu][beta][sigma] * xbar[beta];
      if (!expands_to_zero(cond))
        throw LiftError("frame prolongation admissibility fails for (sigma=" +
                        ctx.base_names()[sigma] + ", nu=" + ctx.base_names()[nu] + ")");
    }
  }
  VectorField out(ctx);
  for (int lam = 0; lam < n1; ++lam) {
    Expr comp = Expr::zero();
    for (int mu = 0; mu < n1; ++mu) comp = comp + xbar[mu] * frame.legs[mu][lam];
    out.set(ctx.base(lam), comp);
  }
  for (int i = 0; i < ctx.m(); ++i) out.set(ctx.fiber(i), vertical[i]);
  for (int i = 0; i < ctx.m(); ++i) {
    for (int nu : K) {
      if (!ctx.admitted(nu, i))
        throw LiftError("context does not admit the jet slot (" + ctx.base_names()[nu] + "," +
                        ctx.field_names()[i] + ") for the chosen K");
      Expr comp = leg_apply(nu, vertical[i]);
      for (int j = 0; j < ctx.m(); ++j) {
        Expr dy = differentiate(vertical[i], ctx.fiber(j));
        if (!dy.is_zero()) comp = comp + Expr::coord(ctx.jet1(nu, j)) * dy;
      }
      for (int nu1 : K) {
        Expr brace = leg_apply(nu, xbar[nu1]);
        for (int beta = 0; beta < n1; ++beta)
          brace = brace - Expr::num(2l) * frame.torsion[nu1][beta][nu] * xbar[beta];
        comp = comp - Expr::coord(ctx.jet1(nu1, i)) * brace;
      }
      out.set(ctx.jet1(nu, i), comp);
    }
  }
  return out;
}

DiffForm canonical_theta_n1(const JetContext& ctx) {
  DiffForm out = eta(ctx) * Expr::coord(ctx.momentum_scalar());
  for (int i = 0; i < ctx.m(); ++i)
    for (int mu = 0; mu < ctx.n1(); ++mu)
      out = out + wedge(DiffForm::differential(ctx.fiber(i)), eta_mu(ctx, mu)) *
                      Expr::coord(ctx.momentum(mu, i));
  return out;
}

DiffForm canonical_source_form(const JetContext& ctx) {
  DiffForm out;
  for (int i = 0; i < ctx.m(); ++i)
    out = out + wedge(DiffForm::differential(ctx.fiber(i)), eta(ctx)) *
                    Expr::coord(ctx.source(i));
  return out;
}

VectorField lift_to_momentum_bundle(const VectorField& xi, const std::vector<Expr>& alpha) {
  const JetContext& ctx = xi.ctx();
  require_on_Y(xi);
  if ((int)alpha.size() != ctx.n1()) throw LiftError("alpha needs n+1 components");
  VectorField out = xi;
  Expr p = Expr::coord(ctx.momentum_scalar());
  // p-component: -p(d_mu xi^mu + xi^mu lambda_mu) - p^mu_i d xi^i/dx^mu
  //              - d alpha^mu/dx^mu - alpha^nu lambda_nu
  Expr pc = Expr::zero();
  for (int mu = 0; mu < ctx.n1(); ++mu) {
    pc = pc - p * (differentiate(xi.component(ctx.base(mu)), ctx.base(mu)) +
                   xi.component(ctx.base(mu)) * ctx.lambdaG_d(mu));
    for (int i = 0; i < ctx.m(); ++i)
      pc = pc - Expr::coord(ctx.momentum(mu, i)) *
                    differentiate(xi.component(ctx.fiber(i)), ctx.base(mu));
    pc = pc - differentiate(alpha[mu], ctx.base(mu)) - alpha[mu] * ctx.lambdaG_d(mu);
  }
  out.set(ctx.momentum_scalar(), pc);
  // p^mu_i components: p^nu_i d_nu xi^mu - p^mu_j d_{y^i} xi^j
  //                    - p^mu_i (d_nu xi^nu + xi^nu lambda_nu) - d_{y^i} alpha^mu
  for (int mu = 0; mu < ctx.n1(); ++mu)
    for (int i = 0; i < ctx.m(); ++i) {
      Expr c = Expr::zero();
      for (int nu = 0; nu < ctx.n1(); ++nu) {
        c = c + Expr::coord(ctx.momentum(nu, i)) *
                    differentiate(xi.component(ctx.base(mu)), ctx.base(nu));
        c = c - Expr::coord(ctx.momentum(mu, i)) *
                    (differentiate(xi.component(ctx.base(nu)), ctx.base(nu)) +
                     xi.component(ctx.base(nu)) * ctx.lambdaG_d(nu));
      }
      for (int j = 0; j < ctx.m(); ++j)
        c = c - Expr::coord(ctx.momentum(mu, j)) *
                    differentiate(xi.component(ctx.fiber(j)), ctx.fiber(i));
      c = c - differentiate(alpha[mu], ctx.fiber(i));
      out.set(ctx.momentum(mu, i), c);
    }
  return out;
}

VectorField lift_to_source_bundle(const VectorField& xi) {
  const JetContext& ctx = xi.ctx();
  require_on_Y(xi);
  VectorField out = xi;
  for (int k = 0; k < ctx.m(); ++k) {
    Expr c = Expr::zero();
    for (int mu = 0; mu < ctx.n1(); ++mu)
      c = c - Expr::coord(ctx.source(k)) *
                  (differentiate(xi.component(ctx.base(mu)), ctx.base(mu)) +
                   xi.component(ctx.base(mu)) * ctx.lambdaG_d(mu));
    for (int j = 0; j < ctx.m(); ++j)
      c = c - Expr::coord(ctx.source(j)) *
                  differentiate(xi.component(ctx.fiber(j)), ctx.fiber(k));
    out.set(ctx.source(k), c);
  }
  return out;
}

Christoffel Christoffel::flat(const JetContext& ctx) {
  Christoffel g;
  g.ctx = ctx;
  int n1 = ctx.n1();
  g.gamma.assign(n1, std::vector<std::vector<Expr>>(n1, std::vector<Expr>(n1, Expr::zero())));
  return g;
}

void Christoffel::validate() const {
  int n1 = ctx.n1();
  for (int nu = 0; nu < n1; ++nu)
    for (int lam = 0; lam < n1; ++lam)
      for (int mu = 0; mu < n1; ++mu) {
        for (const Coordinate& c : free_coords(gamma[nu][lam][mu]))
          if (c.role != Role::Base)
            throw LiftError("Christoffel symbols must depend on x only");
        if (!exactly_equal(gamma[nu][lam][mu], gamma[nu][mu][lam]))
          throw LiftError("Christoffel symbols must be symmetric in the lower pair");
      }
}

std::vector<VectorField> prolong_connection(const Connection& nu, const Christoffel& g) {
  nu.validate();
  g.validate();
  const JetContext& ctx = nu.ctx;
  std::vector<VectorField> lifts;
  for (int lam = 0; lam < ctx.n1(); ++lam) {
    VectorField h(ctx);
    h.set(ctx.base(lam), Expr::one());
    for (int i = 0; i < ctx.m(); ++i) h.set(ctx.fiber(i), nu.at(i, lam));
    for (int i = 0; i < ctx.m(); ++i)
      for (int mu = 0; mu < ctx.n1(); ++mu) {
        if (!ctx.admitted(mu, i)) continue;
        Expr c = differentiate(nu.at(i, mu), ctx.base(lam));
        for (int j = 0; j < ctx.m(); ++j) {
          Expr dy = differentiate(nu.at(i, mu), ctx.fiber(j));
          if (dy.is_zero()) continue;
          if (!ctx.admitted(lam, j))
            throw LiftError("connection prolongation needs jet (" + ctx.base_names()[lam] +
                            "," + ctx.field_names()[j] + ") outside P");
          c = c + Expr::coord(ctx.jet1(lam, j)) * dy;
        }
        for (int v = 0; v < ctx.n1(); ++v) {
          if (!ctx.admitted(v, i)) continue;
          c = c + g.gamma[v][lam][mu] * (Expr::coord(ctx.jet1(v, i)) - nu.at(i, v));
        }
        h.set(ctx.jet1(mu, i), c);
      }
    lifts.push_back(std::move(h));
  }
  return lifts;
}

}  // namespace jc
