#include "jetcartan/jet_context.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace jc {

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha((unsigned char)s[0])) return false;
  for (char c : s)
    if (!std::isalnum((unsigned char)c) && c != '_') return false;
  return true;
}

Expr det_expr(const std::vector<std::vector<Expr>>& g) {
  size_t n = g.size();
  if (n == 1) return g[0][0];
  Expr det = Expr::zero();
  for (size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Expr>> minor;
    for (size_t r = 1; r < n; ++r) {
      std::vector<Expr> row;
      for (size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(g[r][c]);
      minor.push_back(std::move(row));
    }
    Expr term = g[0][j] * det_expr(minor);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

}  // namespace

struct JetContext::Impl : SymbolScope {
  std::vector<std::string> base_names;
  std::vector<std::string> field_names;
  std::set<std::pair<int, int>> P;
  std::set<std::string> params;
  std::vector<std::optional<SplitKind>> split;
  bool has_split = false;
  std::vector<std::vector<Expr>> metric;
  bool euclidean = true;
  Expr sqrt_det;
  Expr lambda;
  std::vector<Expr> lambda_d;

  int base_idx(const std::string& n) const {
    for (size_t i = 0; i < base_names.size(); ++i)
      if (base_names[i] == n) return (int)i;
    return -1;
  }
  int field_idx(const std::string& n) const {
    for (size_t i = 0; i < field_names.size(); ++i)
      if (field_names[i] == n) return (int)i;
    return -1;
  }

  bool adm(int mu, int i) const { return P.count({mu, i}) > 0; }

  std::string jet_name(int i, const std::vector<std::int16_t>& dirs) const {
    bool admissible;
    if (dirs.size() == 1) {
      admissible = adm(dirs[0], i);
    } else {
      admissible = false;
      for (std::int16_t d : dirs)
        if (adm(d, i)) admissible = true;
    }
    std::string s = "d(" + field_names[i];
    s += admissible ? "," : ";";
    for (size_t k = 0; k < dirs.size(); ++k) {
      if (k) s += ",";
      s += base_names[dirs[k]];
    }
    s += ")";
    return s;
  }

  Coordinate make_jet(int i, std::vector<std::int16_t> dirs) const {
    std::sort(dirs.begin(), dirs.end());
    std::string n = jet_name(i, dirs);
    return Coordinate::jet(i, std::move(dirs), std::move(n));
  }

  // SymbolScope
  std::optional<Coordinate> lookup(const std::string& name) const override {
    int b = base_idx(name);
    if (b >= 0) return Coordinate::base_coord(b, name);
    int f = field_idx(name);
    if (f >= 0) return Coordinate::fiber(f, name);
    return std::nullopt;
  }
  bool is_param(const std::string& name) const override { return params.count(name) > 0; }
  Coordinate jet_coordinate(const std::string& field, const std::vector<std::string>& dirs,
                            bool semicolon, std::size_t pos) const override {
    int i = field_idx(field);
    if (i < 0) throw ParseError(pos, "unknown field '" + field + "'");
    std::vector<std::int16_t> dd;
    for (const std::string& d : dirs) {
      int mu = base_idx(d);
      if (mu < 0) throw ParseError(pos, "unknown base direction '" + d + "'");
      dd.push_back((std::int16_t)mu);
    }
    bool admissible;
    if (dd.size() == 1) {
      admissible = adm(dd[0], i);
    } else {
      admissible = false;
      for (std::int16_t d : dd)
        if (adm(d, i)) admissible = true;
    }
    if (!semicolon && !admissible)
      throw ParseError(pos, "jet coordinate not admitted: d(" + field + "," + dirs[0] +
                                (dirs.size() > 1 ? "," + dirs[1] : "") + ")");
    if (semicolon && admissible)
      throw ParseError(pos, "admitted jet coordinate must use d(" + field + ",...)");
    return make_jet(i, std::move(dd));
  }

  void set_metric(std::vector<std::vector<Expr>> g) {
    size_t n = base_names.size();
    if (g.size() != n) throw ContextError("metric must be a square (n+1)x(n+1) matrix");
    for (auto& row : g)
      if (row.size() != n) throw ContextError("metric must be a square (n+1)x(n+1) matrix");
    for (auto& row : g)
      for (auto& e : row)
        for (const Coordinate& c : free_coords(e))
          if (c.role != Role::Base)
            throw ContextError("metric entries may depend on base coordinates only");
    Expr det = det_expr(g);
    if (equivalent(det, Expr::zero()) != Equivalence::NotEqual)
      throw ContextError("singular metric (det G = 0)");
    metric = std::move(g);
    euclidean = true;
    for (size_t r = 0; r < n && euclidean; ++r)
      for (size_t c = 0; c < n && euclidean; ++c) {
        Expr want = r == c ? Expr::one() : Expr::zero();
        if (!struct_eq(metric[r][c], want)) euclidean = false;
      }
    sqrt_det = Expr::sqrt(det);
    // ln sqrt|det|; exp-aware so diag(..., e^{2x}) charts come out exact
    if (sqrt_det.is_one())
      lambda = Expr::zero();
    else if (sqrt_det.kind() == Kind::Call && sqrt_det.node().fn == Builtin::Exp)
      lambda = sqrt_det.node().args[0];
    else
      lambda = Expr::call(Builtin::Ln, sqrt_det);
    lambda_d.clear();
    for (size_t mu = 0; mu < n; ++mu)
      lambda_d.push_back(differentiate(lambda, Coordinate::base_coord((int)mu, base_names[mu])));
  }
};

int JetContext::n1() const { return (int)impl_->base_names.size(); }
int JetContext::m() const { return (int)impl_->field_names.size(); }
const std::vector<std::string>& JetContext::base_names() const { return impl_->base_names; }
const std::vector<std::string>& JetContext::field_names() const { return impl_->field_names; }
int JetContext::base_index(const std::string& n) const { return impl_->base_idx(n); }
int JetContext::field_index(const std::string& n) const { return impl_->field_idx(n); }

Coordinate JetContext::base(int mu) const {
  return Coordinate::base_coord(mu, impl_->base_names[mu]);
}
Coordinate JetContext::fiber(int i) const {
  return Coordinate::fiber(i, impl_->field_names[i]);
}
Coordinate JetContext::jet(int i, std::vector<std::int16_t> dirs) const {
  return impl_->make_jet(i, std::move(dirs));
}
Coordinate JetContext::jet1(int mu, int i) const {
  if (!admitted(mu, i))
    throw ContextError("jet coordinate not admitted: (" + impl_->base_names[mu] + "," +
                       impl_->field_names[i] + ")");
  return impl_->make_jet(i, {(std::int16_t)mu});
}
bool JetContext::admitted(int mu, int i) const { return impl_->adm(mu, i); }
const std::set<std::pair<int, int>>& JetContext::P() const { return impl_->P; }

std::vector<Coordinate> JetContext::admitted_jet1() const {
  std::vector<Coordinate> out;
  for (auto& [mu, i] : impl_->P) out.push_back(impl_->make_jet(i, {(std::int16_t)mu}));
  return out;
}
bool JetContext::is_full() const { return (int)impl_->P.size() == n1() * m(); }
bool JetContext::jet2_exists(int i, int mu, int sigma) const {
  return admitted(mu, i) || admitted(sigma, i);
}

std::optional<SplitKind> JetContext::split_of(int i) const { return impl_->split[i]; }
bool JetContext::has_split() const { return impl_->has_split; }

const std::vector<std::vector<Expr>>& JetContext::metric() const { return impl_->metric; }
bool JetContext::metric_euclidean() const { return impl_->euclidean; }
Expr JetContext::sqrt_detG() const { return impl_->sqrt_det; }
Expr JetContext::lambdaG() const { return impl_->lambda; }
Expr JetContext::lambdaG_d(int mu) const { return impl_->lambda_d[mu]; }

const std::set<std::string>& JetContext::params() const { return impl_->params; }

Coordinate JetContext::momentum_scalar() const { return Coordinate::momentum_scalar(); }
Coordinate JetContext::momentum(int mu, int i) const {
  return Coordinate::momentum(mu, i,
                              "p^" + impl_->base_names[mu] + "_" + impl_->field_names[i]);
}
Coordinate JetContext::source(int i) const {
  return Coordinate::source(i, "p_" + impl_->field_names[i]);
}

const SymbolScope& JetContext::scope() const { return *impl_; }

JetContext JetContext::with_metric(std::vector<std::vector<Expr>> g) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->set_metric(std::move(g));
  JetContext out;
  out.impl_ = std::move(impl);
  return out;
}

ContextBuilder& ContextBuilder::base(std::vector<std::string> names) {
  base_ = std::move(names);
  return *this;
}
ContextBuilder& ContextBuilder::fields(std::vector<std::string> names) {
  fields_ = std::move(names);
  return *this;
}
ContextBuilder& ContextBuilder::jet(const std::string& dir, const std::string& field) {
  jets_.emplace_back(dir, field);
  return *this;
}
ContextBuilder& ContextBuilder::all_jets() {
  all_jets_ = true;
  return *this;
}
ContextBuilder& ContextBuilder::split(const std::string& field, SplitKind k) {
  split_.emplace_back(field, k);
  return *this;
}
ContextBuilder& ContextBuilder::params(std::vector<std::string> names) {
  params_ = std::move(names);
  return *this;
}

JetContext ContextBuilder::build() const {
  auto impl = std::make_shared<JetContext::Impl>();
  if (base_.empty()) throw ContextError("at least one base coordinate required");
  if (fields_.empty()) throw ContextError("at least one field required");
  std::set<std::string> seen;
  for (const auto& n : base_) {
    if (!valid_identifier(n)) throw ContextError("invalid base name '" + n + "'");
    if (!seen.insert(n).second) throw ContextError("duplicate name '" + n + "'");
  }
  for (const auto& n : fields_) {
    if (!valid_identifier(n)) throw ContextError("invalid field name '" + n + "'");
    if (!seen.insert(n).second) throw ContextError("duplicate name '" + n + "'");
  }
  for (const auto& n : params_) {
    if (!valid_identifier(n)) throw ContextError("invalid parameter name '" + n + "'");
    if (!seen.insert(n).second) throw ContextError("duplicate name '" + n + "'");
  }
  impl->base_names = base_;
  impl->field_names = fields_;
  impl->params.insert(params_.begin(), params_.end());
  impl->split.assign(fields_.size(), std::nullopt);

  int n1 = (int)base_.size(), m = (int)fields_.size();
  if (!split_.empty()) {
    if (all_jets_ || !jets_.empty())
      throw ContextError("give either a splitting S or an explicit jet list, not both");
    impl->has_split = true;
    for (auto& [f, k] : split_) {
      int i = impl->field_idx(f);
      if (i < 0) throw ContextError("unknown field '" + f + "' in splitting");
      if (impl->split[i]) throw ContextError("field '" + f + "' split twice");
      impl->split[i] = k;
    }
    for (int i = 0; i < m; ++i)
      if (!impl->split[i])
        throw ContextError("field '" + fields_[i] + "' missing from splitting");
    // S induces P: S0 -> none, St -> (0,i), Sx -> (A,i) A>=1, Stx -> all
    for (int i = 0; i < m; ++i) {
      switch (*impl->split[i]) {
        case SplitKind::S0: break;
        case SplitKind::St: impl->P.insert({0, i}); break;
        case SplitKind::Sx:
          for (int a = 1; a < n1; ++a) impl->P.insert({a, i});
          break;
        case SplitKind::Stx:
          for (int mu = 0; mu < n1; ++mu) impl->P.insert({mu, i});
          break;
      }
    }
  } else if (all_jets_) {
    for (int mu = 0; mu < n1; ++mu)
      for (int i = 0; i < m; ++i) impl->P.insert({mu, i});
  } else {
    for (auto& [d, f] : jets_) {
      int mu = impl->base_idx(d);
      if (mu < 0) throw ContextError("unknown base direction '" + d + "' in jets");
      int i = impl->field_idx(f);
      if (i < 0) throw ContextError("unknown field '" + f + "' in jets");
      impl->P.insert({mu, i});
    }
  }

  std::vector<std::vector<Expr>> g(n1, std::vector<Expr>(n1, Expr::zero()));
  for (int k = 0; k < n1; ++k) g[k][k] = Expr::one();
  impl->set_metric(std::move(g));

  JetContext out;
  out.impl_ = std::move(impl);
  return out;
}

Connection Connection::flat(const JetContext& ctx) {
  Connection c;
  c.ctx = ctx;
  c.gamma.assign(ctx.m(), std::vector<Expr>(ctx.n1(), Expr::zero()));
  return c;
}

void Connection::validate() const {
  for (const auto& row : gamma)
    for (const Expr& e : row)
      for (const Coordinate& c : free_coords(e))
        if (c.role != Role::Base && c.role != Role::Fiber)
          throw ContextError("connection components must depend on (x, y) only");
}

}  // namespace jc
