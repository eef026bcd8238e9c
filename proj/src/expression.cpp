#include "jetcartan/expression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace jc {

Coordinate Coordinate::jet(int i, std::vector<std::int16_t> dirs, std::string n) {
  Coordinate c;
  c.role = Role::Jet;
  c.field = (std::int16_t)i;
  std::sort(dirs.begin(), dirs.end());
  c.dirs = std::move(dirs);
  c.name = std::move(n);
  return c;
}

int compare(const Coordinate& a, const Coordinate& b) {
  auto rank = [](const Coordinate& c) -> int {
    switch (c.role) {
      case Role::Base: return 0;
      case Role::Fiber: return 1;
      case Role::Jet: return 2;
      case Role::MomentumScalar: return 3;
      case Role::Momentum: return 4;
      case Role::Source: return 5;
      case Role::Dual: return 6;
    }
    return 7;
  };
  if (rank(a) != rank(b)) return rank(a) < rank(b) ? -1 : 1;
  switch (a.role) {
    case Role::Base: return a.base < b.base ? -1 : (a.base == b.base ? 0 : 1);
    case Role::Jet:
      if (a.dirs.size() != b.dirs.size()) return a.dirs.size() < b.dirs.size() ? -1 : 1;
      if (a.field != b.field) return a.field < b.field ? -1 : 1;
      if (a.dirs != b.dirs) return a.dirs < b.dirs ? -1 : 1;
      return 0;
    case Role::Momentum:
      if (a.base != b.base) return a.base < b.base ? -1 : 1;
      if (a.field != b.field) return a.field < b.field ? -1 : 1;
      return 0;
    case Role::MomentumScalar: return 0;
    default:
      return a.field < b.field ? -1 : (a.field == b.field ? 0 : 1);
  }
}

namespace {

std::shared_ptr<const Node> make_node(Node&& n) {
  return std::make_shared<const Node>(std::move(n));
}

int kind_rank(Kind k) { return (int)k; }

}  // namespace

Expr::Expr() : n_(Expr::num(0l).n_) {}

Kind Expr::kind() const { return n_->kind; }
bool Expr::is_zero() const { return n_->kind == Kind::Number && n_->num == 0; }
bool Expr::is_one() const { return n_->kind == Kind::Number && n_->num == 1; }
bool Expr::is_number() const { return n_->kind == Kind::Number; }
const Rational& Expr::number() const { return n_->num; }

int compare(const Expr& a, const Expr& b) {
  if (a.n_ == b.n_) return 0;
  const Node& x = *a.n_;
  const Node& y = *b.n_;
  if (x.kind != y.kind) return kind_rank(x.kind) < kind_rank(y.kind) ? -1 : 1;
  switch (x.kind) {
    case Kind::Number: return cmp(x.num, y.num);
    case Kind::Coord: return compare(x.coord, y.coord);
    case Kind::Param: return x.name.compare(y.name) < 0 ? -1 : (x.name == y.name ? 0 : 1);
    case Kind::Power: {
      int c = compare(x.args[0], y.args[0]);
      if (c) return c;
      return cmp(x.expo, y.expo);
    }
    case Kind::Call: {
      if (x.fn != y.fn) return (int)x.fn < (int)y.fn ? -1 : 1;
      return compare(x.args[0], y.args[0]);
    }
    case Kind::Unknown: {
      if (x.name != y.name) return x.name < y.name ? -1 : 1;
      if (x.derivs != y.derivs) return x.derivs < y.derivs ? -1 : 1;
      if (x.args.size() != y.args.size()) return x.args.size() < y.args.size() ? -1 : 1;
      for (size_t i = 0; i < x.args.size(); ++i) {
        int c = compare(x.args[i], y.args[i]);
        if (c) return c;
      }
      return 0;
    }
    case Kind::Product:
    case Kind::Sum: {
      size_t n = std::min(x.args.size(), y.args.size());
      for (size_t i = 0; i < n; ++i) {
        int c = compare(x.args[i], y.args[i]);
        if (c) return c;
      }
      if (x.args.size() != y.args.size()) return x.args.size() < y.args.size() ? -1 : 1;
      return 0;
    }
  }
  return 0;
}

Expr Expr::num(Rational q) {
  Node n;
  n.kind = Kind::Number;
  n.num = std::move(q);
  return Expr(make_node(std::move(n)));
}

Expr Expr::coord(Coordinate c) {
  Node n;
  n.kind = Kind::Coord;
  n.coord = std::move(c);
  return Expr(make_node(std::move(n)));
}

Expr Expr::param(std::string name) {
  Node n;
  n.kind = Kind::Param;
  n.name = std::move(name);
  return Expr(make_node(std::move(n)));
}

namespace {

// Splits a normalized term into (coefficient, monic part) for sum collection.
std::pair<Rational, Expr> coeff_split(const Expr& e) {
  const Node& n = e.node();
  if (n.kind == Kind::Number) return {n.num, Expr::one()};
  if (n.kind == Kind::Product && n.args[0].is_number()) {
    std::vector<Expr> rest(n.args.begin() + 1, n.args.end());
    Expr key = rest.size() == 1 ? rest[0] : Expr::prod(std::move(rest));
    return {n.args[0].number(), key};
  }
  return {Rational(1), e};
}

// Base/exponent view for product collection.
std::pair<Expr, Rational> pow_split(const Expr& e) {
  const Node& n = e.node();
  if (n.kind == Kind::Power) return {n.args[0], n.expo};
  return {e, Rational(1)};
}

// Exact q-th root of a nonnegative integer, if it exists.
bool exact_root(const BigInt& v, unsigned q, BigInt& out) {
  if (v < 0) return false;
  if (v == 0 || v == 1) {
    out = v;
    return true;
  }
  BigInt lo = 1, hi = v;
  while (lo < hi) {
    BigInt mid = (lo + hi) / 2;
    BigInt p = 1;
    bool over = false;
    for (unsigned k = 0; k < q; ++k) {
      p *= mid;
      if (p > v) { over = true; break; }
    }
    if (over) hi = mid - 1;
    else if (p == v) { out = mid; return true; }
    else lo = mid + 1;
  }
  BigInt p = 1;
  for (unsigned k = 0; k < q; ++k) p *= lo;
  if (p == v) { out = lo; return true; }
  return false;
}

BigInt ipow(BigInt b, BigInt e) {
  BigInt r = 1;
  while (e > 0) {
    if (e % 2 == 1) r *= b;
    b *= b;
    e /= 2;
  }
  return r;
}

bool rational_pow_exact(const Rational& base, const Rational& expo, Rational& out) {
  BigInt p = numerator(expo), q = denominator(expo);
  bool neg_e = p < 0;
  if (neg_e) p = -p;
  if (base == 0) {
    if (neg_e) return false;
    out = 0;
    return true;
  }
  Rational b = base;
  BigInt bn = numerator(b), bd = denominator(b);
  if (q != 1) {
    if (bn < 0) return false;  // keep symbolic: (-8)^(1/3) etc.
    BigInt rn, rd;
    if (!exact_root(bn, q.convert_to<unsigned>(), rn)) return false;
    if (!exact_root(bd, q.convert_to<unsigned>(), rd)) return false;
    bn = rn;
    bd = rd;
  }
  bn = ipow(bn, p);
  bd = ipow(bd, p);
  out = neg_e ? Rational(bd, bn) : Rational(bn, bd);
  return true;
}

}  // namespace

Expr Expr::sum(std::vector<Expr> terms) {
  std::map<Expr, Rational, ExprLess> acc;
  Rational constant(0);
  std::vector<Expr> stack(terms.rbegin(), terms.rend());
  while (!stack.empty()) {
    Expr t = stack.back();
    stack.pop_back();
    const Node& n = t.node();
    if (n.kind == Kind::Sum) {
      for (auto it = n.args.rbegin(); it != n.args.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (n.kind == Kind::Number) {
      constant += n.num;
      continue;
    }
    auto [c, key] = coeff_split(t);
    acc[key] += c;
  }
  std::vector<Expr> out;
  if (constant != 0) out.push_back(Expr::num(constant));
  for (auto& [key, c] : acc) {
    if (c == 0) continue;
    if (c == 1) out.push_back(key);
    else out.push_back(Expr::prod({Expr::num(c), key}));
  }
  if (out.empty()) return Expr::num(0l);
  if (out.size() == 1) return out[0];
  Node n;
  n.kind = Kind::Sum;
  n.args = std::move(out);
  return Expr(make_node(std::move(n)));
}

Expr Expr::prod(std::vector<Expr> factors) {
  std::map<Expr, Rational, ExprLess> acc;  // base -> exponent
  Rational coeff(1);
  std::vector<Expr> exp_args;  // exp factors merge: exp(a)^r exp(b)^s = exp(ra+sb)
  std::vector<Expr> stack(factors.rbegin(), factors.rend());
  while (!stack.empty()) {
    Expr f = stack.back();
    stack.pop_back();
    const Node& n = f.node();
    if (n.kind == Kind::Product) {
      for (auto it = n.args.rbegin(); it != n.args.rend(); ++it) stack.push_back(*it);
      continue;
    }
    if (n.kind == Kind::Number) {
      if (n.num == 0) return Expr::num(0l);
      coeff *= n.num;
      continue;
    }
    auto [base, ex] = pow_split(f);
    if (base.kind() == Kind::Call && base.node().fn == Builtin::Exp) {
      exp_args.push_back(Expr::num(ex) * base.node().args[0]);
      continue;
    }
    acc[base] += ex;
  }
  if (!exp_args.empty()) {
    Expr merged = Expr::call(Builtin::Exp, Expr::sum(std::move(exp_args)));
    if (merged.is_number()) coeff *= merged.number();
    else acc[merged] += 1;
  }
  std::vector<Expr> out;
  for (auto& [base, ex] : acc) {
    if (ex == 0) continue;
    Expr f = Expr::pow(base, ex);
    // pow may have folded to a number (e.g. collected numeric bases)
    if (f.is_number()) {
      if (f.number() == 0) return Expr::num(0l);
      coeff *= f.number();
    } else {
      out.push_back(f);
    }
  }
  if (out.empty()) return Expr::num(coeff);
  if (coeff == 0) return Expr::num(0l);
  if (coeff != 1) out.insert(out.begin(), Expr::num(coeff));
  if (out.size() == 1) return out[0];
  Node n;
  n.kind = Kind::Product;
  n.args = std::move(out);
  return Expr(make_node(std::move(n)));
}

Expr Expr::pow(const Expr& base, const Rational& exponent) {
  if (exponent == 0) return Expr::one();
  if (exponent == 1) return base;
  const Node& b = base.node();
  if (b.kind == Kind::Number) {
    Rational out;
    if (rational_pow_exact(b.num, exponent, out)) return Expr::num(out);
  }
  if (b.kind == Kind::Power) return Expr::pow(b.args[0], b.expo * exponent);
  if (b.kind == Kind::Call && b.fn == Builtin::Exp)
    return Expr::call(Builtin::Exp, Expr::num(exponent) * b.args[0]);
  if (b.kind == Kind::Product) {
    if (is_integer(exponent)) {
      std::vector<Expr> fs;
      fs.reserve(b.args.size());
      for (const Expr& f : b.args) fs.push_back(Expr::pow(f, exponent));
      return Expr::prod(std::move(fs));
    }
    // pull exp/perfect-number factors out of fractional powers (both positive)
    std::vector<Expr> outside, inside;
    for (const Expr& f : b.args) {
      const Node& fn_ = f.node();
      bool exp_base = fn_.kind == Kind::Call && fn_.fn == Builtin::Exp;
      if (!exp_base && fn_.kind == Kind::Power) {
        const Node& bb = fn_.args[0].node();
        exp_base = bb.kind == Kind::Call && bb.fn == Builtin::Exp;
      }
      Rational folded;
      if (exp_base || (fn_.kind == Kind::Number && rational_pow_exact(fn_.num, exponent, folded)))
        outside.push_back(Expr::pow(f, exponent));
      else
        inside.push_back(f);
    }
    if (!outside.empty()) {
      if (!inside.empty())
        outside.push_back(Expr::pow(Expr::prod(std::move(inside)), exponent));
      return Expr::prod(std::move(outside));
    }
  }
  Node n;
  n.kind = Kind::Power;
  n.args = {base};
  n.expo = exponent;
  return Expr(make_node(std::move(n)));
}

Expr Expr::call(Builtin fn, const Expr& arg) {
  if (arg.is_number()) {
    const Rational& q = arg.number();
    if (q == 0) {
      switch (fn) {
        case Builtin::Sin: return Expr::zero();
        case Builtin::Cos: return Expr::one();
        case Builtin::Exp: return Expr::one();
        case Builtin::Ln: break;  // domain error at evaluation time
      }
    }
    if (q == 1 && fn == Builtin::Ln) return Expr::zero();
  }
  if (fn == Builtin::Ln && arg.kind() == Kind::Call && arg.node().fn == Builtin::Exp)
    return arg.node().args[0];
  Node n;
  n.kind = Kind::Call;
  n.fn = fn;
  n.args = {arg};
  return Expr(make_node(std::move(n)));
}

Expr Expr::unknown(std::string name, std::vector<Expr> args, std::vector<int> derivs) {
  std::sort(derivs.begin(), derivs.end());
  Node n;
  n.kind = Kind::Unknown;
  n.name = std::move(name);
  n.args = std::move(args);
  n.derivs = std::move(derivs);
  return Expr(make_node(std::move(n)));
}

Expr Expr::operator-() const { return Expr::prod({Expr::num(-1l), *this}); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::prod({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  return Expr::prod({a, Expr::pow(b, Rational(-1))});
}

Expr differentiate(const Expr& e, const Coordinate& c) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Number:
    case Kind::Param:
      return Expr::zero();
    case Kind::Coord:
      return n.coord == c ? Expr::one() : Expr::zero();
    case Kind::Sum: {
      std::vector<Expr> ts;
      ts.reserve(n.args.size());
      for (const Expr& t : n.args) ts.push_back(differentiate(t, c));
      return Expr::sum(std::move(ts));
    }
    case Kind::Product: {
      std::vector<Expr> ts;
      for (size_t i = 0; i < n.args.size(); ++i) {
        Expr d = differentiate(n.args[i], c);
        if (d.is_zero()) continue;
        std::vector<Expr> fs;
        for (size_t j = 0; j < n.args.size(); ++j) fs.push_back(j == i ? d : n.args[j]);
        ts.push_back(Expr::prod(std::move(fs)));
      }
      return Expr::sum(std::move(ts));
    }
    case Kind::Power: {
      Expr du = differentiate(n.args[0], c);
      if (du.is_zero()) return Expr::zero();
      return Expr::prod(
          {Expr::num(n.expo), Expr::pow(n.args[0], n.expo - 1), du});
    }
    case Kind::Call: {
      Expr du = differentiate(n.args[0], c);
      if (du.is_zero()) return Expr::zero();
      Expr outer;
      switch (n.fn) {
        case Builtin::Sin: outer = Expr::call(Builtin::Cos, n.args[0]); break;
        case Builtin::Cos: outer = -Expr::call(Builtin::Sin, n.args[0]); break;
        case Builtin::Exp: outer = Expr::call(Builtin::Exp, n.args[0]); break;
        case Builtin::Ln: outer = Expr::one() / n.args[0]; break;
      }
      return outer * du;
    }
    case Kind::Unknown: {
      std::vector<Expr> ts;
      for (size_t j = 0; j < n.args.size(); ++j) {
        Expr da = differentiate(n.args[j], c);
        if (da.is_zero()) continue;
        std::vector<int> d2 = n.derivs;
        d2.push_back((int)j);
        ts.push_back(Expr::unknown(n.name, n.args, std::move(d2)) * da);
      }
      return Expr::sum(std::move(ts));
    }
  }
  return Expr::zero();
}

Expr differentiate_param(const Expr& e, const std::string& name) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Number:
    case Kind::Coord:
      return Expr::zero();
    case Kind::Param:
      return n.name == name ? Expr::one() : Expr::zero();
    default: {
      // reuse structure of coordinate differentiation via a stand-in
      Coordinate probe = Coordinate::dual(32000, "__param_probe");
      std::map<std::string, Expr> sub{{name, Expr::coord(probe)}};
      Expr traded = substitute_params(e, sub);
      Expr d = differentiate(traded, probe);
      Bindings back{{probe, Expr::param(name)}};
      return substitute(d, back);
    }
  }
}

namespace {

template <typename LeafFn, typename ParamFn>
Expr rebuild(const Expr& e, LeafFn&& on_coord, ParamFn&& on_param) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Number: return e;
    case Kind::Coord: return on_coord(n.coord, e);
    case Kind::Param: return on_param(n.name, e);
    case Kind::Sum: {
      std::vector<Expr> xs;
      xs.reserve(n.args.size());
      for (const Expr& a : n.args) xs.push_back(rebuild(a, on_coord, on_param));
      return Expr::sum(std::move(xs));
    }
    case Kind::Product: {
      std::vector<Expr> xs;
      xs.reserve(n.args.size());
      for (const Expr& a : n.args) xs.push_back(rebuild(a, on_coord, on_param));
      return Expr::prod(std::move(xs));
    }
    case Kind::Power:
      return Expr::pow(rebuild(n.args[0], on_coord, on_param), n.expo);
    case Kind::Call:
      return Expr::call(n.fn, rebuild(n.args[0], on_coord, on_param));
    case Kind::Unknown: {
      std::vector<Expr> xs;
      xs.reserve(n.args.size());
      for (const Expr& a : n.args) xs.push_back(rebuild(a, on_coord, on_param));
      return Expr::unknown(n.name, std::move(xs), n.derivs);
    }
  }
  return e;
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& b) {
  if (b.empty()) return e;
  return rebuild(
      e,
      [&](const Coordinate& c, const Expr& orig) {
        auto it = b.find(c);
        return it == b.end() ? orig : it->second;
      },
      [](const std::string&, const Expr& orig) { return orig; });
}

Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& b) {
  if (b.empty()) return e;
  return rebuild(
      e, [](const Coordinate&, const Expr& orig) { return orig; },
      [&](const std::string& name, const Expr& orig) {
        auto it = b.find(name);
        return it == b.end() ? orig : it->second;
      });
}

double evaluate(const Expr& e, const NumPoint& point, const ParamValues& params) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Number:
      return to_double(n.num);
    case Kind::Coord: {
      auto it = point.find(n.coord);
      if (it == point.end())
        throw EvalError(EvalError::Code::Unbound, "unbound coordinate: " + n.coord.name);
      return it->second;
    }
    case Kind::Param: {
      auto it = params.find(n.name);
      if (it == params.end())
        throw EvalError(EvalError::Code::Unbound, "unbound parameter: " + n.name);
      return it->second;
    }
    case Kind::Sum: {
      double s = 0;
      for (const Expr& a : n.args) s += evaluate(a, point, params);
      return s;
    }
    case Kind::Product: {
      double s = 1;
      for (const Expr& a : n.args) s *= evaluate(a, point, params);
      return s;
    }
    case Kind::Power: {
      double b = evaluate(n.args[0], point, params);
      if (is_integer(n.expo)) {
        long k = n.expo.convert_to<long>();
        if (b == 0.0 && k < 0)
          throw EvalError(EvalError::Code::Domain, "zero raised to a negative power");
        return std::pow(b, (double)k);
      }
      if (b < 0)
        throw EvalError(EvalError::Code::Domain, "negative base with fractional exponent");
      return std::pow(b, to_double(n.expo));
    }
    case Kind::Call: {
      double a = evaluate(n.args[0], point, params);
      switch (n.fn) {
        case Builtin::Sin: return std::sin(a);
        case Builtin::Cos: return std::cos(a);
        case Builtin::Exp: return std::exp(a);
        case Builtin::Ln:
          if (a <= 0) throw EvalError(EvalError::Code::Domain, "ln of a nonpositive value");
          return std::log(a);
      }
      return 0;
    }
    case Kind::Unknown:
      throw EvalError(EvalError::Code::Unbound, "unbound function: ?" + n.name);
  }
  return 0;
}

namespace {

Expr expand_product_pair(const Expr& a, const Expr& b) {
  const Node& na = a.node();
  const Node& nb = b.node();
  if (na.kind != Kind::Sum && nb.kind != Kind::Sum) return a * b;
  std::vector<Expr> at = na.kind == Kind::Sum ? na.args : std::vector<Expr>{a};
  std::vector<Expr> bt = nb.kind == Kind::Sum ? nb.args : std::vector<Expr>{b};
  std::vector<Expr> out;
  out.reserve(at.size() * bt.size());
  for (const Expr& x : at)
    for (const Expr& y : bt) out.push_back(x * y);
  return Expr::sum(std::move(out));
}

}  // namespace

Expr expand(const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Number:
    case Kind::Coord:
    case Kind::Param:
      return e;
    case Kind::Sum: {
      std::vector<Expr> xs;
      xs.reserve(n.args.size());
      for (const Expr& a : n.args) xs.push_back(expand(a));
      return Expr::sum(std::move(xs));
    }
    case Kind::Product: {
      Expr acc = Expr::one();
      for (const Expr& a : n.args) acc = expand_product_pair(acc, expand(a));
      return acc;
    }
    case Kind::Power: {
      Expr base = expand(n.args[0]);
      if (base.kind() == Kind::Sum && is_integer(n.expo) && n.expo > 1 && n.expo < 40) {
        long k = n.expo.convert_to<long>();
        Expr acc = base;
        for (long i = 1; i < k; ++i) acc = expand_product_pair(acc, base);
        return acc;
      }
      return Expr::pow(base, n.expo);
    }
    case Kind::Call:
      return Expr::call(n.fn, expand(n.args[0]));
    case Kind::Unknown: {
      std::vector<Expr> xs;
      xs.reserve(n.args.size());
      for (const Expr& a : n.args) xs.push_back(expand(a));
      return Expr::unknown(n.name, std::move(xs), n.derivs);
    }
  }
  return e;
}

void collect_coords(const Expr& e, std::set<Coordinate, CoordLess>& out) {
  const Node& n = e.node();
  if (n.kind == Kind::Coord) {
    out.insert(n.coord);
    return;
  }
  for (const Expr& a : n.args) collect_coords(a, out);
}

std::set<Coordinate, CoordLess> free_coords(const Expr& e) {
  std::set<Coordinate, CoordLess> s;
  collect_coords(e, s);
  return s;
}

bool depends_on(const Expr& e, const Coordinate& c) {
  const Node& n = e.node();
  if (n.kind == Kind::Coord) return n.coord == c;
  for (const Expr& a : n.args)
    if (depends_on(a, c)) return true;
  return false;
}

bool has_unknowns(const Expr& e) {
  const Node& n = e.node();
  if (n.kind == Kind::Unknown) return true;
  for (const Expr& a : n.args)
    if (has_unknowns(a)) return true;
  return false;
}

bool polynomial_in(const Expr& e, const std::set<Coordinate, CoordLess>& vars) {
  const Node& n = e.node();
  auto touches = [&](const Expr& x) {
    for (const Coordinate& c : vars)
      if (depends_on(x, c)) return true;
    return false;
  };
  switch (n.kind) {
    case Kind::Number:
    case Kind::Param:
    case Kind::Coord:
      return true;
    case Kind::Sum:
    case Kind::Product: {
      for (const Expr& a : n.args)
        if (!polynomial_in(a, vars)) return false;
      return true;
    }
    case Kind::Power: {
      if (!touches(n.args[0])) return true;
      if (!is_integer(n.expo) || n.expo < 0) return false;
      return polynomial_in(n.args[0], vars);
    }
    case Kind::Call:
    case Kind::Unknown:
      return !touches(e);
  }
  return false;
}

bool expands_to_zero(const Expr& e) { return expand(e).is_zero(); }

namespace {

// Deterministic sampling fallback; avoids ln/sqrt domain trouble by staying
// in (0.3, 1.7).
bool sample_equal(const Expr& a, const Expr& b) {
  std::set<Coordinate, CoordLess> coords = free_coords(a);
  collect_coords(b, coords);
  std::set<std::string> params;
  std::function<void(const Expr&)> walk = [&](const Expr& e) {
    if (e.kind() == Kind::Param) params.insert(e.node().name);
    for (const Expr& x : e.node().args) walk(x);
  };
  walk(a);
  walk(b);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> dist(0.3, 1.7);
  int tested = 0;
  for (int trial = 0; trial < 96 && tested < 32; ++trial) {
    NumPoint pt;
    for (const Coordinate& c : coords) pt[c] = dist(rng);
    ParamValues pv;
    for (const std::string& p : params) pv[p] = dist(rng);
    double va, vb;
    try {
      va = evaluate(a, pt, pv);
      vb = evaluate(b, pt, pv);
    } catch (const EvalError&) {
      continue;  // resample away from a domain boundary
    }
    double scale = std::max({std::abs(va), std::abs(vb), 1.0});
    if (std::abs(va - vb) > 1e-9 * scale) return false;
    ++tested;
  }
  return tested >= 8;
}

}  // namespace

Equivalence equivalent(const Expr& a, const Expr& b) {
  Expr diff = expand(a - b);
  if (diff.is_zero()) return Equivalence::StructurallyEqual;
  if (polynomial_in(diff, free_coords(diff)) && !has_unknowns(diff))
    return Equivalence::NotEqual;  // a nonzero expanded polynomial
  if (has_unknowns(diff)) return Equivalence::NotEqual;  // opaque symbols: structural only
  return sample_equal(a, b) ? Equivalence::ProbablyEqual : Equivalence::NotEqual;
}

// ---------------------------------------------------------------- printing

namespace {

enum Prec { P_SUM = 0, P_PROD = 1, P_NEG = 2, P_POW = 3, P_ATOM = 4 };

void render_rec(const Expr& e, std::ostream& os, int parent_prec);

void parenthesize(const Expr& e, std::ostream& os, int my_prec, int parent_prec,
                  const std::function<void()>& body) {
  (void)e;
  if (my_prec < parent_prec) {
    os << "(";
    body();
    os << ")";
  } else {
    body();
  }
}

void render_number(const Rational& q, std::ostream& os, int parent_prec) {
  bool composite = denominator(q) != 1;
  bool neg = q < 0;
  int my = composite ? P_PROD : (neg ? P_NEG : P_ATOM);
  if (my < parent_prec) os << "(";
  os << numerator(q).str();
  if (composite) os << "/" << denominator(q).str();
  if (my < parent_prec) os << ")";
}

void render_rec(const Expr& e, std::ostream& os, int parent_prec) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Number:
      render_number(n.num, os, parent_prec);
      return;
    case Kind::Coord:
      os << n.coord.name;
      return;
    case Kind::Param:
      os << n.name;
      return;
    case Kind::Sum: {
      parenthesize(e, os, P_SUM, parent_prec, [&] {
        bool first = true;
        for (const Expr& t : n.args) {
          auto [c, key] = coeff_split(t);
          if (!first) os << (c < 0 ? " - " : " + ");
          else if (c < 0) os << "-";
          first = false;
          Rational mag = c < 0 ? Rational(-c) : c;
          if (key.is_one()) {
            render_number(mag, os, P_SUM + 1);
          } else if (mag == 1) {
            render_rec(key, os, P_PROD);
          } else {
            render_number(mag, os, P_PROD + 1);
            os << "*";
            render_rec(key, os, P_PROD);
          }
        }
      });
      return;
    }
    case Kind::Product: {
      parenthesize(e, os, P_PROD, parent_prec, [&] {
        bool first = true;
        for (const Expr& f : n.args) {
          if (!first) os << "*";
          first = false;
          render_rec(f, os, P_PROD + 1);
        }
      });
      return;
    }
    case Kind::Power: {
      parenthesize(e, os, P_POW, parent_prec, [&] {
        render_rec(n.args[0], os, P_POW + 1);
        os << "^";
        if (is_integer(n.expo) && n.expo >= 0) {
          os << numerator(n.expo).str();
        } else {
          os << "(";
          os << numerator(n.expo).str();
          if (denominator(n.expo) != 1) os << "/" << denominator(n.expo).str();
          os << ")";
        }
      });
      return;
    }
    case Kind::Call: {
      switch (n.fn) {
        case Builtin::Sin: os << "sin"; break;
        case Builtin::Cos: os << "cos"; break;
        case Builtin::Exp: os << "exp"; break;
        case Builtin::Ln: os << "ln"; break;
      }
      os << "(";
      render_rec(n.args[0], os, P_SUM);
      os << ")";
      return;
    }
    case Kind::Unknown: {
      os << "?" << n.name;
      if (!n.derivs.empty()) {
        os << "[";
        for (size_t i = 0; i < n.derivs.size(); ++i) {
          if (i) os << ",";
          os << (n.derivs[i] + 1);
        }
        os << "]";
      }
      os << "(";
      for (size_t i = 0; i < n.args.size(); ++i) {
        if (i) os << ",";
        render_rec(n.args[i], os, P_SUM);
      }
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string render(const Expr& e) {
  std::ostringstream os;
  render_rec(e, os, P_SUM);
  return os.str();
}

}  // namespace jc
