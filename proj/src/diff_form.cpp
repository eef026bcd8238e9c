#include "jetcartan/diff_form.hpp"

#include <sstream>

namespace jc {

int compare(const Monomial& a, const Monomial& b) {
  if (a.d.size() != b.d.size()) return a.d.size() < b.d.size() ? -1 : 1;
  for (size_t i = 0; i < a.d.size(); ++i) {
    int c = compare(a.d[i], b.d[i]);
    if (c) return c;
  }
  return 0;
}

std::optional<std::pair<Monomial, int>> wedge_mono(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.d.reserve(a.d.size() + b.d.size());
  size_t i = 0, j = 0;
  int sign = 1;
  while (i < a.d.size() && j < b.d.size()) {
    int c = compare(a.d[i], b.d[j]);
    if (c == 0) return std::nullopt;
    if (c < 0) {
      out.d.push_back(a.d[i++]);
    } else {
      // b.d[j] moves left past the remaining a-entries
      if ((a.d.size() - i) % 2 == 1) sign = -sign;
      out.d.push_back(b.d[j++]);
    }
  }
  while (i < a.d.size()) out.d.push_back(a.d[i++]);
  while (j < b.d.size()) out.d.push_back(b.d[j++]);
  return std::make_pair(std::move(out), sign);
}

DiffForm DiffForm::scalar(Expr e) {
  DiffForm f;
  f.add(Monomial{}, e);
  return f;
}

DiffForm DiffForm::differential(const Coordinate& c) {
  DiffForm f;
  f.add(Monomial{{c}}, Expr::one());
  return f;
}

DiffForm DiffForm::term(Monomial m, Expr coeff) {
  DiffForm f;
  f.add(m, coeff);
  return f;
}

bool DiffForm::is_zero() const { return terms_.empty(); }

Expr DiffForm::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Expr::zero() : it->second;
}

std::optional<int> DiffForm::degree() const {
  std::optional<int> deg;
  for (auto& [m, c] : terms_) {
    if (!deg) deg = m.degree();
    else if (*deg != m.degree()) return std::nullopt;
  }
  return deg ? deg : std::optional<int>(0);
}

DiffForm& DiffForm::add(const Monomial& m, const Expr& coeff) {
  if (coeff.is_zero()) return *this;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, coeff);
  } else {
    Expr s = it->second + coeff;
    if (s.is_zero()) terms_.erase(it);
    else it->second = s;
  }
  return *this;
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
  DiffForm out = *this;
  for (auto& [m, c] : o.terms_) out.add(m, c);
  return out;
}

DiffForm DiffForm::operator-(const DiffForm& o) const {
  DiffForm out = *this;
  for (auto& [m, c] : o.terms_) out.add(m, -c);
  return out;
}

DiffForm DiffForm::operator*(const Expr& s) const {
  DiffForm out;
  for (auto& [m, c] : terms_) out.add(m, c * s);
  return out;
}

DiffForm DiffForm::part(int degree) const {
  DiffForm out;
  for (auto& [m, c] : terms_)
    if (m.degree() == degree) out.add(m, c);
  return out;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
  DiffForm out;
  for (auto& [ma, ca] : a.terms())
    for (auto& [mb, cb] : b.terms()) {
      auto w = wedge_mono(ma, mb);
      if (!w) continue;
      Expr coeff = ca * cb;
      if (w->second < 0) coeff = -coeff;
      out.add(w->first, coeff);
    }
  return out;
}

bool exactly_zero(const DiffForm& a) {
  for (auto& [m, c] : a.terms())
    if (!expands_to_zero(c)) return false;
  return true;
}

bool exactly_equal(const DiffForm& a, const DiffForm& b) { return exactly_zero(a - b); }

std::string render(const DiffForm& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [m, c] : f.terms()) {
    if (!first) os << " + ";
    first = false;
    std::string cs = render(c);
    bool composite = c.kind() == Kind::Sum || (c.kind() == Kind::Number && c.number() < 0);
    if (m.d.empty()) {
      os << cs;
      continue;
    }
    if (!c.is_one()) os << (composite ? "(" + cs + ")" : cs) << "*";
    for (size_t i = 0; i < m.d.size(); ++i) {
      if (i) os << "^";
      os << "d[" << m.d[i].name << "]";
    }
  }
  return os.str();
}

void MixedForm::check_degrees() const {
  auto da = alpha.degree();
  auto db = beta.degree();
  if (!da || !db) throw ContextError("mixed form components must be homogeneous");
  if (!alpha.is_zero() && !beta.is_zero() && *db != *da + 1)
    throw ContextError("mixed form degrees must differ by exactly one");
}

VectorField& VectorField::set(const Coordinate& c, Expr e) {
  if (e.is_zero()) comps_.erase(c);
  else comps_[c] = std::move(e);
  return *this;
}

Expr VectorField::component(const Coordinate& c) const {
  auto it = comps_.find(c);
  return it == comps_.end() ? Expr::zero() : it->second;
}

bool VectorField::projectable() const {
  for (auto& [c, e] : comps_) {
    if (c.role != Role::Base) continue;
    for (const Coordinate& fc : free_coords(e))
      if (fc.role != Role::Base) return false;
  }
  return true;
}

bool VectorField::vertical() const {
  for (auto& [c, e] : comps_)
    if (c.role == Role::Base && !e.is_zero()) return false;
  return true;
}

bool VectorField::p_vertical() const {
  std::set<int> dirs;
  for (auto& [mu, i] : ctx_.P()) dirs.insert(mu);
  for (auto& [c, e] : comps_)
    if (c.role == Role::Base && dirs.count(c.base) && !e.is_zero()) return false;
  return true;
}

Expr VectorField::apply(const Expr& f) const {
  std::vector<Expr> terms;
  for (auto& [c, e] : comps_) {
    Expr df = differentiate(f, c);
    if (!df.is_zero()) terms.push_back(e * df);
  }
  return Expr::sum(std::move(terms));
}

VectorField VectorField::operator+(const VectorField& o) const {
  VectorField out = *this;
  for (auto& [c, e] : o.comps_) out.set(c, out.component(c) + e);
  return out;
}

VectorField VectorField::operator*(const Expr& s) const {
  VectorField out(ctx_);
  for (auto& [c, e] : comps_) out.set(c, e * s);
  return out;
}

VectorField bracket(const VectorField& a, const VectorField& b) {
  VectorField out(a.ctx());
  std::set<Coordinate, CoordLess> coords;
  for (auto& [c, e] : a.components()) coords.insert(c);
  for (auto& [c, e] : b.components()) coords.insert(c);
  for (const Coordinate& c : coords)
    out.set(c, a.apply(b.component(c)) - b.apply(a.component(c)));
  return out;
}

}  // namespace jc
