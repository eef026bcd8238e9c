#ifndef JETCARTAN_DIFF_FORM_HPP
#define JETCARTAN_DIFF_FORM_HPP

#include <map>
#include <optional>

#include "jetcartan/jet_context.hpp"

namespace jc {

// Strictly increasing list of coordinate differentials; the empty monomial
// is a scalar (0-form) slot.
struct Monomial {
  std::vector<Coordinate> d;
  int degree() const { return (int)d.size(); }
};

int compare(const Monomial& a, const Monomial& b);
struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

// Wedge of two sorted monomials; zero if a differential repeats.
std::optional<std::pair<Monomial, int>> wedge_mono(const Monomial& a, const Monomial& b);

class DiffForm {
 public:
  DiffForm() = default;

  static DiffForm zero() { return DiffForm(); }
  static DiffForm scalar(Expr e);
  static DiffForm differential(const Coordinate& c);  // dc
  static DiffForm term(Monomial m, Expr coeff);       // m assumed sorted

  bool is_zero() const;  // structural (stored coefficients are normalized)
  const std::map<Monomial, Expr, MonoLess>& terms() const { return terms_; }
  Expr coefficient(const Monomial& m) const;
  // degree if homogeneous (ignoring zero), nullopt for mixed degree
  std::optional<int> degree() const;

  DiffForm& add(const Monomial& m, const Expr& coeff);
  DiffForm operator+(const DiffForm& o) const;
  DiffForm operator-(const DiffForm& o) const;
  DiffForm operator*(const Expr& s) const;  // scalar multiple
  DiffForm operator-() const { return *this * Expr::num(-1l); }

  // component of the given degree
  DiffForm part(int degree) const;

 private:
  std::map<Monomial, Expr, MonoLess> terms_;
};

DiffForm wedge(const DiffForm& a, const DiffForm& b);

// Exact equality coefficient-by-coefficient (expansion-based zero test).
bool exactly_equal(const DiffForm& a, const DiffForm& b);
bool exactly_zero(const DiffForm& a);

std::string render(const DiffForm& f);

// Pair (alpha^k, beta^{k+1}); the carrier of the Iglesias differential and
// of Poincare-Cartan data.
struct MixedForm {
  DiffForm alpha;
  DiffForm beta;
  void check_degrees() const;
};

inline bool exactly_equal(const MixedForm& a, const MixedForm& b) {
  return exactly_equal(a.alpha, b.alpha) && exactly_equal(a.beta, b.beta);
}

// Vector field with Expression components over any chart coordinates.
// Flags are recomputed from components on every query.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(JetContext ctx) : ctx_(std::move(ctx)) {}

  const JetContext& ctx() const { return ctx_; }
  VectorField& set(const Coordinate& c, Expr e);
  Expr component(const Coordinate& c) const;  // zero if absent
  const std::map<Coordinate, Expr, CoordLess>& components() const { return comps_; }

  bool projectable() const;  // base components depend on base coordinates only
  bool vertical() const;     // no base components
  bool p_vertical() const;   // no base components along directions appearing in P

  Expr apply(const Expr& f) const;  // derivation sum_c xi^c d f/dc
  VectorField operator+(const VectorField& o) const;
  VectorField operator*(const Expr& s) const;

 private:
  JetContext ctx_;
  std::map<Coordinate, Expr, CoordLess> comps_;
};

VectorField bracket(const VectorField& a, const VectorField& b);

}  // namespace jc

#endif
