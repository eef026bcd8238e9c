#ifndef JETCARTAN_EXPRESSION_HPP
#define JETCARTAN_EXPRESSION_HPP

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetcartan/coordinate.hpp"
#include "jetcartan/rational.hpp"

namespace jc {

enum class Kind : std::uint8_t { Number, Coord, Param, Power, Call, Unknown, Product, Sum };
enum class Builtin : std::uint8_t { Sin, Cos, Exp, Ln };

struct Node;

// Immutable symbolic scalar. Every factory normalizes: sums/products are
// flat and sorted, like terms and like factors combined, rationals exact.
class Expr {
 public:
  Expr();  // zero

  static Expr num(Rational q);
  static Expr num(long n) { return num(Rational(n)); }
  static Expr coord(Coordinate c);
  static Expr param(std::string name);
  static Expr sum(std::vector<Expr> terms);
  static Expr prod(std::vector<Expr> factors);
  static Expr pow(const Expr& base, const Rational& exponent);
  static Expr call(Builtin fn, const Expr& arg);
  static Expr sqrt(const Expr& arg) { return pow(arg, Rational(1, 2)); }
  // Opaque function symbol ?name(args); derivs = sorted arg positions (0-based)
  // it has been differentiated against.
  static Expr unknown(std::string name, std::vector<Expr> args, std::vector<int> derivs = {});

  const Node& node() const { return *n_; }
  Kind kind() const;
  bool is_zero() const;
  bool is_one() const;
  bool is_number() const;
  const Rational& number() const;  // requires Kind::Number

  Expr operator-() const;

  static Expr zero() { return num(0l); }
  static Expr one() { return num(1l); }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
  friend int compare(const Expr&, const Expr&);
  friend struct Node;
};

struct Node {
  Kind kind = Kind::Number;
  Rational num;             // Number
  Coordinate coord;         // Coord
  std::string name;         // Param, Unknown
  std::vector<Expr> args;   // Sum/Product children; Power base; Call/Unknown args
  Rational expo;            // Power
  Builtin fn = Builtin::Sin;
  std::vector<int> derivs;  // Unknown
};

int compare(const Expr& a, const Expr& b);  // structural total order
inline bool struct_eq(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);  // b^(-1) product

struct CoordLess {
  bool operator()(const Coordinate& a, const Coordinate& b) const { return a < b; }
};
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

using Bindings = std::map<Coordinate, Expr, CoordLess>;
using NumPoint = std::map<Coordinate, double, CoordLess>;
using ParamValues = std::map<std::string, double>;

// Exact partial derivative; absent coordinate differentiates to zero.
Expr differentiate(const Expr& e, const Coordinate& c);
Expr differentiate_param(const Expr& e, const std::string& name);

// Simultaneous substitution, then normalization.
Expr substitute(const Expr& e, const Bindings& b);
Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& b);

class EvalError : public std::runtime_error {
 public:
  enum class Code { Unbound, Domain };
  EvalError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
  Code code;
};

double evaluate(const Expr& e, const NumPoint& point, const ParamValues& params = {});

// Distributes products/integer powers over sums; the zero test behind
// structural equivalence.
Expr expand(const Expr& e);

enum class Equivalence { StructurallyEqual, ProbablyEqual, NotEqual };
Equivalence equivalent(const Expr& a, const Expr& b);
inline bool definitely_equal(const Expr& a, const Expr& b) {
  return equivalent(a, b) != Equivalence::NotEqual;
}
// Exact zero after expansion (the "exact symbolic equality" used by tests).
bool expands_to_zero(const Expr& e);
inline bool exactly_equal(const Expr& a, const Expr& b) { return expands_to_zero(a - b); }

void collect_coords(const Expr& e, std::set<Coordinate, CoordLess>& out);
std::set<Coordinate, CoordLess> free_coords(const Expr& e);
bool depends_on(const Expr& e, const Coordinate& c);
bool has_unknowns(const Expr& e);

// Polynomial in the given coordinates (no Call/Unknown carrying them, integer
// exponents >= 0 on them)?
bool polynomial_in(const Expr& e, const std::set<Coordinate, CoordLess>& vars);

std::string render(const Expr& e);

}  // namespace jc

#endif
