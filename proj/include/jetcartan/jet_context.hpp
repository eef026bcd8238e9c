#ifndef JETCARTAN_JET_CONTEXT_HPP
#define JETCARTAN_JET_CONTEXT_HPP

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jetcartan/expression.hpp"
#include "jetcartan/parser.hpp"

namespace jc {

class ContextError : public std::runtime_error {
 public:
  explicit ContextError(const std::string& msg) : std::runtime_error(msg) {}
};

// Field placement in the space-time splitting S of the state space:
// S0 carries no derivatives into the constitutive domain, St only the time
// derivative, Sx only spatial gradients, Stx all first derivatives.
enum class SplitKind { S0, St, Sx, Stx };

// The bundle chart: base/fiber names, the admitted first-jet pair set P,
// metric, optional S-splitting. Immutable; cheap to copy.
class JetContext {
 public:
  JetContext() = default;
  bool valid() const { return impl_ != nullptr; }

  int n1() const;  // number of base coordinates (n+1); index 0 is time
  int m() const;   // number of fields
  const std::vector<std::string>& base_names() const;
  const std::vector<std::string>& field_names() const;
  int base_index(const std::string& name) const;   // -1 if absent
  int field_index(const std::string& name) const;  // -1 if absent

  Coordinate base(int mu) const;
  Coordinate fiber(int i) const;
  // Jet coordinate of any order; dirs are base indices (sorted internally).
  // Order 1 with (mu,i) in P is z^i_mu; otherwise the prolongation-level
  // y^i_{;mu}. Order >= 2 likewise named by admissibility.
  Coordinate jet(int i, std::vector<std::int16_t> dirs) const;
  Coordinate jet1(int mu, int i) const;  // requires admitted(mu, i)

  bool admitted(int mu, int i) const;
  const std::set<std::pair<int, int>>& P() const;  // pairs (mu, i)
  std::vector<Coordinate> admitted_jet1() const;   // all z^i_mu, deterministic order
  bool is_ret() const { return P().empty(); }
  bool is_full() const;
  // Order-2 jet z^i_{mu sigma} lies in J^2_p iff one of the pair is admitted.
  bool jet2_exists(int i, int mu, int sigma) const;

  std::optional<SplitKind> split_of(int i) const;
  bool has_split() const;

  const std::vector<std::vector<Expr>>& metric() const;
  bool metric_euclidean() const;
  Expr sqrt_detG() const;       // sqrt(|det G|)
  Expr lambdaG() const;         // ln sqrt(|det G|)
  Expr lambdaG_d(int mu) const; // d lambda_G / dx^mu, precomputed

  const std::set<std::string>& params() const;

  // Dual-bundle chart coordinates (momentum/source slots over this chart).
  Coordinate momentum_scalar() const;
  Coordinate momentum(int mu, int i) const;
  Coordinate source(int i) const;

  const SymbolScope& scope() const;
  Expr parse_expr(const std::string& text) const { return parse(text, scope()); }

  // Same chart with a different metric (entries over base coordinates only).
  JetContext with_metric(std::vector<std::vector<Expr>> g) const;

  friend bool same_context(const JetContext& a, const JetContext& b) {
    return a.impl_ == b.impl_;
  }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  friend class ContextBuilder;
};

class ContextBuilder {
 public:
  ContextBuilder& base(std::vector<std::string> names);
  ContextBuilder& fields(std::vector<std::string> names);
  ContextBuilder& jet(const std::string& dir, const std::string& field);
  ContextBuilder& all_jets();                       // full 1-jet bundle
  ContextBuilder& split(const std::string& field, SplitKind k);
  ContextBuilder& params(std::vector<std::string> names);
  // builds with the euclidean metric; use with_metric for anything else
  JetContext build() const;

 private:
  std::vector<std::string> base_, fields_, params_;
  std::vector<std::pair<std::string, std::string>> jets_;
  bool all_jets_ = false;
  std::vector<std::pair<std::string, SplitKind>> split_;
};

// Ehresmann connection Gamma^i_mu(x, y) on the configurational bundle.
struct Connection {
  JetContext ctx;
  std::vector<std::vector<Expr>> gamma;  // [i][mu]

  static Connection flat(const JetContext& ctx);
  const Expr& at(int i, int mu) const { return gamma[i][mu]; }
  void validate() const;  // components must not touch jet coordinates
};

}  // namespace jc

#endif
