#ifndef JETCARTAN_PARSER_HPP
#define JETCARTAN_PARSER_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetcartan/expression.hpp"

namespace jc {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t pos, const std::string& msg)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos),
        message(msg) {}
  std::size_t position;
  std::string message;
};

// Identifier resolution for the parser. JetContext implements this.
struct SymbolScope {
  virtual ~SymbolScope() = default;
  virtual std::optional<Coordinate> lookup(const std::string& name) const = 0;
  virtual bool is_param(const std::string& name) const = 0;
  // d(field, d1[, d2]) with semicolon=false; d(field; d1[, d2]) with true.
  // Must throw ParseError for unknown names or jets not admitted.
  virtual Coordinate jet_coordinate(const std::string& field,
                                    const std::vector<std::string>& dirs, bool semicolon,
                                    std::size_t pos) const = 0;
};

// Grammar: infix + - * / ^ (right-assoc ^), unary minus, integer literals,
// f(arg) for sin/cos/exp/ln/sqrt, jet coordinates d(field,dir[,dir2]),
// unknown-function atoms ?name(args) and ?name[k,...](args),
// identifiers [A-Za-z][A-Za-z0-9_]*.
Expr parse(const std::string& text, const SymbolScope& scope);

}  // namespace jc

#endif
