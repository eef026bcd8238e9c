#include "jetcartan/parser.hpp"

#include <cctype>

namespace jc {

namespace {

struct Token {
  enum Type { Ident, Number, Op, LParen, RParen, LBracket, RBracket, Comma, Semicolon,
              Question, End } type;
  std::string text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace((unsigned char)s_[i_])) ++i_;
    tok_.pos = i_;
    if (i_ >= s_.size()) {
      tok_.type = Token::End;
      tok_.text.clear();
      return;
    }
    char c = s_[i_];
    if (std::isalpha((unsigned char)c)) {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum((unsigned char)s_[j]) || s_[j] == '_')) ++j;
      tok_ = {Token::Ident, s_.substr(i_, j - i_), i_};
      i_ = j;
      return;
    }
    if (std::isdigit((unsigned char)c)) {
      std::size_t j = i_;
      while (j < s_.size() && std::isdigit((unsigned char)s_[j])) ++j;
      bool decimal = false;
      if (j < s_.size() && s_[j] == '.' && j + 1 < s_.size() &&
          std::isdigit((unsigned char)s_[j + 1])) {
        decimal = true;
        ++j;
        while (j < s_.size() && std::isdigit((unsigned char)s_[j])) ++j;
      }
      (void)decimal;
      tok_ = {Token::Number, s_.substr(i_, j - i_), i_};
      i_ = j;
      return;
    }
    switch (c) {
      case '(': tok_ = {Token::LParen, "(", i_}; break;
      case ')': tok_ = {Token::RParen, ")", i_}; break;
      case '[': tok_ = {Token::LBracket, "[", i_}; break;
      case ']': tok_ = {Token::RBracket, "]", i_}; break;
      case ',': tok_ = {Token::Comma, ",", i_}; break;
      case ';': tok_ = {Token::Semicolon, ";", i_}; break;
      case '?': tok_ = {Token::Question, "?", i_}; break;
      case '+': case '-': case '*': case '/': case '^':
        tok_ = {Token::Op, std::string(1, c), i_};
        break;
      default:
        throw ParseError(i_, std::string("unexpected character '") + c + "'");
    }
    ++i_;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, const SymbolScope& scope) : lex_(text), scope_(scope) {}

  Expr parse_all() {
    Expr e = parse_sum();
    if (lex_.peek().type != Token::End)
      throw ParseError(lex_.peek().pos, "unexpected trailing input");
    return e;
  }

 private:
  Expr parse_sum() {
    Expr e = parse_term();
    while (lex_.peek().type == Token::Op &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      std::string op = lex_.take().text;
      Expr rhs = parse_term();
      e = op == "+" ? e + rhs : e - rhs;
    }
    return e;
  }

  Expr parse_term() {
    Expr e = parse_unary();
    while (lex_.peek().type == Token::Op &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      std::string op = lex_.take().text;
      Expr rhs = parse_unary();
      e = op == "*" ? e * rhs : e / rhs;
    }
    return e;
  }

  Expr parse_unary() {
    if (lex_.peek().type == Token::Op && lex_.peek().text == "-") {
      lex_.take();
      return -parse_unary();
    }
    if (lex_.peek().type == Token::Op && lex_.peek().text == "+") {
      lex_.take();
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (lex_.peek().type == Token::Op && lex_.peek().text == "^") {
      std::size_t pos = lex_.take().pos;
      // exponent: signed rational literal, possibly parenthesized
      Expr ex = parse_unary();  // right-assoc via recursion
      if (!ex.is_number())
        throw ParseError(pos, "exponent must be a rational constant");
      return Expr::pow(base, ex.number());
    }
    return base;
  }

  Expr parse_number(const Token& t) {
    auto dot = t.text.find('.');
    if (dot == std::string::npos) return Expr::num(Rational(BigInt(t.text)));
    std::string digits = t.text.substr(0, dot) + t.text.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t k = dot + 1; k < t.text.size(); ++k) den *= 10;
    return Expr::num(Rational(BigInt(digits), den));
  }

  std::vector<Expr> parse_args() {
    expect(Token::LParen, "expected '('");
    std::vector<Expr> args;
    if (lex_.peek().type != Token::RParen) {
      args.push_back(parse_sum());
      while (lex_.peek().type == Token::Comma) {
        lex_.take();
        args.push_back(parse_sum());
      }
    }
    expect(Token::RParen, "expected ')'");
    return args;
  }

  Token expect(Token::Type t, const std::string& msg) {
    if (lex_.peek().type != t) throw ParseError(lex_.peek().pos, msg);
    return lex_.take();
  }

  Expr parse_jet(std::size_t dpos) {
    expect(Token::LParen, "expected '(' after d");
    Token field = expect(Token::Ident, "expected field name in jet coordinate");
    bool semicolon = false;
    if (lex_.peek().type == Token::Semicolon) {
      semicolon = true;
      lex_.take();
    } else {
      expect(Token::Comma, "expected ',' or ';' in jet coordinate");
    }
    std::vector<std::string> dirs;
    dirs.push_back(expect(Token::Ident, "expected direction name").text);
    while (lex_.peek().type == Token::Comma) {
      lex_.take();
      dirs.push_back(expect(Token::Ident, "expected direction name").text);
    }
    expect(Token::RParen, "expected ')'");
    if (dirs.size() > 2)
      throw ParseError(dpos, "jet coordinates carry at most two directions");
    return Expr::coord(scope_.jet_coordinate(field.text, dirs, semicolon, dpos));
  }

  Expr parse_unknown(std::size_t qpos) {
    Token name = expect(Token::Ident, "expected function name after '?'");
    std::vector<int> derivs;
    if (lex_.peek().type == Token::LBracket) {
      lex_.take();
      for (;;) {
        Token k = expect(Token::Number, "expected argument position");
        derivs.push_back(std::stoi(k.text) - 1);
        if (lex_.peek().type != Token::Comma) break;
        lex_.take();
      }
      expect(Token::RBracket, "expected ']'");
    }
    std::vector<Expr> args = parse_args();
    for (int d : derivs)
      if (d < 0 || d >= (int)args.size())
        throw ParseError(qpos, "derivative position out of range for ?" + name.text);
    return Expr::unknown(name.text, std::move(args), std::move(derivs));
  }

  Expr parse_atom() {
    Token t = lex_.take();
    switch (t.type) {
      case Token::Number:
        return parse_number(t);
      case Token::LParen: {
        Expr e = parse_sum();
        expect(Token::RParen, "expected ')'");
        return e;
      }
      case Token::Question:
        return parse_unknown(t.pos);
      case Token::Ident: {
        if (t.text == "d" && lex_.peek().type == Token::LParen) return parse_jet(t.pos);
        if (lex_.peek().type == Token::LParen) {
          if (t.text == "sin" || t.text == "cos" || t.text == "exp" || t.text == "ln" ||
              t.text == "sqrt") {
            std::vector<Expr> args = parse_args();
            if (args.size() != 1)
              throw ParseError(t.pos, t.text + " takes exactly one argument");
            if (t.text == "sin") return Expr::call(Builtin::Sin, args[0]);
            if (t.text == "cos") return Expr::call(Builtin::Cos, args[0]);
            if (t.text == "exp") return Expr::call(Builtin::Exp, args[0]);
            if (t.text == "ln") return Expr::call(Builtin::Ln, args[0]);
            return Expr::sqrt(args[0]);
          }
          throw ParseError(t.pos, "unknown function '" + t.text + "'");
        }
        if (auto c = scope_.lookup(t.text)) return Expr::coord(*c);
        if (scope_.is_param(t.text)) return Expr::param(t.text);
        throw ParseError(t.pos, "unknown identifier '" + t.text + "'");
      }
      default:
        throw ParseError(t.pos, "unexpected token '" + t.text + "'");
    }
  }

  Lexer lex_;
  const SymbolScope& scope_;
};

}  // namespace

Expr parse(const std::string& text, const SymbolScope& scope) {
  return Parser(text, scope).parse_all();
}

}  // namespace jc
