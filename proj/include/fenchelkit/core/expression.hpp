#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fenchelkit/core/vec.hpp"

namespace fenchelkit {

class ExpressionError : public std::invalid_argument {
 public:
  ExpressionError(const std::string& msg, std::size_t column)
      : std::invalid_argument("column " + std::to_string(column + 1) + ": " + msg),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Arithmetic expression in the spatial variables x1, x2.
///
/// Grammar (recursive descent, `^` right-associative and binding tighter
/// than unary minus):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | 'x1' | 'x2' | func '(' args ')' | '(' expr ')'
///     func    := exp | log | abs (one argument) | min | max (two arguments)
class Expression {
 public:
  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    auto root = p.expr();
    p.skip();
    if (p.pos != text.size()) throw ExpressionError("unexpected trailing input", p.pos);
    return Expression(std::move(root), text);
  }

  double operator()(const Vec2N& x) const { return eval(*root_, x); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { kNum, kX1, kX2, kAdd, kSub, kMul, kDiv, kPow, kNeg, kExp, kLog, kAbs, kMin, kMax };
  struct Node {
    Op op;
    double value = 0.0;
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expression(NodePtr root, std::string text) : root_(std::move(root)), text_(std::move(text)) {}

  static NodePtr make(Op op, std::vector<NodePtr> args = {}, double v = 0.0) {
    return std::make_shared<const Node>(Node{op, v, std::move(args)});
  }

  static double eval(const Node& n, const Vec2N& x) {
    auto a = [&](std::size_t i) { return eval(*n.args[i], x); };
    switch (n.op) {
      case Op::kNum: return n.value;
      case Op::kX1: return x[0];
      case Op::kX2: return x.n == 2 ? x[1] : 0.0;
      case Op::kAdd: return a(0) + a(1);
      case Op::kSub: return a(0) - a(1);
      case Op::kMul: return a(0) * a(1);
      case Op::kDiv: return a(0) / a(1);
      case Op::kPow: return std::pow(a(0), a(1));
      case Op::kNeg: return -a(0);
      case Op::kExp: return std::exp(a(0));
      case Op::kLog: return std::log(a(0));
      case Op::kAbs: return std::abs(a(0));
      case Op::kMin: return std::min(a(0), a(1));
      case Op::kMax: return std::max(a(0), a(1));
    }
    return 0.0;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    void expect(char c) {
      if (!accept(c)) throw ExpressionError(std::string("expected '") + c + "'", pos);
    }

    NodePtr expr() {
      auto lhs = term();
      for (;;) {
        if (accept('+'))
          lhs = make(Op::kAdd, {lhs, term()});
        else if (accept('-'))
          lhs = make(Op::kSub, {lhs, term()});
        else
          return lhs;
      }
    }
    NodePtr term() {
      auto lhs = unary();
      for (;;) {
        if (accept('*'))
          lhs = make(Op::kMul, {lhs, unary()});
        else if (accept('/'))
          lhs = make(Op::kDiv, {lhs, unary()});
        else
          return lhs;
      }
    }
    NodePtr unary() {
      if (accept('-')) return make(Op::kNeg, {unary()});
      return power();
    }
    NodePtr power() {
      auto base = primary();
      if (accept('^')) return make(Op::kPow, {base, unary()});
      return base;
    }
    NodePtr primary() {
      skip();
      if (pos >= s.size()) throw ExpressionError("unexpected end of expression", pos);
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        auto e = expr();
        expect(')');
        return e;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
      throw ExpressionError(std::string("unexpected character '") + c + "'", pos);
    }
    NodePtr number() {
      const char* begin = s.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) throw ExpressionError("malformed number", pos);
      pos += static_cast<std::size_t>(end - begin);
      return make(Op::kNum, {}, v);
    }
    NodePtr identifier() {
      const std::size_t start = pos;
      while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
      const std::string id = s.substr(start, pos - start);
      if (id == "x1") return make(Op::kX1);
      if (id == "x2") return make(Op::kX2);
      Op op;
      int arity;
      if (id == "exp") {
        op = Op::kExp, arity = 1;
      } else if (id == "log") {
        op = Op::kLog, arity = 1;
      } else if (id == "abs") {
        op = Op::kAbs, arity = 1;
      } else if (id == "min") {
        op = Op::kMin, arity = 2;
      } else if (id == "max") {
        op = Op::kMax, arity = 2;
      } else {
        throw ExpressionError("unknown identifier '" + id + "'", start);
      }
      expect('(');
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      expect(')');
      if (static_cast<int>(args.size()) != arity)
        throw ExpressionError("'" + id + "' takes " + std::to_string(arity) + " argument(s)", start);
      return make(op, std::move(args));
    }
  };

  NodePtr root_;
  std::string text_;
};

}  // namespace fenchelkit
