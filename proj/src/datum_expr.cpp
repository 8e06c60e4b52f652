#include "fblab/datum_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace fblab {

struct DatumExpr::Node {
  enum class Op { Const, X1, X2, Add, Sub, Mul, Div, Neg, Pow, Pos, Abs } op;
  double value = 0.0;
  int exponent = 0;
  std::shared_ptr<const Node> lhs, rhs;

  bool constant() const {
    switch (op) {
      case Op::Const: return true;
      case Op::X1:
      case Op::X2: return false;
      default: return (!lhs || lhs->constant()) && (!rhs || rhs->constant());
    }
  }

  double eval(Point x) const {
    switch (op) {
      case Op::Const: return value;
      case Op::X1: return x.x1;
      case Op::X2: return x.x2;
      case Op::Add: return lhs->eval(x) + rhs->eval(x);
      case Op::Sub: return lhs->eval(x) - rhs->eval(x);
      case Op::Mul: return lhs->eval(x) * rhs->eval(x);
      case Op::Div: return lhs->eval(x) / rhs->eval(x);
      case Op::Neg: return -lhs->eval(x);
      case Op::Pow: {
        const double b = lhs->eval(x);
        double r = 1.0;
        for (int i = 0; i < exponent; ++i) r *= b;
        return r;
      }
      case Op::Pos: return std::max(lhs->eval(x), 0.0);
      case Op::Abs: return std::abs(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const DatumExpr::Node>;
using Op = DatumExpr::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<DatumExpr::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("datum expression, column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr e = term();
    for (;;) {
      if (accept('+')) e = make(Op::Add, e, term());
      else if (accept('-')) e = make(Op::Sub, e, term());
      else return e;
    }
  }

  NodePtr term() {
    NodePtr e = unary();
    for (;;) {
      if (accept('*')) {
        e = make(Op::Mul, e, unary());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        NodePtr d = unary();
        if (!d->constant()) {
          pos_ = at;
          fail("division is only allowed by constants");
        }
        if (d->eval({}) == 0.0) {
          pos_ = at;
          fail("division by zero");
        }
        e = make(Op::Div, e, d);
      } else {
        return e;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail("exponent must be a nonnegative integer");
    const int p = std::atoi(s_.substr(start, pos_ - start).c_str());
    if (p > 16) fail("exponent larger than 16");
    auto n = std::make_shared<DatumExpr::Node>();
    n->op = Op::Pow;
    n->lhs = base;
    n->exponent = p;
    return n;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<DatumExpr::Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string word = s_.substr(start, pos_ - start);
      if (word == "x1") return make(Op::X1);
      if (word == "x2") return make(Op::X2);
      if (word == "pos" || word == "abs") {
        expect('(');
        NodePtr e = expr();
        expect(')');
        return make(word == "pos" ? Op::Pos : Op::Abs, e);
      }
      pos_ = start;
      fail("unknown identifier '" + word + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

DatumExpr DatumExpr::parse(const std::string& text) {
  DatumExpr d;
  d.source_ = text;
  d.root_ = Parser(text).parse();
  return d;
}

double DatumExpr::operator()(Point x) const { return root_->eval(x); }

}  // namespace fblab
