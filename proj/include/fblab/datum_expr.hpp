#pragma once

#include <memory>
#include <string>

#include "fblab/error.hpp"

namespace fblab {

/// Closed-form datum in x1, x2. Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*      division by constants only
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' integer)?
///   primary := number | x1 | x2 | '(' expr ')' | pos '(' expr ')' | abs '(' expr ')'
/// pos(e) is the positive part max(e, 0).
class DatumExpr {
 public:
  struct Node;

  /// Throws ValidationError naming the column of the first problem.
  static DatumExpr parse(const std::string& text);

  double operator()(Point x) const;
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace fblab
