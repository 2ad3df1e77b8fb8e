#pragma once

#include <memory>
#include <string>
#include <vector>

namespace nlscn {

/// Compiled arithmetic expression in the variables x and y.
///
/// Grammar: numbers, x, y, pi, + - * / ^ (right-associative), unary minus,
/// parentheses, comparisons (< <= > >= evaluating to 1 or 0) and the
/// functions sin cos tan exp log sqrt abs tanh min max.
/// Throws ConfigError with the offending column on a syntax error.
class Expression {
 public:
  explicit Expression(const std::string& source);

  double operator()(double x, double y) const;
  const std::string& source() const { return source_; }

  enum class Op { number, var_x, var_y, neg, add, sub, mul, div, pow, lt, le, gt, ge, call1, call2 };
  struct Node {
    Op op;
    double value = 0.0;
    double (*f1)(double) = nullptr;
    double (*f2)(double, double) = nullptr;
  };

 private:
  std::string source_;
  std::vector<Node> nodes_;  // postfix program
};

}  // namespace nlscn
