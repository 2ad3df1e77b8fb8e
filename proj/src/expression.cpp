#include "nlscn/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "nlscn/errors.hpp"

namespace nlscn {

namespace {

using Op = Expression::Op;

double f_abs(double v) { return std::abs(v); }
double f_min(double a, double b) { return std::min(a, b); }
double f_max(double a, double b) { return std::max(a, b); }

struct Parser {
  const std::string& s;
  std::vector<Expression::Node>& out;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + s + "': " + what + " at column " + std::to_string(pos + 1));
  }

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool accept(const char* tok) {
    skip();
    const std::size_t n = std::char_traits<char>::length(tok);
    if (s.compare(pos, n, tok) == 0) {
      pos += n;
      return true;
    }
    return false;
  }

  void emit(Op op) { out.push_back({op}); }

  void parse() {
    comparison();
    skip();
    if (pos != s.size()) fail("unexpected input");
  }

  void comparison() {
    additive();
    for (;;) {
      if (accept("<=")) { additive(); emit(Op::le); }
      else if (accept(">=")) { additive(); emit(Op::ge); }
      else if (accept("<")) { additive(); emit(Op::lt); }
      else if (accept(">")) { additive(); emit(Op::gt); }
      else return;
    }
  }

  void additive() {
    term();
    for (;;) {
      if (accept("+")) { term(); emit(Op::add); }
      else if (accept("-")) { term(); emit(Op::sub); }
      else return;
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept("*")) { unary(); emit(Op::mul); }
      else if (accept("/")) { unary(); emit(Op::div); }
      else return;
    }
  }

  void unary() {
    if (accept("-")) {
      unary();
      emit(Op::neg);
    } else if (accept("+")) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (accept("^")) {
      unary();  // right-associative, binds an optional sign: 2^-3
      emit(Op::pow);
    }
  }

  void primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos += static_cast<std::size_t>(end - begin);
      out.push_back({Op::number, v});
      return;
    }
    if (accept("(")) {
      comparison();
      if (!accept(")")) fail("expected ')'");
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos;
      while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_')) ++end;
      const std::string name = s.substr(pos, end - pos);
      pos = end;
      if (name == "x") return emit(Op::var_x);
      if (name == "y") return emit(Op::var_y);
      if (name == "pi") {
        out.push_back({Op::number, std::numbers::pi});
        return;
      }
      double (*f1)(double) = nullptr;
      double (*f2)(double, double) = nullptr;
      if (name == "sin") f1 = [](double v) { return std::sin(v); };
      else if (name == "cos") f1 = [](double v) { return std::cos(v); };
      else if (name == "tan") f1 = [](double v) { return std::tan(v); };
      else if (name == "exp") f1 = [](double v) { return std::exp(v); };
      else if (name == "log") f1 = [](double v) { return std::log(v); };
      else if (name == "sqrt") f1 = [](double v) { return std::sqrt(v); };
      else if (name == "tanh") f1 = [](double v) { return std::tanh(v); };
      else if (name == "abs") f1 = f_abs;
      else if (name == "min") f2 = f_min;
      else if (name == "max") f2 = f_max;
      else fail("unknown name '" + name + "'");
      if (!accept("(")) fail("expected '(' after " + name);
      comparison();
      if (f2 != nullptr) {
        if (!accept(",")) fail("expected ','");
        comparison();
      }
      if (!accept(")")) fail("expected ')'");
      Expression::Node n{f2 ? Op::call2 : Op::call1};
      n.f1 = f1;
      n.f2 = f2;
      out.push_back(n);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expression::Expression(const std::string& source) : source_(source) {
  Parser p{source_, nodes_};
  p.parse();
}

double Expression::operator()(double x, double y) const {
  double stack[64];
  int top = 0;
  for (const Node& n : nodes_) {
    if (top >= 62) throw ConfigError("expression '" + source_ + "' is nested too deeply");
    switch (n.op) {
      case Op::number: stack[top++] = n.value; break;
      case Op::var_x: stack[top++] = x; break;
      case Op::var_y: stack[top++] = y; break;
      case Op::neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::call1: stack[top - 1] = n.f1(stack[top - 1]); break;
      default: {
        const double b = stack[--top];
        double& a = stack[top - 1];
        switch (n.op) {
          case Op::add: a += b; break;
          case Op::sub: a -= b; break;
          case Op::mul: a *= b; break;
          case Op::div: a /= b; break;
          case Op::pow: a = std::pow(a, b); break;
          case Op::lt: a = a < b ? 1.0 : 0.0; break;
          case Op::le: a = a <= b ? 1.0 : 0.0; break;
          case Op::gt: a = a > b ? 1.0 : 0.0; break;
          case Op::ge: a = a >= b ? 1.0 : 0.0; break;
          case Op::call2: a = n.f2(a, b); break;
          default: break;
        }
      }
    }
  }
  return stack[0];
}

}  // namespace nlscn
