#pragma once

// Arithmetic expression language for configuration files: coordinates x1..xn,
// literals, + - * / unary minus, integer powers, and sin/cos/exp/sqrt.
// Parsing is recursive descent; evaluation is templated over the scalar type
// so expression-backed fields keep full AD depth.

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <dirac/dual.hpp>
#include <dirac/fields.hpp>

namespace dirac {

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(const std::string& what, size_t off)
      : std::runtime_error(what + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct EvalError : std::runtime_error {
  std::vector<double> point;
  EvalError(const std::string& what, std::vector<double> pt)
      : std::runtime_error(what), point(std::move(pt)) {}
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Num, Coord, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Sin, Cos, Exp, Sqrt };

  Kind kind = Kind::Num;
  double num = 0.0;   // Num
  int index = 0;      // Coord: 0-based coordinate; Pow: exponent
  Func func = Func::Sin;
  ExprPtr a, b;

  Expr() = default;
  explicit Expr(Kind k) : kind(k) {}
};

// Parses with coordinates x1..x<n_coords>; aliases map extra identifiers to
// 0-based coordinate indices (e.g. {"t", 0} for path configs).
ExprPtr parse_expr(const std::string& text, int n_coords,
                   const std::map<std::string, int>& aliases = {});

// Fully parenthesized; parse(print(e)) is structurally identical to e for
// every tree the parser can produce.
std::string print_expr(const Expr& e);

bool expr_equal(const Expr& a, const Expr& b);

namespace detail {
[[noreturn]] void throw_eval_error(const char* what, const double* x, size_t n);
}

template <class T>
T eval_expr(const Expr& e, std::span<const T> x) {
  auto fail = [&](const char* what) -> T {
    std::vector<double> pt(x.size());
    for (size_t i = 0; i < x.size(); ++i) pt[i] = primal(x[i]);
    detail::throw_eval_error(what, pt.data(), pt.size());
  };
  switch (e.kind) {
    case Expr::Kind::Num:
      return T(e.num);
    case Expr::Kind::Coord:
      return x[e.index];
    case Expr::Kind::Neg:
      return -eval_expr(*e.a, x);
    case Expr::Kind::Add:
      return eval_expr(*e.a, x) + eval_expr(*e.b, x);
    case Expr::Kind::Sub:
      return eval_expr(*e.a, x) - eval_expr(*e.b, x);
    case Expr::Kind::Mul:
      return eval_expr(*e.a, x) * eval_expr(*e.b, x);
    case Expr::Kind::Div: {
      T den = eval_expr(*e.b, x);
      if (primal(den) == 0.0) return fail("division by zero");
      return eval_expr(*e.a, x) / den;
    }
    case Expr::Kind::Pow: {
      T base = eval_expr(*e.a, x);
      if (e.index < 0 && primal(base) == 0.0) return fail("zero base with negative exponent");
      return ipow(base, e.index);
    }
    case Expr::Kind::Call: {
      T v = eval_expr(*e.a, x);
      switch (e.func) {
        case Expr::Func::Sin:
          return sin(v);
        case Expr::Func::Cos:
          return cos(v);
        case Expr::Func::Exp:
          return exp(v);
        case Expr::Func::Sqrt:
          if (primal(v) < 0.0) return fail("sqrt of negative value");
          return sqrt(v);
      }
    }
  }
  throw std::logic_error("eval_expr: corrupt tree");
}

ScalarField scalar_field_from_expr(ExprPtr e, int n_coords);

}  // namespace dirac
