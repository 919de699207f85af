#include <dirac/expr.hpp>

#include <cctype>
#include <cstdio>
#include <cstring>

namespace dirac {

namespace detail {

void throw_eval_error(const char* what, const double* x, size_t n) {
  throw EvalError(what, std::vector<double>(x, x + n));
}

}  // namespace detail

namespace {

struct Parser {
  const std::string& text;
  size_t pos = 0;
  int n_coords;
  const std::map<std::string, int>& aliases;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos); }

  ExprPtr make(Expr e) { return std::make_shared<Expr>(std::move(e)); }

  ExprPtr parse_expr_rule() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (consume('+')) {
        Expr e{Expr::Kind::Add};
        e.a = lhs;
        e.b = parse_term();
        lhs = make(std::move(e));
      } else if (consume('-')) {
        Expr e{Expr::Kind::Sub};
        e.a = lhs;
        e.b = parse_term();
        lhs = make(std::move(e));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      if (consume('*')) {
        Expr e{Expr::Kind::Mul};
        e.a = lhs;
        e.b = parse_factor();
        lhs = make(std::move(e));
      } else if (consume('/')) {
        Expr e{Expr::Kind::Div};
        e.a = lhs;
        e.b = parse_factor();
        lhs = make(std::move(e));
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    if (consume('-')) {
      ExprPtr inner = parse_factor();
      // fold a negated literal into the literal so "-1.5" round-trips
      if (inner->kind == Expr::Kind::Num) {
        Expr e{Expr::Kind::Num};
        e.num = -inner->num;
        return make(std::move(e));
      }
      Expr e{Expr::Kind::Neg};
      e.a = inner;
      return make(std::move(e));
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    while (consume('^')) {
      Expr e{Expr::Kind::Pow};
      e.a = base;
      e.index = parse_int_exponent();
      base = make(std::move(e));
    }
    return base;
  }

  int parse_int_exponent() {
    skip_ws();
    bool neg = false;
    if (pos < text.size() && text[pos] == '-') {
      neg = true;
      ++pos;
    }
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      fail("expected integer exponent after '^'");
    long v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos] - '0');
      if (v > 1000) fail("exponent too large");
      ++pos;
    }
    return static_cast<int>(neg ? -v : v);
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_expr_rule();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // not an exponent suffix
      }
    }
    std::string tok = text.substr(start, pos - start);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
      pos = start;
      fail("malformed number '" + tok + "'");
    }
    Expr e{Expr::Kind::Num};
    e.num = v;
    return make(std::move(e));
  }

  ExprPtr parse_ident() {
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name = text.substr(start, pos - start);
    if (peek_is('(')) {
      Expr::Func f;
      if (name == "sin")
        f = Expr::Func::Sin;
      else if (name == "cos")
        f = Expr::Func::Cos;
      else if (name == "exp")
        f = Expr::Func::Exp;
      else if (name == "sqrt")
        f = Expr::Func::Sqrt;
      else {
        pos = start;
        fail("unknown function '" + name + "'");
      }
      ++pos;  // '('
      Expr e{Expr::Kind::Call};
      e.func = f;
      e.a = parse_expr_rule();
      if (!consume(')')) fail("expected ')' after function argument");
      return make(std::move(e));
    }
    int idx = -1;
    if (auto it = aliases.find(name); it != aliases.end()) {
      idx = it->second;
    } else if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (size_t i = 1; i < name.size(); ++i)
        digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
      if (digits) idx = std::stoi(name.substr(1)) - 1;
    }
    if (idx < 0) {
      pos = start;
      fail("unknown identifier '" + name + "'");
    }
    if (idx >= n_coords) {
      pos = start;
      fail("coordinate '" + name + "' exceeds chart dimension " + std::to_string(n_coords));
    }
    Expr e{Expr::Kind::Coord};
    e.index = idx;
    return make(std::move(e));
  }
};

const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::Sin:
      return "sin";
    case Expr::Func::Cos:
      return "cos";
    case Expr::Func::Exp:
      return "exp";
    case Expr::Func::Sqrt:
      return "sqrt";
  }
  return "?";
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExprPtr parse_expr(const std::string& text, int n_coords,
                   const std::map<std::string, int>& aliases) {
  Parser p{text, 0, n_coords, aliases};
  p.skip_ws();
  if (p.pos >= text.size()) throw ParseError("empty expression", 0);
  ExprPtr e = p.parse_expr_rule();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Num:
      return fmt_num(e.num);
    case Expr::Kind::Coord:
      return "x" + std::to_string(e.index + 1);
    case Expr::Kind::Neg:
      return "(-" + print_expr(*e.a) + ")";
    case Expr::Kind::Add:
      return "(" + print_expr(*e.a) + " + " + print_expr(*e.b) + ")";
    case Expr::Kind::Sub:
      return "(" + print_expr(*e.a) + " - " + print_expr(*e.b) + ")";
    case Expr::Kind::Mul:
      return "(" + print_expr(*e.a) + " * " + print_expr(*e.b) + ")";
    case Expr::Kind::Div:
      return "(" + print_expr(*e.a) + " / " + print_expr(*e.b) + ")";
    case Expr::Kind::Pow:
      return "(" + print_expr(*e.a) + "^" + std::to_string(e.index) + ")";
    case Expr::Kind::Call:
      return std::string(func_name(e.func)) + "(" + print_expr(*e.a) + ")";
  }
  return "?";
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Num:
      return a.num == b.num;
    case Expr::Kind::Coord:
      return a.index == b.index;
    case Expr::Kind::Neg:
      return expr_equal(*a.a, *b.a);
    case Expr::Kind::Pow:
      return a.index == b.index && expr_equal(*a.a, *b.a);
    case Expr::Kind::Call:
      return a.func == b.func && expr_equal(*a.a, *b.a);
    default:
      return expr_equal(*a.a, *b.a) && expr_equal(*a.b, *b.b);
  }
}

ScalarField scalar_field_from_expr(ExprPtr e, int n_coords) {
  return ScalarField::from_function(n_coords,
                                    [e](auto x) { return eval_expr(*e, x); });
}

}  // namespace dirac
