#include "ifeq/expr.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace ifeq {

struct Expr::Node {
  enum class Kind { Var, Lit, Unary, Binary, Pow };
  Kind kind;
  double value = 0.0;           // Lit
  UnaryOp uop = UnaryOp::Neg;   // Unary
  BinaryOp bop = BinaryOp::Add; // Binary
  long exponent = 0;            // Pow
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using Kind = Expr::Node::Kind;

bool is_literal(const Node& n, double v) {
  return n.kind == Kind::Lit && n.value == v;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Abs: return "abs";
  }
  return "?";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
  }
  return '?';
}

// b^n for integer n >= 0 by squaring; deterministic for fixed inputs.
double powi(double b, unsigned long n) {
  double result = 1.0;
  double p = b;
  while (n != 0) {
    if (n & 1UL) result *= p;
    p *= p;
    n >>= 1;
  }
  return result;
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalDomainError(std::string("non-finite value from ") + what);
  return v;
}

double eval_node(const Node& n, double x) {
  switch (n.kind) {
    case Kind::Var:
      return x;
    case Kind::Lit:
      return n.value;
    case Kind::Unary: {
      double a = eval_node(*n.a, x);
      switch (n.uop) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Sin: return checked(std::sin(a), "sin");
        case UnaryOp::Cos: return checked(std::cos(a), "cos");
        case UnaryOp::Exp: return checked(std::exp(a), "exp");
        case UnaryOp::Log:
          if (!(a > 0.0)) throw EvalDomainError("log of a non-positive value");
          return checked(std::log(a), "log");
        case UnaryOp::Sqrt:
          if (a < 0.0) throw EvalDomainError("sqrt of a negative value");
          return checked(std::sqrt(a), "sqrt");
        case UnaryOp::Abs: return std::fabs(a);
      }
      break;
    }
    case Kind::Binary: {
      double a = eval_node(*n.a, x);
      double b = eval_node(*n.b, x);
      switch (n.bop) {
        case BinaryOp::Add: return checked(a + b, "+");
        case BinaryOp::Sub: return checked(a - b, "-");
        case BinaryOp::Mul: return checked(a * b, "*");
        case BinaryOp::Div:
          if (b == 0.0) throw EvalDomainError("division by zero");
          return checked(a / b, "/");
      }
      break;
    }
    case Kind::Pow: {
      double base = eval_node(*n.a, x);
      if (n.exponent >= 0) return checked(powi(base, static_cast<unsigned long>(n.exponent)), "^");
      if (base == 0.0) throw EvalDomainError("division by zero");
      return checked(1.0 / powi(base, static_cast<unsigned long>(-n.exponent)), "^");
    }
  }
  throw InternalError("eval: malformed expression node");
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Binary:
      return (n.bop == BinaryOp::Add || n.bop == BinaryOp::Sub) ? 1 : 2;
    case Kind::Unary:
      return n.uop == UnaryOp::Neg ? 3 : 5;  // named functions print as atoms
    case Kind::Pow:
      return 4;
    case Kind::Var:
    case Kind::Lit:
      return 5;
  }
  return 5;
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Var:
      out += 'x';
      return;
    case Kind::Lit:
      out += format_double(n.value);
      return;
    case Kind::Unary:
      if (n.uop == UnaryOp::Neg) {
        out += '-';
        print_child(*n.a, 3, out);
      } else {
        out += unary_name(n.uop);
        out += '(';
        print_node(*n.a, out);
        out += ')';
      }
      return;
    case Kind::Binary: {
      int prec = precedence(n);
      print_child(*n.a, prec, out);
      out += binary_symbol(n.bop);
      // same-precedence right operands need parens: the grammar is
      // left-associative, so a-(b-c) must not print as a-b-c.
      print_child(*n.b, prec + 1, out);
      return;
    }
    case Kind::Pow: {
      const Node& base = *n.a;
      bool parens = precedence(base) < 5 ||
                    (base.kind == Kind::Lit && std::signbit(base.value));
      if (parens) out += '(';
      print_node(base, out);
      if (parens) out += ')';
      out += '^';
      out += std::to_string(n.exponent);
      return;
    }
  }
}

bool same_node(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Var:
      return true;
    case Kind::Lit:
      return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
    case Kind::Unary:
      return a.uop == b.uop && same_node(*a.a, *b.a);
    case Kind::Binary:
      return a.bop == b.bop && same_node(*a.a, *b.a) && same_node(*a.b, *b.b);
    case Kind::Pow:
      return a.exponent == b.exponent && same_node(*a.a, *b.a);
  }
  return false;
}

std::shared_ptr<const Node> make_node(Node n) {
  return std::make_shared<const Node>(std::move(n));
}

}  // namespace

Expr::Expr() : node_(literal(0.0).node_) {}

Expr Expr::variable() {
  Node n;
  n.kind = Kind::Var;
  return Expr(make_node(std::move(n)));
}

Expr Expr::literal(double value) {
  if (!std::isfinite(value)) throw InternalError("literal must be finite");
  Node n;
  n.kind = Kind::Lit;
  n.value = value;
  return Expr(make_node(std::move(n)));
}

Expr Expr::unary(UnaryOp op, const Expr& child) {
  const Node& c = child.node();
  if (op == UnaryOp::Neg) {
    if (c.kind == Kind::Lit) return literal(-c.value);
    if (c.kind == Kind::Unary && c.uop == UnaryOp::Neg) return Expr(c.a);
  } else if (c.kind == Kind::Lit) {
    // fold only where the result is a plain finite number
    double v = c.value;
    double folded = std::numeric_limits<double>::quiet_NaN();
    switch (op) {
      case UnaryOp::Sin: folded = std::sin(v); break;
      case UnaryOp::Cos: folded = std::cos(v); break;
      case UnaryOp::Exp: folded = std::exp(v); break;
      case UnaryOp::Log: folded = v > 0.0 ? std::log(v) : folded; break;
      case UnaryOp::Sqrt: folded = v >= 0.0 ? std::sqrt(v) : folded; break;
      case UnaryOp::Abs: folded = std::fabs(v); break;
      case UnaryOp::Neg: break;
    }
    if (std::isfinite(folded)) return literal(folded);
  }
  Node n;
  n.kind = Kind::Unary;
  n.uop = op;
  n.a = child.node_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs) {
  const Node& l = lhs.node();
  const Node& r = rhs.node();
  if (l.kind == Kind::Lit && r.kind == Kind::Lit) {
    double folded = std::numeric_limits<double>::quiet_NaN();
    switch (op) {
      case BinaryOp::Add: folded = l.value + r.value; break;
      case BinaryOp::Sub: folded = l.value - r.value; break;
      case BinaryOp::Mul: folded = l.value * r.value; break;
      case BinaryOp::Div: folded = r.value != 0.0 ? l.value / r.value : folded; break;
    }
    if (std::isfinite(folded)) return literal(folded);
  }
  switch (op) {
    case BinaryOp::Add:
      if (is_literal(l, 0.0)) return rhs;
      if (is_literal(r, 0.0)) return lhs;
      break;
    case BinaryOp::Sub:
      if (is_literal(r, 0.0)) return lhs;
      if (is_literal(l, 0.0)) return unary(UnaryOp::Neg, rhs);
      break;
    case BinaryOp::Mul:
      if (is_literal(l, 0.0) || is_literal(r, 0.0)) return literal(0.0);
      if (is_literal(l, 1.0)) return rhs;
      if (is_literal(r, 1.0)) return lhs;
      break;
    case BinaryOp::Div:
      if (is_literal(r, 1.0)) return lhs;
      break;
  }
  Node n;
  n.kind = Kind::Binary;
  n.bop = op;
  n.a = lhs.node_;
  n.b = rhs.node_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::pow(const Expr& base, long exponent) {
  if (exponent == 0) return literal(1.0);
  if (exponent == 1) return base;
  const Node& b = base.node();
  if (b.kind == Kind::Lit) {
    double folded;
    if (exponent > 0) {
      folded = powi(b.value, static_cast<unsigned long>(exponent));
    } else if (b.value != 0.0) {
      folded = 1.0 / powi(b.value, static_cast<unsigned long>(-exponent));
    } else {
      folded = std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isfinite(folded)) return literal(folded);
  }
  Node n;
  n.kind = Kind::Pow;
  n.exponent = exponent;
  n.a = base.node_;
  return Expr(make_node(std::move(n)));
}

double Expr::eval(double x) const { return eval_node(*node_, x); }

Expr Expr::derivative() const {
  const Node& n = *node_;
  Expr self(node_);
  switch (n.kind) {
    case Kind::Var:
      return literal(1.0);
    case Kind::Lit:
      return literal(0.0);
    case Kind::Unary: {
      Expr child(n.a);
      Expr dc = child.derivative();
      switch (n.uop) {
        case UnaryOp::Neg:
          return unary(UnaryOp::Neg, dc);
        case UnaryOp::Sin:
          return binary(BinaryOp::Mul, unary(UnaryOp::Cos, child), dc);
        case UnaryOp::Cos:
          return binary(BinaryOp::Mul, unary(UnaryOp::Neg, unary(UnaryOp::Sin, child)), dc);
        case UnaryOp::Exp:
          return binary(BinaryOp::Mul, unary(UnaryOp::Exp, child), dc);
        case UnaryOp::Log:
          return binary(BinaryOp::Div, dc, child);
        case UnaryOp::Sqrt:
          return binary(BinaryOp::Div, dc,
                        binary(BinaryOp::Mul, literal(2.0), unary(UnaryOp::Sqrt, child)));
        case UnaryOp::Abs:
          throw NonDifferentiableError("abs is not differentiable");
      }
      break;
    }
    case Kind::Binary: {
      Expr a(n.a), b(n.b);
      Expr da = a.derivative();
      Expr db = b.derivative();
      switch (n.bop) {
        case BinaryOp::Add:
          return binary(BinaryOp::Add, da, db);
        case BinaryOp::Sub:
          return binary(BinaryOp::Sub, da, db);
        case BinaryOp::Mul:
          return binary(BinaryOp::Add, binary(BinaryOp::Mul, da, b),
                        binary(BinaryOp::Mul, a, db));
        case BinaryOp::Div:
          return binary(BinaryOp::Div,
                        binary(BinaryOp::Sub, binary(BinaryOp::Mul, da, b),
                               binary(BinaryOp::Mul, a, db)),
                        pow(b, 2));
      }
      break;
    }
    case Kind::Pow: {
      Expr base(n.a);
      Expr db = base.derivative();
      Expr scaled = binary(BinaryOp::Mul, literal(static_cast<double>(n.exponent)),
                           pow(base, n.exponent - 1));
      return binary(BinaryOp::Mul, scaled, db);
    }
  }
  throw InternalError("derivative: malformed expression node");
}

std::string Expr::str() const {
  std::string out;
  print_node(*node_, out);
  return out;
}

bool Expr::same_structure(const Expr& other) const { return same_node(*node_, *other.node_); }

double Expr::literal_value() const {
  return node_->kind == Kind::Lit ? node_->value : std::numeric_limits<double>::quiet_NaN();
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' || text[pos] == '\r'))
      ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& expected) {
    throw ParseError(at, expected);
  }

  Expr parse() {
    Expr e = expression();
    if (!at_end()) fail(pos, "a binary operator or end of input");
    return e;
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos;
        e = Expr::binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, e, term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos;
        e = Expr::binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, e, factor());
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (consume('-')) return Expr::unary(UnaryOp::Neg, factor());
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (consume('^')) return Expr::pow(base, integer());
    return base;
  }

  Expr atom() {
    char c = peek();
    std::size_t start = pos;
    if (c == '(') {
      ++pos;
      Expr e = expression();
      if (!consume(')')) fail(pos, "')'");
      return e;
    }
    if (c == 'x' && !is_ident_char(pos + 1)) {
      ++pos;
      return Expr::variable();
    }
    if (is_alpha(c)) return function_call(start);
    if (is_digit(c) || c == '.') return Expr::literal(number());
    fail(start, "a number, 'x', a function name, or '('");
  }

  bool is_alpha(char c) const { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
  bool is_digit(char c) const { return c >= '0' && c <= '9'; }
  bool is_ident_char(std::size_t at) const {
    return at < text.size() && (is_alpha(text[at]) || is_digit(text[at]) || text[at] == '_');
  }

  Expr function_call(std::size_t start) {
    std::size_t end = pos;
    while (is_ident_char(end)) ++end;
    std::string name(text.substr(pos, end - pos));
    pos = end;

    UnaryOp op;
    if (name == "sin") op = UnaryOp::Sin;
    else if (name == "cos") op = UnaryOp::Cos;
    else if (name == "exp") op = UnaryOp::Exp;
    else if (name == "log") op = UnaryOp::Log;
    else if (name == "sqrt") op = UnaryOp::Sqrt;
    else if (name == "abs") op = UnaryOp::Abs;
    else throw UnknownIdentifierError(start, name);

    if (!consume('(')) fail(pos, "'(' after function name");
    Expr arg = expression();
    if (!consume(')')) fail(pos, "')'");
    return Expr::unary(op, arg);
  }

  double number() {
    std::size_t start = pos;
    std::string token;
    bool any_digit = false;
    while (pos < text.size() && is_digit(text[pos])) {
      token += text[pos++];
      any_digit = true;
    }
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      token += '.';
      while (pos < text.size() && is_digit(text[pos])) {
        token += text[pos++];
        any_digit = true;
      }
    }
    if (!any_digit) fail(start, "a number");
    if (token.back() == '.') token.pop_back();
    // exponent part only if it is well formed, otherwise leave it to the caller
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t look = pos + 1;
      if (look < text.size() && (text[look] == '+' || text[look] == '-')) ++look;
      if (look < text.size() && is_digit(text[look])) {
        token += 'e';
        if (text[pos + 1] == '+' || text[pos + 1] == '-') token += text[pos + 1];
        pos = look;
        while (pos < text.size() && is_digit(text[pos])) token += text[pos++];
      }
    }
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec == std::errc::result_out_of_range || !std::isfinite(value))
      fail(start, "a representable finite number");
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
      throw InternalError("number token did not convert: " + token);
    return value;
  }

  long integer() {
    skip_ws();
    std::size_t start = pos;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      neg = text[pos] == '-';
      ++pos;
    }
    std::size_t dstart = pos;
    while (pos < text.size() && is_digit(text[pos])) ++pos;
    if (pos == dstart) fail(start, "an integer exponent");
    long value = 0;
    auto res = std::from_chars(text.data() + dstart, text.data() + pos, value);
    if (res.ec != std::errc() || value > 1024) fail(start, "an integer exponent in [-1024, 1024]");
    return neg ? -value : value;
  }
};

}  // namespace

Expr parse_expr(std::string_view text) {
  Parser p{text};
  return p.parse();
}

}  // namespace ifeq
