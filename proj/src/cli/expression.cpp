#include "galab/cli/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "galab/error.hpp"

namespace galab::cli {

enum class Var { x, y, z, zbar };
enum class Op { num, var, neg, add, sub, mul, div, pow, call };
enum class Fn { exp, conj, re, im, sqrt };

struct Expression::Node {
  Op op = Op::num;
  cplx value{};
  Var var = Var::x;
  Fn fn = Fn::exp;
  int exponent = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr number(cplx v) {
  Node n;
  n.value = v;
  return make(std::move(n));
}

NodePtr combine(Op op, NodePtr lhs, NodePtr rhs = nullptr, int exponent = 0) {
  Node n;
  n.op = op;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  n.exponent = exponent;
  return make(std::move(n));
}

struct Token {
  enum Kind { number, imag_number, name, symbol, end } kind = end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : s_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= s_.size()) {
        t.kind = Token::end;
        out.push_back(t);
        return out;
      }
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < s_.size() &&
                                                         std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        lex_number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Token::name;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
          t.text += s_[pos_];
          advance();
        }
      } else if (std::string("+-*/^()").find(c) != std::string::npos) {
        t.kind = Token::symbol;
        t.text = std::string(1, c);
        advance();
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
      }
      out.push_back(t);
    }
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
      if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
        while (pos_ < look) advance();
        digits();
      }
    }
    t.text = s_.substr(start, pos_ - start);
    t.value = std::strtod(t.text.c_str(), nullptr);
    t.kind = Token::number;
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        (pos_ + 1 >= s_.size() || !(std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
      advance();
      t.kind = Token::imag_number;
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  NodePtr parse() {
    NodePtr n = sum();
    if (peek().kind != Token::end) fail("unexpected '" + peek().text + "'");
    return n;
  }

 private:
  const Token& peek() const { return t_[k_]; }
  Token take() { return t_[k_++]; }
  bool is_symbol(const char* s) const { return peek().kind == Token::symbol && peek().text == s; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(peek().kind == Token::end ? "unexpected end of expression" : what, peek().line,
                     peek().column);
  }

  void expect(const char* s) {
    if (!is_symbol(s)) fail(std::string("expected '") + s + "'");
    take();
  }

  NodePtr sum() {
    NodePtr n = product();
    while (is_symbol("+") || is_symbol("-")) {
      const Op op = take().text == "+" ? Op::add : Op::sub;
      n = combine(op, n, product());
    }
    return n;
  }

  NodePtr product() {
    NodePtr n = unary();
    while (is_symbol("*") || is_symbol("/")) {
      const Op op = take().text == "*" ? Op::mul : Op::div;
      n = combine(op, n, unary());
    }
    return n;
  }

  NodePtr unary() {
    if (is_symbol("-")) {
      take();
      return combine(Op::neg, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!is_symbol("^")) return base;
    take();
    const Token at = peek();
    NodePtr e = unary();
    const std::optional<int> n = integer_constant(*e);
    if (!n) throw ParseError("exponent of '^' must be a constant integer", at.line, at.column);
    return combine(Op::pow, base, nullptr, *n);
  }

  static std::optional<int> integer_constant(const Node& n) {
    if (n.op == Op::neg) {
      auto v = integer_constant(*n.lhs);
      return v ? std::optional<int>(-*v) : std::nullopt;
    }
    if (n.op != Op::num || n.value.imag() != 0.0) return std::nullopt;
    const double r = n.value.real();
    if (r != std::floor(r) || std::abs(r) > 1024) return std::nullopt;
    return static_cast<int>(r);
  }

  NodePtr primary() {
    const Token t = peek();
    switch (t.kind) {
      case Token::number:
        take();
        return number(cplx(t.value, 0.0));
      case Token::imag_number:
        take();
        return number(cplx(0.0, t.value));
      case Token::name:
        take();
        return name(t);
      case Token::symbol:
        if (t.text == "(") {
          take();
          NodePtr n = sum();
          expect(")");
          return n;
        }
        fail("unexpected '" + t.text + "'");
      case Token::end:
        fail("unexpected end of expression");
    }
    fail("unexpected token");
  }

  NodePtr name(const Token& t) {
    static const std::pair<const char*, Fn> fns[] = {
        {"exp", Fn::exp}, {"conj", Fn::conj}, {"re", Fn::re}, {"im", Fn::im}, {"sqrt", Fn::sqrt}};
    for (const auto& [fname, fn] : fns) {
      if (t.text != fname) continue;
      if (!is_symbol("(")) fail("expected '(' after function '" + t.text + "'");
      take();
      NodePtr arg = sum();
      expect(")");
      Node n;
      n.op = Op::call;
      n.fn = fn;
      n.lhs = arg;
      return make(std::move(n));
    }
    if (t.text == "i") return number(cplx(0.0, 1.0));
    if (t.text == "pi") return number(cplx(std::numbers::pi, 0.0));
    static const std::pair<const char*, Var> vars[] = {
        {"x", Var::x}, {"y", Var::y}, {"z", Var::z}, {"tau", Var::z}, {"zbar", Var::zbar}};
    for (const auto& [vname, v] : vars) {
      if (t.text != vname) continue;
      Node n;
      n.op = Op::var;
      n.var = v;
      return make(std::move(n));
    }
    throw ParseError("unknown identifier '" + t.text + "'", t.line, t.column);
  }

  std::vector<Token> t_;
  std::size_t k_ = 0;
};

cplx eval(const Node& n, cplx z) {
  switch (n.op) {
    case Op::num:
      return n.value;
    case Op::var:
      switch (n.var) {
        case Var::x:
          return z.real();
        case Var::y:
          return z.imag();
        case Var::z:
          return z;
        case Var::zbar:
          return std::conj(z);
      }
      break;
    case Op::neg:
      return -eval(*n.lhs, z);
    case Op::add:
      return eval(*n.lhs, z) + eval(*n.rhs, z);
    case Op::sub:
      return eval(*n.lhs, z) - eval(*n.rhs, z);
    case Op::mul:
      return eval(*n.lhs, z) * eval(*n.rhs, z);
    case Op::div: {
      const cplx d = eval(*n.rhs, z);
      if (d == cplx{}) throw EvalError("division by zero");
      return eval(*n.lhs, z) / d;
    }
    case Op::pow: {
      const cplx b = eval(*n.lhs, z);
      if (n.exponent < 0 && b == cplx{}) throw EvalError("zero raised to a negative power");
      cplx acc = 1.0;
      for (int k = 0; k < std::abs(n.exponent); ++k) acc *= b;
      return n.exponent < 0 ? 1.0 / acc : acc;
    }
    case Op::call: {
      const cplx a = eval(*n.lhs, z);
      switch (n.fn) {
        case Fn::exp:
          return std::exp(a);
        case Fn::conj:
          return std::conj(a);
        case Fn::re:
          return a.real();
        case Fn::im:
          return a.imag();
        case Fn::sqrt:
          return std::sqrt(a);
      }
      break;
    }
  }
  throw EvalError("malformed expression tree");
}

bool constant(const Node& n) {
  if (n.op == Op::var) return false;
  if (n.lhs && !constant(*n.lhs)) return false;
  if (n.rhs && !constant(*n.rhs)) return false;
  return true;
}

using Poly = std::vector<cplx>;

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1);
  for (std::size_t p = 0; p < a.size(); ++p) {
    for (std::size_t q = 0; q < b.size(); ++q) out[p + q] += a[p] * b[q];
  }
  return out;
}

Poly poly_add(Poly a, const Poly& b, double sign) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += sign * b[k];
  return a;
}

constexpr std::size_t kMaxPolyTerms = 64;

std::optional<Poly> poly(const Node& n) {
  if (constant(n)) return Poly{eval(n, {})};
  switch (n.op) {
    case Op::var:
      if (n.var == Var::y) return Poly{0.0, 1.0};
      return std::nullopt;
    case Op::neg: {
      auto a = poly(*n.lhs);
      if (!a) return std::nullopt;
      for (auto& c : *a) c = -c;
      return a;
    }
    case Op::add:
    case Op::sub: {
      auto a = poly(*n.lhs);
      auto b = poly(*n.rhs);
      if (!a || !b) return std::nullopt;
      return poly_add(*a, *b, n.op == Op::add ? 1.0 : -1.0);
    }
    case Op::mul: {
      auto a = poly(*n.lhs);
      auto b = poly(*n.rhs);
      if (!a || !b || a->size() + b->size() > kMaxPolyTerms) return std::nullopt;
      return poly_mul(*a, *b);
    }
    case Op::div: {
      if (!constant(*n.rhs)) return std::nullopt;
      auto a = poly(*n.lhs);
      const cplx d = eval(*n.rhs, {});
      if (!a || d == cplx{}) return std::nullopt;
      for (auto& c : *a) c /= d;
      return a;
    }
    case Op::pow: {
      if (n.exponent < 0) return std::nullopt;
      auto a = poly(*n.lhs);
      if (!a || a->size() * n.exponent > kMaxPolyTerms) return std::nullopt;
      Poly acc{1.0};
      for (int k = 0; k < n.exponent; ++k) acc = poly_mul(acc, *a);
      return acc;
    }
    default:
      return std::nullopt;
  }
}

std::string render(const Node& n) {
  char buf[64];
  switch (n.op) {
    case Op::num:
      if (n.value.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.17g", n.value.real());
      else if (n.value.real() == 0.0) std::snprintf(buf, sizeof buf, "%.17gi", n.value.imag());
      else std::snprintf(buf, sizeof buf, "(%.17g%+.17gi)", n.value.real(), n.value.imag());
      return buf;
    case Op::var: {
      static const char* names[] = {"x", "y", "z", "zbar"};
      return std::string("(var ") + names[static_cast<int>(n.var)] + ")";
    }
    case Op::neg:
      return "(neg " + render(*n.lhs) + ")";
    case Op::add:
      return "(+ " + render(*n.lhs) + " " + render(*n.rhs) + ")";
    case Op::sub:
      return "(- " + render(*n.lhs) + " " + render(*n.rhs) + ")";
    case Op::mul:
      return "(* " + render(*n.lhs) + " " + render(*n.rhs) + ")";
    case Op::div:
      return "(/ " + render(*n.lhs) + " " + render(*n.rhs) + ")";
    case Op::pow:
      return "(^ " + render(*n.lhs) + " " + std::to_string(n.exponent) + ")";
    case Op::call: {
      static const char* names[] = {"exp", "conj", "re", "im", "sqrt"};
      return std::string("(") + names[static_cast<int>(n.fn)] + " " + render(*n.lhs) + ")";
    }
  }
  return "?";
}

}  // namespace

cplx Expression::operator()(cplx z) const {
  if (!root_) throw EvalError("empty expression");
  return eval(*root_, z);
}

bool Expression::is_constant() const { return root_ && constant(*root_); }

std::optional<std::vector<cplx>> Expression::as_polynomial_in_y() const {
  if (!root_) return std::nullopt;
  return poly(*root_);
}

std::string Expression::to_string() const { return root_ ? render(*root_) : ""; }

Expression parse_expression(const std::string& src) {
  Parser p(Lexer(src).run());
  return Expression(p.parse(), src);
}

}  // namespace galab::cli
