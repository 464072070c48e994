#include "pwlmilp/functions.hpp"

#include <cctype>
#include <cmath>
#include <memory>

#include "pwlmilp/errors.hpp"

namespace pwlmilp::fitfn {

namespace {

double f1(double x, double y) {
  double dx = x - 0.5, dy = y - 0.5;
  double r = std::sqrt(dx * dx + dy * dy);
  double phi = std::atan2(dy, dx);
  double den = 1.0 + 0.3 * std::sin(5.0 * phi);
  double t = r / den;
  return std::exp(-5.0 * t * t);
}

double f2(double x, double y) {
  return std::sin(6.0 * M_PI * x + 0.5 * y) *
             std::exp(-10.0 * ((x - 0.4) * (x - 0.4) + (y - 0.3) * (y - 0.3))) +
         std::cos(5.0 * M_PI * y + x) *
             std::exp(-12.0 * ((x - 0.7) * (x - 0.7) + (y - 0.8) * (y - 0.8))) +
         0.1 * std::sin(3.0 * M_PI * x * y);
}

double f3(double x, double y) {
  return std::sin(3.0 * M_PI * x) *
         std::cos((1.0 - std::abs(y - 0.5)) * 2.0 * M_PI) * (x + y);
}

double f4(double x, double y) {
  double rho2 = x * x + (y - 0.5) * (y - 0.5);
  return std::sin(50.0 * std::sqrt(rho2)) * std::exp(-10.0 * rho2);
}

double f5(double x, double y) {
  return std::sin(5.0 * M_PI * x) * std::cos(5.0 * M_PI * y) +
         0.5 * std::sin(10.0 * M_PI * x * y) +
         0.2 * std::cos(15.0 * (x * x + y * y));
}

}  // namespace

TargetFunction builtin(const std::string& name) {
  TargetFunction t;
  t.name = name;
  if (name == "f1") {
    t.eval = f1;
    t.lipschitz = 4.5;
  } else if (name == "f2") {
    t.eval = f2;
    t.lipschitz = 20.0;
  } else if (name == "f3") {
    t.eval = f3;
    t.lipschitz = 21.0;
  } else if (name == "f4" || name == "ripple") {
    t.eval = f4;
    t.lipschitz = 52.0;
  } else if (name == "f5") {
    t.eval = f5;
    t.lipschitz = 46.0;
  } else {
    throw Error(ErrorCode::ParseError, "unknown builtin function: " + name);
  }
  return t;
}

std::vector<std::string> builtin_names() {
  return {"f1", "f2", "f3", "f4", "f5", "ripple"};
}

// ---------------------------------------------------------------------------
// Expression compiler (recursive descent).

namespace {

struct Node {
  virtual ~Node() = default;
  virtual double eval(double x, double y) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Const : Node {
  double v;
  explicit Const(double v) : v(v) {}
  double eval(double, double) const override { return v; }
};
struct VarX : Node {
  double eval(double x, double) const override { return x; }
};
struct VarY : Node {
  double eval(double, double y) const override { return y; }
};
struct Unary : Node {
  double (*fn)(double);
  NodePtr a;
  double eval(double x, double y) const override { return fn(a->eval(x, y)); }
};
struct Binary : Node {
  char op;
  NodePtr a, b;
  double eval(double x, double y) const override {
    double u = a->eval(x, y), v = b->eval(x, y);
    switch (op) {
      case '+': return u + v;
      case '-': return u - v;
      case '*': return u * v;
      case '/': return u / v;
      case '^': return std::pow(u, v);
    }
    return 0.0;
  }
};
struct Atan2 : Node {
  NodePtr a, b;
  double eval(double x, double y) const override {
    return std::atan2(a->eval(x, y), b->eval(x, y));
  }
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size())
      throw Error(ErrorCode::ParseError,
                  "unexpected input at position " + std::to_string(pos_));
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorCode::ParseError,
                msg + " at position " + std::to_string(pos_));
  }

  NodePtr expr() {
    NodePtr a = term();
    while (true) {
      if (eat('+')) {
        auto n = std::make_shared<Binary>();
        n->op = '+';
        n->a = a;
        n->b = term();
        a = n;
      } else if (eat('-')) {
        auto n = std::make_shared<Binary>();
        n->op = '-';
        n->a = a;
        n->b = term();
        a = n;
      } else {
        return a;
      }
    }
  }
  NodePtr term() {
    NodePtr a = factor();
    while (true) {
      if (eat('*')) {
        auto n = std::make_shared<Binary>();
        n->op = '*';
        n->a = a;
        n->b = factor();
        a = n;
      } else if (eat('/')) {
        auto n = std::make_shared<Binary>();
        n->op = '/';
        n->a = a;
        n->b = factor();
        a = n;
      } else {
        return a;
      }
    }
  }
  NodePtr factor() {
    if (eat('-')) {
      auto n = std::make_shared<Binary>();
      n->op = '-';
      n->a = std::make_shared<Const>(0.0);
      n->b = factor();
      return n;
    }
    if (eat('+')) return factor();
    return power();
  }
  NodePtr power() {
    NodePtr a = primary();
    if (eat('^')) {
      auto n = std::make_shared<Binary>();
      n->op = '^';
      n->a = a;
      n->b = factor();  // right associative
      return n;
    }
    return a;
  }
  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return std::make_shared<Const>(v);
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return std::make_shared<VarX>();
      if (id == "y") return std::make_shared<VarY>();
      if (id == "pi") return std::make_shared<Const>(M_PI);
      if (id == "e") return std::make_shared<Const>(M_E);
      if (!eat('(')) fail("expected '(' after function name " + id);
      NodePtr a = expr();
      if (id == "atan2") {
        if (!eat(',')) fail("atan2 needs two arguments");
        auto n = std::make_shared<Atan2>();
        n->a = a;
        n->b = expr();
        if (!eat(')')) fail("expected ')'");
        return n;
      }
      if (!eat(')')) fail("expected ')'");
      auto n = std::make_shared<Unary>();
      n->a = a;
      if (id == "sin") n->fn = std::sin;
      else if (id == "cos") n->fn = std::cos;
      else if (id == "tan") n->fn = std::tan;
      else if (id == "exp") n->fn = std::exp;
      else if (id == "sqrt") n->fn = std::sqrt;
      else if (id == "abs") n->fn = std::abs;
      else if (id == "atan") n->fn = std::atan;
      else if (id == "log") n->fn = std::log;
      else fail("unknown function " + id);
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::function<double(double, double)> compile_expression(
    const std::string& expr) {
  Parser parser(expr);
  NodePtr root = parser.parse();
  return [root](double x, double y) { return root->eval(x, y); };
}

double estimate_lipschitz(const std::function<double(double, double)>& f,
                          geom::Vec2 lo, geom::Vec2 hi, int grid) {
  double hmax = 0.0;
  double hx = (hi.x - lo.x) / grid, hy = (hi.y - lo.y) / grid;
  double step = 1e-6 * std::max(hi.x - lo.x, hi.y - lo.y);
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      double x = std::min(lo.x + i * hx, hi.x - step);
      double y = std::min(lo.y + j * hy, hi.y - step);
      x = std::max(x, lo.x + step);
      y = std::max(y, lo.y + step);
      double gx = (f(x + step, y) - f(x - step, y)) / (2.0 * step);
      double gy = (f(x, y + step) - f(x, y - step)) / (2.0 * step);
      hmax = std::max(hmax, std::hypot(gx, gy));
    }
  }
  return 1.5 * hmax;
}

TargetFunction from_expression(const std::string& expr, geom::Vec2 lo,
                               geom::Vec2 hi, double lipschitz) {
  TargetFunction t;
  t.name = expr;
  t.eval = compile_expression(expr);
  t.lo = lo;
  t.hi = hi;
  if (lipschitz > 0.0) {
    t.lipschitz = lipschitz;
    t.lipschitz_verified = true;
  } else {
    t.lipschitz = estimate_lipschitz(t.eval, lo, hi);
    t.lipschitz_verified = false;
  }
  return t;
}

}  // namespace pwlmilp::fitfn
