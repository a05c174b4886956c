#include "llhmm/expression.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "llhmm/errors.hpp"

namespace llhmm {

namespace {

struct Node {
  enum Kind { number, variable, unary, binary, call } kind;
  double value = 0.0;     // number
  int var = 0;            // variable axis
  char op = 0;            // unary/binary
  std::string fn;         // call
  std::unique_ptr<Node> a, b;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::unique_ptr<Node> parse() {
    auto n = expr();
    skip_ws();
    if (pos_ != s_.size()) {
      throw Error("expression: trailing input at position " + std::to_string(pos_));
    }
    return n;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

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

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  std::unique_ptr<Node> expr() {
    auto lhs = term();
    while (true) {
      if (eat('+')) {
        auto n = std::make_unique<Node>();
        n->kind = Node::binary;
        n->op = '+';
        n->a = std::move(lhs);
        n->b = term();
        lhs = std::move(n);
      } else if (eat('-')) {
        auto n = std::make_unique<Node>();
        n->kind = Node::binary;
        n->op = '-';
        n->a = std::move(lhs);
        n->b = term();
        lhs = std::move(n);
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> term() {
    auto lhs = unary();
    while (true) {
      if (eat('*')) {
        auto n = std::make_unique<Node>();
        n->kind = Node::binary;
        n->op = '*';
        n->a = std::move(lhs);
        n->b = unary();
        lhs = std::move(n);
      } else if (eat('/')) {
        auto n = std::make_unique<Node>();
        n->kind = Node::binary;
        n->op = '/';
        n->a = std::move(lhs);
        n->b = unary();
        lhs = std::move(n);
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> unary() {
    if (eat('-')) {
      auto n = std::make_unique<Node>();
      n->kind = Node::unary;
      n->op = '-';
      n->a = unary();  // exponentiation binds tighter: -2^2 = -(2^2)
      return n;
    }
    eat('+');
    return power();
  }

  std::unique_ptr<Node> power() {
    auto base = atom();
    if (eat('^')) {
      auto n = std::make_unique<Node>();
      n->kind = Node::binary;
      n->op = '^';
      n->a = std::move(base);
      n->b = unary();  // right associative, allows 2^-3
      return n;
    }
    return base;
  }

  std::unique_ptr<Node> atom() {
    skip_ws();
    if (eat('(')) {
      auto n = expr();
      if (!eat(')')) throw Error("expression: missing ')'");
      return n;
    }
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return ident();
    }
    throw Error(std::string("expression: unexpected character '") + c + "'");
  }

  std::unique_ptr<Node> number() {
    std::size_t end = 0;
    const double v = std::stod(s_.substr(pos_), &end);
    pos_ += end;
    auto n = std::make_unique<Node>();
    n->kind = Node::number;
    n->value = v;
    return n;
  }

  std::unique_ptr<Node> ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "pi") {
      auto n = std::make_unique<Node>();
      n->kind = Node::number;
      n->value = std::numbers::pi;
      return n;
    }
    static const std::vector<std::pair<std::string, int>> vars = {
        {"x1", 0}, {"x2", 1}, {"x3", 2}, {"x", 0}, {"y", 1}, {"z", 2}};
    for (const auto& [vn, axis] : vars) {
      if (name == vn) {
        auto n = std::make_unique<Node>();
        n->kind = Node::variable;
        n->var = axis;
        return n;
      }
    }
    if (eat('(')) {
      auto arg = expr();
      if (!eat(')')) throw Error("expression: missing ')' after " + name);
      static const std::vector<std::string> fns = {"sin", "cos",  "tan", "exp",
                                                   "log", "sqrt", "abs"};
      for (const auto& f : fns) {
        if (name == f) {
          auto n = std::make_unique<Node>();
          n->kind = Node::call;
          n->fn = name;
          n->a = std::move(arg);
          return n;
        }
      }
    }
    throw Error("expression: unknown identifier '" + name + "'");
  }
};

double eval_node(const Node& n, const Point& p) {
  switch (n.kind) {
    case Node::number:
      return n.value;
    case Node::variable:
      return p[n.var];
    case Node::unary:
      return -eval_node(*n.a, p);
    case Node::binary: {
      const double a = eval_node(*n.a, p);
      const double b = eval_node(*n.b, p);
      switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        default: return std::pow(a, b);
      }
    }
    default: {
      const double a = eval_node(*n.a, p);
      if (n.fn == "sin") return std::sin(a);
      if (n.fn == "cos") return std::cos(a);
      if (n.fn == "tan") return std::tan(a);
      if (n.fn == "exp") return std::exp(a);
      if (n.fn == "log") return std::log(a);
      if (n.fn == "sqrt") return std::sqrt(a);
      return std::abs(a);
    }
  }
}

}  // namespace

std::function<double(const Point&)> compile_expression(const std::string& text) {
  Parser parser(text);
  std::shared_ptr<Node> root{parser.parse().release()};
  return [root](const Point& p) { return eval_node(*root, p); };
}

}  // namespace llhmm
