#include "pqsys/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

namespace pqsys {

struct Expression::Node {
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Call };
  Kind kind;
  Real value = 0.0;                 // Number
  int slot = -1;                    // Variable
  std::string fn;                   // Call
  std::vector<std::shared_ptr<const Node>> children;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, std::vector<NodePtr> children = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = std::move(children);
  return n;
}

class Parser {
public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) throw ExpressionError("unexpected trailing input", pos_);
    return e;
  }

private:
  const std::string& text_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (consume('+')) {
        lhs = make(Node::Kind::Add, {lhs, term()});
      } else if (consume('-')) {
        lhs = make(Node::Kind::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (consume('*')) {
        lhs = make(Node::Kind::Mul, {lhs, unary()});
      } else if (consume('/')) {
        lhs = make(Node::Kind::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (consume('-')) return make(Node::Kind::Negate, {unary()});
    if (consume('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ExpressionError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (consume('(')) {
      NodePtr inner = expr();
      if (!consume(')')) throw ExpressionError("missing ')'", pos_);
      return inner;
    }
    throw ExpressionError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const Real v = std::strtod(begin, &end);
    if (end == begin) throw ExpressionError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);

    static const std::map<std::string, int> slots = {
        {"x", Expression::X},     {"y", Expression::Y},     {"s", Expression::S},
        {"t", Expression::T},     {"xi1", Expression::XI1}, {"xi2", Expression::XI2},
        {"nu1", Expression::NU1}, {"nu2", Expression::NU2}};
    if (auto it = slots.find(name); it != slots.end()) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Variable;
      n->slot = it->second;
      return n;
    }
    if (name == "pi") {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Number;
      n->value = M_PI;
      return n;
    }

    static const std::map<std::string, int> arity = {
        {"abs", 1}, {"pow", 2}, {"sin", 1}, {"cos", 1}, {"exp", 1}};
    const auto fn = arity.find(name);
    if (fn == arity.end()) throw ExpressionError("unknown symbol '" + name + "'", start);
    if (!consume('(')) throw ExpressionError("expected '(' after '" + name + "'", pos_);
    std::vector<NodePtr> args;
    args.push_back(expr());
    while (consume(',')) args.push_back(expr());
    if (!consume(')')) throw ExpressionError("missing ')'", pos_);
    if (static_cast<int>(args.size()) != fn->second)
      throw ExpressionError("'" + name + "' takes " + std::to_string(fn->second) + " argument(s)", start);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->fn = name;
    n->children = std::move(args);
    return n;
  }
};

Real eval_node(const Node& n, const std::array<Real, Expression::SLOT_COUNT>& env) {
  switch (n.kind) {
    case Node::Kind::Number: return n.value;
    case Node::Kind::Variable: return env[static_cast<std::size_t>(n.slot)];
    case Node::Kind::Negate: return -eval_node(*n.children[0], env);
    case Node::Kind::Add: return eval_node(*n.children[0], env) + eval_node(*n.children[1], env);
    case Node::Kind::Sub: return eval_node(*n.children[0], env) - eval_node(*n.children[1], env);
    case Node::Kind::Mul: return eval_node(*n.children[0], env) * eval_node(*n.children[1], env);
    case Node::Kind::Div: return eval_node(*n.children[0], env) / eval_node(*n.children[1], env);
    case Node::Kind::Call: {
      const Real a = eval_node(*n.children[0], env);
      if (n.fn == "abs") return std::abs(a);
      if (n.fn == "sin") return std::sin(a);
      if (n.fn == "cos") return std::cos(a);
      if (n.fn == "exp") return std::exp(a);
      return std::pow(a, eval_node(*n.children[1], env));  // pow
    }
  }
  fail("expression: corrupt node");
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).run();
  e.source_ = text;
  return e;
}

Real Expression::evaluate(const std::array<Real, SLOT_COUNT>& env) const {
  require(root_ != nullptr, "expression: evaluate on empty expression");
  return eval_node(*root_, env);
}

}  // namespace pqsys
