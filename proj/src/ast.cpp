#include "hypsearch/ast.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "hypsearch/error.hpp"

namespace hypsearch {

std::string_view kind_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Activation: return "activation";
    case ComponentKind::Preprocessor: return "preprocessor";
    case ComponentKind::Regularizer: return "regularizer";
  }
  return "activation";
}

ComponentKind kind_from_name(std::string_view name) {
  if (name == "activation") return ComponentKind::Activation;
  if (name == "preprocessor") return ComponentKind::Preprocessor;
  if (name == "regularizer") return ComponentKind::Regularizer;
  throw Error(Errc::SyntaxError, "unknown component kind '" + std::string(name) + "'");
}

const std::vector<std::string>& variables_for(ComponentKind kind) {
  static const std::vector<std::string> activation = {"x"};
  static const std::vector<std::string> preprocessor = {"x", "mu", "sigma", "lo", "hi"};
  static const std::vector<std::string> regularizer = {"w"};
  switch (kind) {
    case ComponentKind::Preprocessor: return preprocessor;
    case ComponentKind::Regularizer: return regularizer;
    default: return activation;
  }
}

bool is_variable_of(ComponentKind kind, std::string_view name) {
  for (const auto& v : variables_for(kind)) {
    if (v == name) return true;
  }
  return false;
}

bool is_known_variable(std::string_view name) {
  return name == "x" || name == "mu" || name == "sigma" || name == "lo" ||
         name == "hi" || name == "w";
}

std::string_view probe_variable(ComponentKind kind) {
  return kind == ComponentKind::Regularizer ? "w" : "x";
}

std::string_view unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "neg";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Tanh: return "tanh";
    case UnaryOp::Sigmoid: return "sigmoid";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Softplus: return "softplus";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Log: return "log";
  }
  return "neg";
}

std::string_view binary_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "add";
    case BinaryOp::Sub: return "sub";
    case BinaryOp::Mul: return "mul";
    case BinaryOp::Div: return "div";
    case BinaryOp::Min: return "min";
    case BinaryOp::Max: return "max";
    case BinaryOp::Pow: return "pow";
  }
  return "add";
}

std::string_view cmp_name(CmpOp op) {
  switch (op) {
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
  }
  return ">=";
}

int32_t Expr::push(ExprNode n) {
  nodes_.push_back(std::move(n));
  return static_cast<int32_t>(nodes_.size() - 1);
}

int32_t Expr::constant(double v) {
  if (std::isnan(v)) throw std::invalid_argument("NaN constant");
  ExprNode n;
  n.kind = NodeKind::Constant;
  n.value = v;
  return push(n);
}

int32_t Expr::variable(std::string name) {
  ExprNode n;
  n.kind = NodeKind::Variable;
  n.symbol = std::move(name);
  return push(n);
}

int32_t Expr::parameter(std::string name) {
  ExprNode n;
  n.kind = NodeKind::Parameter;
  n.symbol = std::move(name);
  return push(n);
}

int32_t Expr::unary(UnaryOp op, int32_t a) {
  if (op == UnaryOp::Neg && node(a).kind == NodeKind::Constant) {
    ExprNode n;
    n.kind = NodeKind::Constant;
    n.value = -node(a).value;
    return push(n);
  }
  ExprNode n;
  n.kind = NodeKind::Unary;
  n.unary = op;
  n.child[0] = a;
  return push(n);
}

int32_t Expr::binary(BinaryOp op, int32_t a, int32_t b) {
  ExprNode n;
  n.kind = NodeKind::Binary;
  n.binary = op;
  n.child[0] = a;
  n.child[1] = b;
  return push(n);
}

int32_t Expr::where(CmpOp cmp, int32_t lhs, int32_t rhs, int32_t then_branch, int32_t else_branch) {
  ExprNode n;
  n.kind = NodeKind::Where;
  n.cmp = cmp;
  n.child = {lhs, rhs, then_branch, else_branch};
  return push(n);
}

namespace {

int depth_of(const Expr& e, int32_t id) {
  const ExprNode& n = e.node(id);
  int best = 0;
  for (int32_t c : n.child) {
    if (c >= 0) best = std::max(best, depth_of(e, c));
  }
  return 1 + best;
}

bool nodes_equal(const Expr& a, int32_t ia, const Expr& b, int32_t ib) {
  const ExprNode& na = a.node(ia);
  const ExprNode& nb = b.node(ib);
  if (na.kind != nb.kind) return false;
  switch (na.kind) {
    case NodeKind::Constant:
      return std::bit_cast<uint64_t>(na.value) == std::bit_cast<uint64_t>(nb.value);
    case NodeKind::Variable:
    case NodeKind::Parameter:
      return na.symbol == nb.symbol;
    case NodeKind::Unary:
      return na.unary == nb.unary && nodes_equal(a, na.child[0], b, nb.child[0]);
    case NodeKind::Binary:
      return na.binary == nb.binary && nodes_equal(a, na.child[0], b, nb.child[0]) &&
             nodes_equal(a, na.child[1], b, nb.child[1]);
    case NodeKind::Where:
      if (na.cmp != nb.cmp) return false;
      for (int i = 0; i < 4; ++i) {
        if (!nodes_equal(a, na.child[i], b, nb.child[i])) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

int Expr::depth() const {
  if (root_ < 0) return 0;
  return depth_of(*this, root_);
}

const ParamSpec* HypothesisProgram::find_param(std::string_view pname) const {
  for (const auto& p : params) {
    if (p.name == pname) return &p;
  }
  return nullptr;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return nodes_equal(a, a.root(), b, b.root());
}

bool structurally_equal(const HypothesisProgram& a, const HypothesisProgram& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (a.params.size() != b.params.size()) return false;
  auto sorted = [](const std::vector<ParamSpec>& ps) {
    std::vector<ParamSpec> out = ps;
    std::sort(out.begin(), out.end(),
              [](const ParamSpec& l, const ParamSpec& r) { return l.name < r.name; });
    return out;
  };
  auto pa = sorted(a.params);
  auto pb = sorted(b.params);
  for (size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].name != pb[i].name) return false;
    if (std::bit_cast<uint64_t>(pa[i].default_value) !=
        std::bit_cast<uint64_t>(pb[i].default_value)) {
      return false;
    }
  }
  return structurally_equal(a.expr, b.expr);
}

}  // namespace hypsearch
