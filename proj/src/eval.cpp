#include "hypsearch/eval.hpp"

#include "hypsearch/error.hpp"

namespace hypsearch {
namespace {

bool cmp_apply(CmpOp op, double a, double b) {
  switch (op) {
    case CmpOp::Ge: return a >= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Lt: return a < b;
  }
  return false;
}

inline double real_of(double x) { return x; }
inline double real_of(const Dual& x) { return x.v; }

// Lookup is called for Variable and Parameter nodes and returns T.
template <class T, class Lookup>
T eval_rec(const Expr& e, int32_t idx, const Lookup& lookup) {
  const ExprNode& n = e.node(idx);
  switch (n.kind) {
    case NodeKind::Constant:
      return T(n.value);
    case NodeKind::Variable:
    case NodeKind::Parameter:
      return lookup(idx, n);
    case NodeKind::Unary: {
      T a = eval_rec<T>(e, n.child[0], lookup);
      using std::sin;
      using std::cos;
      using std::tanh;
      using std::exp;
      using std::log;
      using std::sqrt;
      using std::abs;
      switch (n.unary) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Abs: return abs(a);
        case UnaryOp::Sin: return sin(a);
        case UnaryOp::Cos: return cos(a);
        case UnaryOp::Tanh: return tanh(a);
        case UnaryOp::Sigmoid: return sigmoid(a);
        case UnaryOp::Exp: return exp(a);
        case UnaryOp::Softplus: return softplus(a);
        case UnaryOp::Sqrt: return sqrt(a);
        case UnaryOp::Log: return log(a);
      }
      return a;
    }
    case NodeKind::Binary: {
      T a = eval_rec<T>(e, n.child[0], lookup);
      T b = eval_rec<T>(e, n.child[1], lookup);
      using std::pow;
      switch (n.binary) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        case BinaryOp::Min: return vmin(a, b);
        case BinaryOp::Max: return vmax(a, b);
        case BinaryOp::Pow: return pow(a, b);
      }
      return a;
    }
    case NodeKind::Where: {
      // only the taken branch is evaluated; the guard's derivative is
      // irrelevant by convention
      T lhs = eval_rec<T>(e, n.child[0], lookup);
      T rhs = eval_rec<T>(e, n.child[1], lookup);
      bool taken = cmp_apply(n.cmp, real_of(lhs), real_of(rhs));
      return eval_rec<T>(e, taken ? n.child[2] : n.child[3], lookup);
    }
  }
  return T(0.0);
}

[[noreturn]] void throw_unbound(const ExprNode& n) {
  throw Error(Errc::UnboundVariable,
              (n.kind == NodeKind::Parameter ? "parameter '" : "variable '") + n.symbol +
                  "' has no value");
}

double env_value(const HypothesisProgram& prog,
                 const std::unordered_map<std::string, double>& env, const ExprNode& n) {
  auto it = env.find(n.symbol);
  if (it != env.end()) return it->second;
  if (n.kind == NodeKind::Parameter) {
    if (const ParamSpec* spec = prog.find_param(n.symbol)) return spec->default_value;
  }
  throw_unbound(n);
}

void check_nonempty(const Expr& e) {
  if (e.empty()) throw Error(Errc::EmptyInput, "program has no expression");
}

}  // namespace

CompiledProgram::CompiledProgram(const HypothesisProgram& prog, const std::string& active_symbol,
                                 const std::unordered_map<std::string, double>& bindings)
    : expr_(prog.expr) {
  check_nonempty(expr_);
  bound_.assign(expr_.node_count(), 0.0);
  is_active_.assign(expr_.node_count(), 0);
  for (size_t i = 0; i < expr_.node_count(); ++i) {
    const ExprNode& n = expr_.node(static_cast<int32_t>(i));
    if (n.kind != NodeKind::Variable && n.kind != NodeKind::Parameter) continue;
    if (n.symbol == active_symbol) {
      is_active_[i] = 1;
      continue;
    }
    auto it = bindings.find(n.symbol);
    if (it != bindings.end()) {
      bound_[i] = it->second;
      continue;
    }
    if (n.kind == NodeKind::Parameter) {
      if (const ParamSpec* spec = prog.find_param(n.symbol)) {
        bound_[i] = spec->default_value;
        continue;
      }
    }
    throw_unbound(n);
  }
}

double CompiledProgram::operator()(double x) const {
  return eval_rec<double>(expr_, expr_.root(), [&](int32_t idx, const ExprNode&) {
    return is_active_[idx] ? x : bound_[idx];
  });
}

Dual CompiledProgram::dual(double x) const {
  return eval_rec<Dual>(expr_, expr_.root(), [&](int32_t idx, const ExprNode&) {
    return is_active_[idx] ? Dual(x, 1.0) : Dual(bound_[idx], 0.0);
  });
}

double evaluate(const HypothesisProgram& prog,
                const std::unordered_map<std::string, double>& env) {
  check_nonempty(prog.expr);
  return eval_rec<double>(prog.expr, prog.expr.root(), [&](int32_t, const ExprNode& n) {
    return env_value(prog, env, n);
  });
}

std::pair<double, double> evaluate_with_grad(const HypothesisProgram& prog,
                                             const std::unordered_map<std::string, double>& env,
                                             const std::string& wrt) {
  check_nonempty(prog.expr);
  Dual out = eval_rec<Dual>(prog.expr, prog.expr.root(), [&](int32_t, const ExprNode& n) {
    return Dual(env_value(prog, env, n), n.symbol == wrt ? 1.0 : 0.0);
  });
  return {out.v, out.d};
}

}  // namespace hypsearch
