#include "hypsearch/serialize.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <unordered_set>

namespace hypsearch {
namespace {

// Precedence levels used to decide parenthesisation. Right operands of a
// binary node at the same level are parenthesised so the emitted text
// reparses to the identical tree, not just an equivalent one.
constexpr int kLevelAddSub = 1;
constexpr int kLevelMulDiv = 2;
constexpr int kLevelNeg = 3;
constexpr int kLevelAtom = 4;

const char* unary_fn_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "neg";  // spelled '-' during rendering
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
  return "?";
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
  }
  return "?";
}

class Renderer {
 public:
  explicit Renderer(const Expr& expr) : expr_(expr) {}

  std::string render() {
    std::string out;
    emit(expr_.root(), out);
    return out;
  }

  // Parameter names in order of first appearance during rendering.
  const std::vector<std::string>& param_order() const { return param_order_; }

 private:
  int level_of(const ExprNode& n) const {
    switch (n.kind) {
      case NodeKind::Binary:
        switch (n.binary) {
          case BinaryOp::Add:
          case BinaryOp::Sub: return kLevelAddSub;
          case BinaryOp::Mul:
          case BinaryOp::Div: return kLevelMulDiv;
          case BinaryOp::Min:
          case BinaryOp::Max:
          case BinaryOp::Pow: return kLevelAtom;  // rendered as calls
        }
        return kLevelAtom;
      case NodeKind::Unary:
        return n.unary == UnaryOp::Neg ? kLevelNeg : kLevelAtom;
      default:
        return kLevelAtom;
    }
  }

  void emit(int32_t idx, std::string& out) {
    const ExprNode& n = expr_.node(idx);
    switch (n.kind) {
      case NodeKind::Constant:
        out += format_double(n.value);
        return;
      case NodeKind::Variable:
        out += n.symbol;
        return;
      case NodeKind::Parameter:
        if (!seen_params_.count(n.symbol)) {
          seen_params_.insert(n.symbol);
          param_order_.push_back(n.symbol);
        }
        out += n.symbol;
        return;
      case NodeKind::Unary:
        if (n.unary == UnaryOp::Neg) {
          out += '-';
          emit_wrapped(n.child[0], kLevelAtom, false, out);
        } else {
          out += unary_fn_name(n.unary);
          out += '(';
          emit(n.child[0], out);
          out += ')';
        }
        return;
      case NodeKind::Binary:
        switch (n.binary) {
          case BinaryOp::Min:
          case BinaryOp::Max:
          case BinaryOp::Pow: {
            out += n.binary == BinaryOp::Min ? "min" : n.binary == BinaryOp::Max ? "max" : "pow";
            out += '(';
            emit(n.child[0], out);
            out += ", ";
            emit(n.child[1], out);
            out += ')';
            return;
          }
          default: {
            int level = level_of(n);
            const char* op = n.binary == BinaryOp::Add   ? " + "
                             : n.binary == BinaryOp::Sub ? " - "
                             : n.binary == BinaryOp::Mul ? " * "
                                                         : " / ";
            emit_wrapped(n.child[0], level, false, out);
            out += op;
            emit_wrapped(n.child[1], level, true, out);
            return;
          }
        }
      case NodeKind::Where:
        out += "where(";
        emit(n.child[0], out);
        out += ' ';
        out += cmp_text(n.cmp);
        out += ' ';
        emit(n.child[1], out);
        out += ", ";
        emit(n.child[2], out);
        out += ", ";
        emit(n.child[3], out);
        out += ')';
        return;
    }
  }

  // Parenthesises when the child binds looser than the parent requires;
  // equal levels on the right operand also get parens so the text reparses
  // to the identical tree under left associativity.
  void emit_wrapped(int32_t idx, int parent_level, bool is_right, std::string& out) {
    int level = level_of(expr_.node(idx));
    bool parens = is_right ? level <= parent_level : level < parent_level;
    if (parens) out += '(';
    emit(idx, out);
    if (parens) out += ')';
  }

  const Expr& expr_;
  std::unordered_set<std::string> seen_params_;
  std::vector<std::string> param_order_;
};

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "1e999" : "-1e999";
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string serialize_expr(const Expr& expr) {
  Renderer r(expr);
  return r.render();
}

std::string serialize(const HypothesisProgram& prog) {
  Renderer r(prog.expr);
  std::string body = r.render();

  std::string out = "component ";
  out += kind_name(prog.kind);
  out += " \"";
  out += prog.name;
  out += "\"\n";

  std::unordered_set<std::string> emitted;
  auto emit_param = [&](const std::string& name) {
    const ParamSpec* spec = prog.find_param(name);
    if (!spec || emitted.count(name)) return;
    emitted.insert(name);
    out += "param ";
    out += name;
    out += " = ";
    out += format_double(spec->default_value);
    out += '\n';
  };
  for (const std::string& name : r.param_order()) emit_param(name);
  for (const ParamSpec& spec : prog.params) emit_param(spec.name);

  out += "expr ";
  out += body;
  out += '\n';
  return out;
}

}  // namespace hypsearch
