#include "hypsearch/featurize.hpp"

#include <cmath>
#include <unordered_map>

#include "hypsearch/eval.hpp"

namespace hypsearch {

std::vector<std::pair<std::string, double>> probe_bindings(ComponentKind kind) {
  if (kind == ComponentKind::Preprocessor) {
    return {{"mu", 0.0}, {"sigma", 1.0}, {"lo", -1.0}, {"hi", 1.0}};
  }
  return {};
}

std::vector<double> featurize(const HypothesisProgram& prog) {
  std::vector<double> f(kFeatureCount, 0.0);

  size_t param_nodes = 0;
  size_t const_nodes = 0;
  double const_sum = 0.0;
  double const_sq = 0.0;
  for (size_t i = 0; i < prog.expr.node_count(); ++i) {
    const ExprNode& n = prog.expr.node(static_cast<int32_t>(i));
    switch (n.kind) {
      case NodeKind::Unary:
        f[static_cast<size_t>(n.unary)] += 1.0;
        break;
      case NodeKind::Binary:
        f[kUnaryOpCount + static_cast<size_t>(n.binary)] += 1.0;
        break;
      case NodeKind::Where:
        f[kUnaryOpCount + kBinaryOpCount] += 1.0;
        break;
      case NodeKind::Parameter:
        ++param_nodes;
        break;
      case NodeKind::Constant:
        ++const_nodes;
        const_sum += n.value;
        const_sq += n.value * n.value;
        break;
      case NodeKind::Variable:
        break;
    }
  }

  size_t base = kUnaryOpCount + kBinaryOpCount + 1;
  f[base + 0] = static_cast<double>(prog.expr.depth());
  f[base + 1] = static_cast<double>(prog.expr.node_count());
  f[base + 2] = static_cast<double>(param_nodes);
  f[base + 3] = static_cast<double>(const_nodes);
  if (const_nodes > 0) {
    double mean = const_sum / static_cast<double>(const_nodes);
    double var = const_sq / static_cast<double>(const_nodes) - mean * mean;
    f[base + 4] = mean;
    f[base + 5] = std::sqrt(var > 0.0 ? var : 0.0);
  }

  std::unordered_map<std::string, double> bindings;
  for (const auto& [name, value] : probe_bindings(prog.kind)) bindings[name] = value;
  CompiledProgram cp(prog, std::string(probe_variable(prog.kind)), bindings);

  bool non_finite = false;
  for (size_t i = 0; i < kProbeCount; ++i) {
    double y = cp(probe_point(i));
    if (std::isnan(y)) {
      y = 10.0;
      non_finite = true;
    } else if (std::isinf(y)) {
      y = y > 0 ? 10.0 : -10.0;
      non_finite = true;
    } else if (y > 10.0) {
      y = 10.0;
    } else if (y < -10.0) {
      y = -10.0;
    }
    f[base + 6 + i] = y;
  }
  f[base + 6 + kProbeCount] = non_finite ? 1.0 : 0.0;
  return f;
}

}  // namespace hypsearch
