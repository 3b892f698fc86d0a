#include "hypsearch/random_program.hpp"

namespace hypsearch {
namespace {

class Sampler {
 public:
  Sampler(Rng& rng, HypothesisProgram& prog, int max_depth)
      : rng_(rng), prog_(prog), max_depth_(max_depth), vars_(variables_for(prog.kind)) {}

  int32_t sample(int depth) {
    if (depth >= max_depth_ || rng_.uniform() < 0.3) return leaf();
    double r = rng_.uniform();
    if (r < 0.40) {
      auto op = static_cast<UnaryOp>(rng_.index(kUnaryOpCount));
      int32_t child = sample(depth + 1);
      // Neg of a constant folds into the constant, which can no longer be
      // told apart from sampling the folded value directly; keep it.
      return prog_.expr.unary(op, child);
    }
    if (r < 0.85) {
      auto op = static_cast<BinaryOp>(rng_.index(kBinaryOpCount));
      int32_t a = sample(depth + 1);
      int32_t b = sample(depth + 1);
      return prog_.expr.binary(op, a, b);
    }
    auto cmp = static_cast<CmpOp>(rng_.index(4));
    int32_t lhs = sample(depth + 1);
    int32_t rhs = sample(depth + 1);
    int32_t then_branch = sample(depth + 1);
    int32_t else_branch = sample(depth + 1);
    return prog_.expr.where(cmp, lhs, rhs, then_branch, else_branch);
  }

 private:
  int32_t leaf() {
    double r = rng_.uniform();
    if (r < 0.5) {
      // favor the probe variable so most programs actually vary
      if (vars_.size() > 1 && rng_.uniform() < 0.4) {
        return prog_.expr.variable(vars_[rng_.index(vars_.size())]);
      }
      return prog_.expr.variable(std::string(probe_variable(prog_.kind)));
    }
    if (r < 0.8 || prog_.params.empty()) {
      return prog_.expr.constant(rng_.uniform(-2.0, 2.0));
    }
    return prog_.expr.parameter(prog_.params[rng_.index(prog_.params.size())].name);
  }

  Rng& rng_;
  HypothesisProgram& prog_;
  int max_depth_;
  const std::vector<std::string>& vars_;
};

}  // namespace

HypothesisProgram random_program(Rng& rng, ComponentKind kind, int max_depth) {
  HypothesisProgram prog;
  prog.kind = kind;
  prog.name = "Rnd";
  static const char* kParamNames[2] = {"alpha", "beta"};
  size_t n_params = rng.index(3);
  for (size_t i = 0; i < n_params; ++i) {
    prog.params.push_back({kParamNames[i], rng.uniform(0.1, 2.0)});
  }
  Sampler sampler(rng, prog, max_depth);
  prog.expr.set_root(sampler.sample(1));
  return prog;
}

}  // namespace hypsearch
