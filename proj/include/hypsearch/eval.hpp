#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypsearch/ast.hpp"

namespace hypsearch {

// Forward-mode dual number. Arithmetic on the `d` slot follows the usual
// chain rule; conventions at non-differentiable points: abs'(0) = 0,
// min/max ties take the left argument, where() differentiates only the
// taken branch and ignores the guard.
struct Dual {
  double v = 0.0;
  double d = 0.0;

  Dual() = default;
  Dual(double value) : v(value) {}
  Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) {
  // max(x, 0) + log1p(exp(-|x|)) avoids overflow on either tail
  return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline Dual sin(Dual a) { return {std::sin(a.v), a.d * std::cos(a.v)}; }
inline Dual cos(Dual a) { return {std::cos(a.v), -a.d * std::sin(a.v)}; }
inline Dual tanh(Dual a) {
  double t = std::tanh(a.v);
  return {t, a.d * (1.0 - t * t)};
}
inline Dual exp(Dual a) {
  double e = std::exp(a.v);
  return {e, a.d * e};
}
inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sqrt(Dual a) {
  double s = std::sqrt(a.v);
  return {s, a.d * 0.5 / s};
}
inline Dual sigmoid(Dual a) {
  double s = sigmoid(a.v);
  return {s, a.d * s * (1.0 - s)};
}
inline Dual softplus(Dual a) { return {softplus(a.v), a.d * sigmoid(a.v)}; }
inline Dual abs(Dual a) {
  if (a.v < 0.0) return {-a.v, -a.d};
  if (a.v > 0.0) return {a.v, a.d};
  return {std::abs(a.v), 0.0};
}
inline Dual pow(Dual a, Dual b) {
  double v = std::pow(a.v, b.v);
  double d;
  if (b.d == 0.0) {
    // power rule; keeps negative bases with constant exponents exact and
    // constant subtrees at zero derivative
    d = a.d == 0.0 ? 0.0 : b.v * std::pow(a.v, b.v - 1.0) * a.d;
  } else {
    d = v * (b.d * std::log(a.v) + b.v * a.d / a.v);
  }
  return {v, d};
}

// min/max with an explicit tie rule shared by the double and Dual paths
inline double vmin(double a, double b) { return a <= b ? a : b; }
inline double vmax(double a, double b) { return a >= b ? a : b; }
inline Dual vmin(Dual a, Dual b) { return a.v <= b.v ? a : b; }
inline Dual vmax(Dual a, Dual b) { return a.v >= b.v ? a : b; }

// A program with every symbol except one bound to a fixed value, for
// element-wise application. Parameters take their declared defaults unless
// `bindings` overrides them; non-active variables must appear in
// `bindings`. Throws UnboundVariable otherwise.
class CompiledProgram {
 public:
  CompiledProgram(const HypothesisProgram& prog, const std::string& active_symbol,
                  const std::unordered_map<std::string, double>& bindings = {});

  double operator()(double x) const;
  // Value and derivative with respect to the active symbol.
  Dual dual(double x) const;

 private:
  Expr expr_;
  std::vector<double> bound_;
  std::vector<uint8_t> is_active_;
};

// Tree-walking evaluation with all symbols (variables and parameter
// overrides) supplied by `env`; parameters absent from `env` use their
// declared defaults.
double evaluate(const HypothesisProgram& prog,
                const std::unordered_map<std::string, double>& env);

// Value and partial derivative with respect to `wrt` at the same point.
std::pair<double, double> evaluate_with_grad(const HypothesisProgram& prog,
                                             const std::unordered_map<std::string, double>& env,
                                             const std::string& wrt);

}  // namespace hypsearch
