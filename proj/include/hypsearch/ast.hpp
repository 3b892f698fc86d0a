#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hypsearch {

enum class ComponentKind { Activation, Preprocessor, Regularizer };

std::string_view kind_name(ComponentKind kind);
ComponentKind kind_from_name(std::string_view name);

// Variables a program of the given kind may reference.
const std::vector<std::string>& variables_for(ComponentKind kind);
bool is_variable_of(ComponentKind kind, std::string_view name);
// True if `name` is a variable of any kind (x, mu, sigma, lo, hi, w).
bool is_known_variable(std::string_view name);

// The probe variable driven across the grid: x for activations and
// preprocessors, w for regularizers.
std::string_view probe_variable(ComponentKind kind);

enum class UnaryOp { Neg, Abs, Sin, Cos, Tanh, Sigmoid, Exp, Softplus, Sqrt, Log };
enum class BinaryOp { Add, Sub, Mul, Div, Min, Max, Pow };
enum class CmpOp { Ge, Gt, Le, Lt };

constexpr int kUnaryOpCount = 10;
constexpr int kBinaryOpCount = 7;

std::string_view unary_name(UnaryOp op);
std::string_view binary_name(BinaryOp op);
std::string_view cmp_name(CmpOp op);

enum class NodeKind { Constant, Variable, Parameter, Unary, Binary, Where };

// One expression node. Nodes live in an Expr arena and refer to children
// by index; a Where node stores the guard comparison inline as
// (cmp, child[0] <op> child[1]) with child[2]/child[3] the true/false
// branches.
struct ExprNode {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;
  std::string symbol;
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  CmpOp cmp = CmpOp::Ge;
  std::array<int32_t, 4> child = {-1, -1, -1, -1};
};

class Expr {
 public:
  int32_t constant(double v);
  int32_t variable(std::string name);
  int32_t parameter(std::string name);
  // Neg of a constant folds into a negated constant so that canonical
  // text like "-3.5" round-trips to a structurally identical tree.
  int32_t unary(UnaryOp op, int32_t a);
  int32_t binary(BinaryOp op, int32_t a, int32_t b);
  int32_t where(CmpOp cmp, int32_t lhs, int32_t rhs, int32_t then_branch, int32_t else_branch);

  const ExprNode& node(int32_t id) const { return nodes_[static_cast<size_t>(id)]; }
  int32_t root() const { return root_; }
  void set_root(int32_t id) { root_ = id; }
  size_t node_count() const { return nodes_.size(); }
  int depth() const;

  bool empty() const { return root_ < 0; }

 private:
  int32_t push(ExprNode n);
  std::vector<ExprNode> nodes_;
  int32_t root_ = -1;
};

struct ParamSpec {
  std::string name;
  double default_value = 0.0;
};

struct HypothesisProgram {
  ComponentKind kind = ComponentKind::Activation;
  std::string name;
  std::vector<ParamSpec> params;
  Expr expr;

  const ParamSpec* find_param(std::string_view name) const;
};

// Structural equality: same tree shape, ops, symbols; constants compare
// bit-for-bit (so 0.0 and -0.0 differ, matching their serializations).
bool structurally_equal(const Expr& a, const Expr& b);
// Program equality additionally compares kind, name, and the param set
// (order-insensitive; canonical serialization reorders params by first use).
bool structurally_equal(const HypothesisProgram& a, const HypothesisProgram& b);

}  // namespace hypsearch
