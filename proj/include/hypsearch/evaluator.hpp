#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hypsearch/ast.hpp"
#include "hypsearch/datasets.hpp"

namespace hypsearch {

enum class RunStatus { Ok, NonFinite, ValidatorRejected };

std::string_view run_status_name(RunStatus status);
RunStatus run_status_from_name(std::string_view name);

// One (hypothesis, task, seed) measurement. `loss` is meaningful only
// when status == Ok, and is then finite.
struct EvalRecord {
  std::string hypothesis_id;
  std::string task_id;
  int run_index = 0;
  uint64_t run_seed = 0;
  RunStatus status = RunStatus::Ok;
  double loss = 0.0;
};

enum class ProtocolMode { OneEpoch, SingleStep };

struct ProtocolConfig {
  ProtocolMode mode = ProtocolMode::OneEpoch;
  double learning_rate = 0.01;
  int batch_size = 16;
  int runs_per_task = 3;
  double validation_fraction = 0.2;
};

// The fixed 2-layer MLP (input -> 64 -> 16 -> output) with one component
// slot holding the hypothesis under test and the other two defaulted.
struct ModelAssembly {
  TaskSpec task;
  ComponentKind slot = ComponentKind::Activation;
  std::string hypothesis_id;
  HypothesisProgram activation;
  HypothesisProgram preprocessor;
  HypothesisProgram regularizer;
  int hidden1 = 64;
  int hidden2 = 16;

  int input_dim() const { return task.feature_count; }
  int output_dim() const {
    return task.objective == Objective::Classification ? task.class_count : 1;
  }
  // weights + biases across the three layers
  int parameter_count() const {
    return (input_dim() * hidden1 + hidden1) + (hidden1 * hidden2 + hidden2) +
           (hidden2 * output_dim() + output_dim());
  }
};

// Neutral slot defaults: max(x, 0) activation, standardize preprocessor,
// zero regularizer.
const HypothesisProgram& default_component(ComponentKind kind);

// Baseline sets scored against: activations ReLU / Sigmoid / Tanh / ELU,
// preprocessors Standardize / MinMax / Identity, regularizers Zero / L2 / L1.
const std::vector<HypothesisProgram>& builtin_baselines(ComponentKind kind);

// Stable content id: SHA-256 hex of the canonical serialization.
std::string hypothesis_id(const HypothesisProgram& prog);

// Seed for run i (1-based) of a hypothesis on a task.
uint64_t run_seed(const std::string& hypothesis_id, const std::string& task_id,
                  int run_index);

// Places the hypothesis in its slot. Throws Error(KindMismatch) when the
// program's declared kind differs from `kind`.
ModelAssembly assemble(const HypothesisProgram& hypothesis, ComponentKind kind,
                       const TaskSpec& task);

// One training run under the protocol; failures are encoded in the record
// status, never thrown.
EvalRecord train_eval(const ModelAssembly& assembly, const SplitData& split,
                      uint64_t seed, const ProtocolConfig& protocol);

// R runs on every task, seeds derived from (hypothesis id, task id, index)
// so records do not depend on execution order.
std::vector<EvalRecord> evaluate_hypothesis(const HypothesisProgram& hypothesis,
                                            ComponentKind kind,
                                            const std::vector<SplitData>& tasks,
                                            const ProtocolConfig& protocol);

namespace detail {

// Test hook: validation data loss of the untrained model with every weight
// and bias forced to zero (uniform logits).
double zero_init_validation_loss(const ModelAssembly& assembly,
                                 const SplitData& split);

}  // namespace detail

}  // namespace hypsearch
