#include "hypsearch/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypsearch/digest.hpp"
#include "hypsearch/error.hpp"
#include "hypsearch/eval.hpp"
#include "hypsearch/parse.hpp"
#include "hypsearch/rng.hpp"
#include "hypsearch/serialize.hpp"

namespace hypsearch {

namespace {

HypothesisProgram parse_builtin(const char* text) { return parse(text); }

const std::vector<HypothesisProgram>& builtin_set(ComponentKind kind) {
  static const std::vector<HypothesisProgram> activations = {
      parse_builtin("component activation \"ReLU\"\nexpr max(x, 0)\n"),
      parse_builtin("component activation \"Sigmoid\"\nexpr sigmoid(x)\n"),
      parse_builtin("component activation \"Tanh\"\nexpr tanh(x)\n"),
      parse_builtin(
          "component activation \"ELU\"\nexpr where(x >= 0, x, exp(x) - 1)\n"),
  };
  static const std::vector<HypothesisProgram> preprocessors = {
      parse_builtin(
          "component preprocessor \"Standardize\"\nexpr (x - mu) / sigma\n"),
      parse_builtin(
          "component preprocessor \"MinMax\"\nexpr (x - lo) / (hi - lo)\n"),
      parse_builtin("component preprocessor \"Identity\"\nexpr x\n"),
  };
  static const std::vector<HypothesisProgram> regularizers = {
      parse_builtin("component regularizer \"Zero\"\nexpr 0\n"),
      parse_builtin(
          "component regularizer \"L2\"\nparam lambda = 0.0001\nexpr lambda * w * w\n"),
      parse_builtin(
          "component regularizer \"L1\"\nparam lambda = 0.0001\nexpr lambda * abs(w)\n"),
  };
  switch (kind) {
    case ComponentKind::Preprocessor: return preprocessors;
    case ComponentKind::Regularizer: return regularizers;
    default: return activations;
  }
}

void check_protocol(const ProtocolConfig& protocol) {
  if (protocol.runs_per_task < 1) {
    throw Error(Errc::InvalidConfig, "runs per task must be >= 1");
  }
  if (protocol.batch_size < 1) {
    throw Error(Errc::InvalidConfig, "batch size must be >= 1");
  }
  if (!(protocol.learning_rate > 0.0) ||
      !std::isfinite(protocol.learning_rate)) {
    throw Error(Errc::InvalidConfig, "learning rate must be positive");
  }
  if (!(protocol.validation_fraction > 0.0 &&
        protocol.validation_fraction < 1.0)) {
    throw Error(Errc::InvalidConfig, "validation fraction must be in (0, 1)");
  }
}

struct Mlp {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;
};

Mlp make_zero_mlp(const ModelAssembly& assembly) {
  Mlp mlp;
  mlp.w1 = Eigen::MatrixXd::Zero(assembly.hidden1, assembly.input_dim());
  mlp.w2 = Eigen::MatrixXd::Zero(assembly.hidden2, assembly.hidden1);
  mlp.w3 = Eigen::MatrixXd::Zero(assembly.output_dim(), assembly.hidden2);
  mlp.b1 = Eigen::VectorXd::Zero(assembly.hidden1);
  mlp.b2 = Eigen::VectorXd::Zero(assembly.hidden2);
  mlp.b3 = Eigen::VectorXd::Zero(assembly.output_dim());
  return mlp;
}

// Glorot-uniform: U(-limit, limit), limit = sqrt(6 / (fan_in + fan_out)).
// Matrices fill row by row so the draw order is pinned.
void glorot_fill(Eigen::MatrixXd& w, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      w(i, j) = rng.uniform(-limit, limit);
    }
  }
}

// Preprocess one feature matrix with the per-feature train statistics.
// Returns false when any output is non-finite.
bool apply_preprocessor(const HypothesisProgram& pre, const SplitData& split,
                        const Eigen::MatrixXd& x, Eigen::MatrixXd& out) {
  out.resize(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    CompiledProgram prog(pre, "x",
                         {{"mu", split.mu(j)},
                          {"sigma", split.sigma(j)},
                          {"lo", split.lo(j)},
                          {"hi", split.hi(j)}});
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(i, j) = prog(x(i, j));
    }
  }
  return out.allFinite();
}

// Elementwise activation value + derivative. False on non-finite output.
bool act_forward(const CompiledProgram& act, const Eigen::MatrixXd& z,
                 Eigen::MatrixXd& h, Eigen::MatrixXd& d) {
  h.resize(z.rows(), z.cols());
  d.resize(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      Dual r = act.dual(z(i, j));
      h(i, j) = r.v;
      d(i, j) = r.d;
    }
  }
  return h.allFinite() && d.allFinite();
}

bool act_values(const CompiledProgram& act, const Eigen::MatrixXd& z,
                Eigen::MatrixXd& h) {
  h.resize(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      h(i, j) = act(z(i, j));
    }
  }
  return h.allFinite();
}

// Mean data loss over the rows of `logits`. Classification expects class
// indices in y; regression expects a single output column.
double data_loss(const TaskSpec& task, const Eigen::MatrixXd& logits,
                 const Eigen::VectorXd& y) {
  Eigen::Index rows = logits.rows();
  double total = 0.0;
  if (task.objective == Objective::Classification) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      double m = logits.row(i).maxCoeff();
      double sum = (logits.row(i).array() - m).exp().sum();
      Eigen::Index cls = static_cast<Eigen::Index>(y(i));
      total += -(logits(i, cls) - m - std::log(sum));
    }
  } else {
    for (Eigen::Index i = 0; i < rows; ++i) {
      double diff = logits(i, 0) - y(i);
      total += diff * diff;
    }
  }
  return total / static_cast<double>(rows);
}

// dLoss/dLogits of the per-row losses summed over the batch. Training
// optimizes the batch sum (matching the regularizer's sum over weight
// scalars); only the reported validation metric divides by rows.
Eigen::MatrixXd data_loss_grad(const TaskSpec& task,
                               const Eigen::MatrixXd& logits,
                               const Eigen::VectorXd& y) {
  Eigen::Index rows = logits.rows();
  Eigen::MatrixXd g(logits.rows(), logits.cols());
  if (task.objective == Objective::Classification) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      double m = logits.row(i).maxCoeff();
      Eigen::ArrayXd e = (logits.row(i).array() - m).exp();
      g.row(i) = (e / e.sum()).matrix();
      g(i, static_cast<Eigen::Index>(y(i))) -= 1.0;
    }
  } else {
    for (Eigen::Index i = 0; i < rows; ++i) {
      g(i, 0) = 2.0 * (logits(i, 0) - y(i));
    }
  }
  return g;
}

// Penalty value and in-place gradient for one weight matrix.
bool regularize(const CompiledProgram& reg, const Eigen::MatrixXd& w,
                Eigen::MatrixXd& grad, double& penalty) {
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      Dual r = reg.dual(w(i, j));
      penalty += r.v;
      grad(i, j) += r.d;
    }
  }
  return std::isfinite(penalty) && grad.allFinite();
}

// Forward pass without gradients; false on any non-finite intermediate.
bool forward_values(const Mlp& mlp, const CompiledProgram& act,
                    const Eigen::MatrixXd& x, Eigen::MatrixXd& logits) {
  Eigen::MatrixXd z1 = (x * mlp.w1.transpose()).rowwise() + mlp.b1.transpose();
  Eigen::MatrixXd h1;
  if (!z1.allFinite() || !act_values(act, z1, h1)) return false;
  Eigen::MatrixXd z2 = (h1 * mlp.w2.transpose()).rowwise() + mlp.b2.transpose();
  Eigen::MatrixXd h2;
  if (!z2.allFinite() || !act_values(act, z2, h2)) return false;
  logits = (h2 * mlp.w3.transpose()).rowwise() + mlp.b3.transpose();
  return logits.allFinite();
}

}  // namespace

std::string_view run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::NonFinite: return "non-finite";
    case RunStatus::ValidatorRejected: return "validator-rejected";
  }
  return "ok";
}

RunStatus run_status_from_name(std::string_view name) {
  if (name == "ok") return RunStatus::Ok;
  if (name == "non-finite") return RunStatus::NonFinite;
  if (name == "validator-rejected") return RunStatus::ValidatorRejected;
  throw Error(Errc::CorruptRecord, "unknown run status: " + std::string(name));
}

const HypothesisProgram& default_component(ComponentKind kind) {
  return builtin_set(kind)[0];
}

const std::vector<HypothesisProgram>& builtin_baselines(ComponentKind kind) {
  return builtin_set(kind);
}

std::string hypothesis_id(const HypothesisProgram& prog) {
  return sha256_hex(serialize(prog));
}

uint64_t run_seed(const std::string& hypothesis_id, const std::string& task_id,
                  int run_index) {
  return fnv1a64(hypothesis_id + "|" + task_id + "|" +
                 std::to_string(run_index));
}

ModelAssembly assemble(const HypothesisProgram& hypothesis, ComponentKind kind,
                       const TaskSpec& task) {
  if (hypothesis.kind != kind) {
    throw Error(Errc::KindMismatch,
                std::string("hypothesis declares ") +
                    std::string(kind_name(hypothesis.kind)) + ", slot wants " +
                    std::string(kind_name(kind)));
  }
  ModelAssembly assembly;
  assembly.task = task;
  assembly.slot = kind;
  assembly.hypothesis_id = hypothesis_id(hypothesis);
  assembly.activation = default_component(ComponentKind::Activation);
  assembly.preprocessor = default_component(ComponentKind::Preprocessor);
  assembly.regularizer = default_component(ComponentKind::Regularizer);
  switch (kind) {
    case ComponentKind::Activation: assembly.activation = hypothesis; break;
    case ComponentKind::Preprocessor: assembly.preprocessor = hypothesis; break;
    case ComponentKind::Regularizer: assembly.regularizer = hypothesis; break;
  }
  return assembly;
}

EvalRecord train_eval(const ModelAssembly& assembly, const SplitData& split,
                      uint64_t seed, const ProtocolConfig& protocol) {
  check_protocol(protocol);
  EvalRecord record;
  record.hypothesis_id = assembly.hypothesis_id;
  record.task_id = split.spec.id;
  record.run_seed = seed;
  record.status = RunStatus::NonFinite;

  Eigen::MatrixXd train_x, val_x;
  if (!apply_preprocessor(assembly.preprocessor, split, split.train_x, train_x) ||
      !apply_preprocessor(assembly.preprocessor, split, split.val_x, val_x)) {
    return record;
  }

  CompiledProgram act(assembly.activation, "x");
  CompiledProgram reg(assembly.regularizer, "w");

  Mlp mlp = make_zero_mlp(assembly);
  {
    Rng init(derive_seed(seed, "init"));
    glorot_fill(mlp.w1, init);
    glorot_fill(mlp.w2, init);
    glorot_fill(mlp.w3, init);
  }

  std::vector<size_t> order(train_x.rows());
  std::iota(order.begin(), order.end(), size_t{0});
  {
    Rng shuffler(derive_seed(seed, "shuffle"));
    shuffler.shuffle(order);
  }

  size_t batch_size = static_cast<size_t>(protocol.batch_size);
  size_t n_train = order.size();
  for (size_t start = 0; start < n_train; start += batch_size) {
    size_t rows = std::min(batch_size, n_train - start);
    Eigen::MatrixXd x(rows, train_x.cols());
    Eigen::VectorXd y(rows);
    for (size_t i = 0; i < rows; ++i) {
      x.row(i) = train_x.row(order[start + i]);
      y(i) = split.train_y(order[start + i]);
    }

    Eigen::MatrixXd z1 = (x * mlp.w1.transpose()).rowwise() + mlp.b1.transpose();
    Eigen::MatrixXd h1, d1;
    if (!z1.allFinite() || !act_forward(act, z1, h1, d1)) return record;
    Eigen::MatrixXd z2 = (h1 * mlp.w2.transpose()).rowwise() + mlp.b2.transpose();
    Eigen::MatrixXd h2, d2;
    if (!z2.allFinite() || !act_forward(act, z2, h2, d2)) return record;
    Eigen::MatrixXd logits = (h2 * mlp.w3.transpose()).rowwise() + mlp.b3.transpose();
    if (!logits.allFinite()) return record;
    if (!std::isfinite(data_loss(split.spec, logits, y))) return record;

    Eigen::MatrixXd d_logits = data_loss_grad(split.spec, logits, y);
    Eigen::MatrixXd g_w3 = d_logits.transpose() * h2;
    Eigen::VectorXd g_b3 = d_logits.colwise().sum();
    Eigen::MatrixXd d_z2 = (d_logits * mlp.w3).cwiseProduct(d2);
    Eigen::MatrixXd g_w2 = d_z2.transpose() * h1;
    Eigen::VectorXd g_b2 = d_z2.colwise().sum();
    Eigen::MatrixXd d_z1 = (d_z2 * mlp.w2).cwiseProduct(d1);
    Eigen::MatrixXd g_w1 = d_z1.transpose() * x;
    Eigen::VectorXd g_b1 = d_z1.colwise().sum();

    double penalty = 0.0;
    if (!regularize(reg, mlp.w1, g_w1, penalty) ||
        !regularize(reg, mlp.w2, g_w2, penalty) ||
        !regularize(reg, mlp.w3, g_w3, penalty)) {
      return record;
    }
    if (!g_w1.allFinite() || !g_b1.allFinite() || !g_w2.allFinite() ||
        !g_b2.allFinite() || !g_w3.allFinite() || !g_b3.allFinite()) {
      return record;
    }

    double lr = protocol.learning_rate;
    mlp.w1 -= lr * g_w1;
    mlp.b1 -= lr * g_b1;
    mlp.w2 -= lr * g_w2;
    mlp.b2 -= lr * g_b2;
    mlp.w3 -= lr * g_w3;
    mlp.b3 -= lr * g_b3;

    if (protocol.mode == ProtocolMode::SingleStep) break;
  }

  Eigen::MatrixXd val_logits;
  if (!forward_values(mlp, act, val_x, val_logits)) return record;
  double loss = data_loss(split.spec, val_logits, split.val_y);
  if (!std::isfinite(loss)) return record;
  record.status = RunStatus::Ok;
  record.loss = loss;
  return record;
}

std::vector<EvalRecord> evaluate_hypothesis(const HypothesisProgram& hypothesis,
                                            ComponentKind kind,
                                            const std::vector<SplitData>& tasks,
                                            const ProtocolConfig& protocol) {
  check_protocol(protocol);
  std::vector<EvalRecord> records;
  records.reserve(tasks.size() * static_cast<size_t>(protocol.runs_per_task));
  for (const SplitData& split : tasks) {
    ModelAssembly assembly = assemble(hypothesis, kind, split.spec);
    for (int i = 1; i <= protocol.runs_per_task; ++i) {
      uint64_t seed = run_seed(assembly.hypothesis_id, split.spec.id, i);
      EvalRecord record = train_eval(assembly, split, seed, protocol);
      record.run_index = i;
      records.push_back(std::move(record));
    }
  }
  return records;
}

namespace detail {

double zero_init_validation_loss(const ModelAssembly& assembly,
                                 const SplitData& split) {
  Eigen::MatrixXd val_x;
  if (!apply_preprocessor(assembly.preprocessor, split, split.val_x, val_x)) {
    throw Error(Errc::ShapeMismatch, "preprocessor output not finite");
  }
  CompiledProgram act(assembly.activation, "x");
  Mlp mlp = make_zero_mlp(assembly);
  Eigen::MatrixXd logits;
  if (!forward_values(mlp, act, val_x, logits)) {
    throw Error(Errc::ShapeMismatch, "forward pass not finite");
  }
  return data_loss(split.spec, logits, split.val_y);
}

}  // namespace detail

}  // namespace hypsearch
