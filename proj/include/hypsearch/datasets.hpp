#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace hypsearch {

enum class Objective { Classification, Regression };

struct TaskSpec {
  std::string id;
  Objective objective;
  int feature_count;
  int class_count;  // 0 for regression
};

// The five bundled tasks.
const std::vector<TaskSpec>& builtin_tasks();

// Spec for one bundled task id. Throws Error(UnknownId) otherwise.
const TaskSpec& task_spec(const std::string& id);

// One task split into train/validation with train-only statistics.
// Classification targets are class indices; regression targets are
// standardized by the train mean/std (raw moments kept alongside).
struct SplitData {
  TaskSpec spec;
  Eigen::MatrixXd train_x;
  Eigen::VectorXd train_y;
  Eigen::MatrixXd val_x;
  Eigen::VectorXd val_y;
  // per-feature statistics over train rows (population std, 0 -> 1)
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  // raw-target train moments, identity (0, 1) for classification
  double target_mu = 0.0;
  double target_sigma = 1.0;
};

// Loads data/<id>.csv after verifying its SHA-256 against
// data/manifest.json, then splits train/validation deterministically.
// Throws Error with MissingData / ChecksumMismatch / ShapeMismatch.
SplitData load_task(const std::string& id, const std::string& data_dir = "data",
                    double validation_fraction = 0.2);

}  // namespace hypsearch
