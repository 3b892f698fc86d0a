#include "hypsearch/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hypsearch/digest.hpp"
#include "hypsearch/error.hpp"
#include "hypsearch/rng.hpp"

namespace hypsearch {

namespace {

// Fixed so the train/validation membership never moves between runs.
constexpr uint64_t kSplitSeed = 87032015;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::MissingData, "cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_cell(const std::string& cell, size_t row, size_t col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw Error(Errc::ShapeMismatch, "bad numeric cell at row " +
                                         std::to_string(row) + ", column " +
                                         std::to_string(col));
  }
  return v;
}

}  // namespace

const std::vector<TaskSpec>& builtin_tasks() {
  static const std::vector<TaskSpec> tasks = {
      {"iris-cls", Objective::Classification, 4, 3},
      {"wine-cls", Objective::Classification, 13, 3},
      {"wine-reg", Objective::Regression, 13, 0},
      {"breast-cancer-cls", Objective::Classification, 30, 2},
      {"diabetes-reg", Objective::Regression, 10, 0},
  };
  return tasks;
}

const TaskSpec& task_spec(const std::string& id) {
  for (const TaskSpec& spec : builtin_tasks()) {
    if (spec.id == id) return spec;
  }
  throw Error(Errc::UnknownId, "no such task: " + id);
}

SplitData load_task(const std::string& id, const std::string& data_dir,
                    double validation_fraction) {
  const TaskSpec& spec = task_spec(id);
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error(Errc::InvalidConfig, "validation fraction must be in (0, 1)");
  }

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(data_dir + "/manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MissingData,
                std::string("unreadable manifest: ") + e.what());
  }
  if (!manifest.contains("files") || !manifest["files"].contains(id)) {
    throw Error(Errc::MissingData, "no manifest entry for " + id);
  }
  const nlohmann::json& entry = manifest["files"][id];
  std::string csv_path = data_dir + "/" + id + ".csv";
  std::string csv = read_file(csv_path);

  std::string want = entry.at("sha256").get<std::string>();
  std::string got = sha256_hex(csv);
  if (got != want) {
    throw Error(Errc::ChecksumMismatch,
                csv_path + ": expected " + want + ", got " + got);
  }

  // header + rows; tolerate CRLF and a trailing newline
  std::vector<std::string> lines;
  {
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(line);
    }
  }
  if (lines.empty()) {
    throw Error(Errc::ShapeMismatch, csv_path + " has no header row");
  }
  size_t cols = split_line(lines[0]).size();
  size_t n = lines.size() - 1;
  size_t want_rows = entry.at("rows").get<size_t>();
  size_t want_features = entry.at("feature_columns").get<size_t>();
  if (want_features != static_cast<size_t>(spec.feature_count)) {
    throw Error(Errc::ShapeMismatch,
                id + ": manifest feature count disagrees with the task");
  }
  if (cols != want_features + 1 || n != want_rows) {
    throw Error(Errc::ShapeMismatch,
                csv_path + ": got " + std::to_string(n) + " rows x " +
                    std::to_string(cols) + " columns, expected " +
                    std::to_string(want_rows) + " x " +
                    std::to_string(want_features + 1));
  }

  Eigen::MatrixXd x(n, spec.feature_count);
  Eigen::VectorXd y(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::string> cells = split_line(lines[i + 1]);
    if (cells.size() != cols) {
      throw Error(Errc::ShapeMismatch,
                  csv_path + ": row " + std::to_string(i + 1) + " has " +
                      std::to_string(cells.size()) + " cells");
    }
    for (size_t j = 0; j + 1 < cells.size(); ++j) {
      x(i, j) = parse_cell(cells[j], i + 1, j);
    }
    y(i) = parse_cell(cells.back(), i + 1, cols - 1);
    if (spec.objective == Objective::Classification) {
      double cls = y(i);
      if (cls != std::floor(cls) || cls < 0.0 || cls >= spec.class_count) {
        throw Error(Errc::ShapeMismatch,
                    csv_path + ": target out of class range at row " +
                        std::to_string(i + 1));
      }
    }
  }

  // deterministic split: shuffle row indices once under a fixed seed, then
  // sort each side so membership alone defines the split
  size_t n_val = static_cast<size_t>(std::llround(static_cast<double>(n) *
                                                  validation_fraction));
  n_val = std::min(std::max<size_t>(n_val, 1), n - 1);
  size_t n_train = n - n_val;
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(derive_seed(kSplitSeed, id));
  rng.shuffle(order);
  std::sort(order.begin(), order.begin() + n_train);
  std::sort(order.begin() + n_train, order.end());

  SplitData split;
  split.spec = spec;
  split.train_x.resize(n_train, spec.feature_count);
  split.train_y.resize(n_train);
  split.val_x.resize(n_val, spec.feature_count);
  split.val_y.resize(n_val);
  for (size_t i = 0; i < n_train; ++i) {
    split.train_x.row(i) = x.row(order[i]);
    split.train_y(i) = y(order[i]);
  }
  for (size_t i = 0; i < n_val; ++i) {
    split.val_x.row(i) = x.row(order[n_train + i]);
    split.val_y(i) = y(order[n_train + i]);
  }

  split.mu = split.train_x.colwise().mean();
  Eigen::MatrixXd centered = split.train_x.rowwise() - split.mu.transpose();
  split.sigma = (centered.array().square().colwise().mean()).sqrt();
  for (int j = 0; j < split.sigma.size(); ++j) {
    if (split.sigma(j) == 0.0) split.sigma(j) = 1.0;
  }
  split.lo = split.train_x.colwise().minCoeff();
  split.hi = split.train_x.colwise().maxCoeff();

  if (spec.objective == Objective::Regression) {
    split.target_mu = split.train_y.mean();
    double var = (split.train_y.array() - split.target_mu).square().mean();
    split.target_sigma = var > 0.0 ? std::sqrt(var) : 1.0;
    split.train_y = (split.train_y.array() - split.target_mu) / split.target_sigma;
    split.val_y = (split.val_y.array() - split.target_mu) / split.target_sigma;
  }
  return split;
}

}  // namespace hypsearch
