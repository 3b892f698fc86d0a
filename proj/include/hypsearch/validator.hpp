#pragma once

#include <string>
#include <vector>

#include "hypsearch/ast.hpp"

namespace hypsearch {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// passed ⇔ every check passed; the checks vector always holds the same 8
// entries in the same order. Checks that cannot run because an earlier one
// failed are marked failed with a "not run" detail.
struct ValidationReport {
  bool passed = false;
  std::vector<CheckResult> checks;

  const CheckResult* find(std::string_view name) const;
};

// Runs, in order: parse, kind-match, param-defaults, variables,
// finite-values, finite-derivatives, non-constant (activation/preprocessor
// only), regularizer-at-zero (regularizer only). Checks 4-8 judge the text
// against the requested kind, not the declared one.
ValidationReport validate(const std::string& text, ComponentKind kind);

// Fraction of reports with passed = true. Errors: EmptyInput.
double validator_pass_rate(const std::vector<ValidationReport>& reports);

}  // namespace hypsearch
